#include "wigkit/measurements.hpp"

#include "wigkit/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace wigkit {

namespace {
constexpr double two_pi = 2.0 * M_PI;
constexpr double four_pi = 4.0 * M_PI;

std::string fmt_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace

PovmFamily heterodyne_family(const PhaseGrid& outcome_grid) {
    if (outcome_grid.dim() % 2 != 0)
        throw std::invalid_argument("heterodyne_family: outcome grid covers whole modes");
    const int modes = outcome_grid.dim() / 2;
    if (modes != 1)
        throw std::invalid_argument("heterodyne_family: single-mode outcomes only");

    PovmFamily family;
    family.modes = modes;
    family.positive_wigner = true;
    family.complete = true;
    family.descriptor = {
        {"kind", "heterodyne"},
        {"outcome_points_per_axis", outcome_grid.points_per_axis()},
        {"outcome_half_width", outcome_grid.half_width()},
    };

    const double weight = outcome_grid.cell_volume();
    const std::size_t n = outcome_grid.size();
    family.elements.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PhasePoint y = outcome_grid.point(i);
        PovmElement e;
        e.label = "het(" + fmt_coord(y[0]) + "," + fmt_coord(y[1]) + ")";
        e.outcome_weight = weight;
        // Coherent projector scaled by 1/(4pi): completeness integrates to 1.
        e.wigner = [y](const PhasePoint& x) {
            return std::exp(-0.5 * (x - y).squaredNorm()) / (two_pi * four_pi);
        };
        family.elements.push_back(std::move(e));
    }
    return family;
}

PovmFamily fock_projector_family(int max_level, bool include_remainder) {
    if (max_level < 0)
        throw std::invalid_argument("fock_projector_family: max_level < 0");

    PovmFamily family;
    family.modes = 1;
    family.complete = include_remainder;
    family.descriptor = {
        {"kind", "fock"},
        {"max_level", max_level},
        {"remainder", include_remainder},
    };
    // Every projector above the vacuum has negative Wigner regions.
    family.positive_wigner = (max_level == 0 && !include_remainder);

    for (int m = 0; m <= max_level; ++m) {
        PovmElement e;
        e.label = "fock(" + std::to_string(m) + ")";
        e.outcome_weight = 1.0;
        e.wigner = [m](const PhasePoint& x) { return fock_wigner(m, x); };
        family.elements.push_back(std::move(e));
    }
    if (include_remainder) {
        PovmElement e;
        e.label = "fock_rest(>" + std::to_string(max_level) + ")";
        e.outcome_weight = 1.0;
        e.wigner = [max_level](const PhasePoint& x) {
            std::vector<double> w(max_level + 1);
            fock_wigner_all_radial(max_level, x.squaredNorm(), w);
            double sum = 0.0;
            for (double v : w) sum += v;
            return 1.0 / four_pi - sum;
        };
        family.elements.push_back(std::move(e));
    }
    return family;
}

double completeness_defect(const PovmFamily& family,
                           std::span<const PhasePoint> probes) {
    const double scale = std::pow(four_pi, family.modes);
    double worst = 0.0;
    for (const PhasePoint& x : probes) {
        double acc = 0.0;
        for (const PovmElement& e : family.elements)
            acc += e.wigner(x) * e.outcome_weight;
        worst = std::max(worst, std::abs(scale * acc - 1.0));
    }
    return worst;
}

}  // namespace wigkit
