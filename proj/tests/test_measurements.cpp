#include <doctest.h>

#include "wigkit/fock.hpp"
#include "wigkit/measurements.hpp"

#include <cmath>

using namespace wigkit;

namespace {

std::vector<PhasePoint> inner_probes(double extent, int per_axis) {
    std::vector<PhasePoint> probes;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            PhasePoint x(2);
            x << -extent + 2.0 * extent * i / (per_axis - 1),
                -extent + 2.0 * extent * j / (per_axis - 1);
            probes.push_back(std::move(x));
        }
    return probes;
}

}  // namespace

TEST_CASE("heterodyne family resolves the identity away from the box edge") {
    PhaseGrid outcomes(2, 10.0, 100);
    const PovmFamily fam = heterodyne_family(outcomes);
    REQUIRE(fam.elements.size() == outcomes.size());
    CHECK(fam.positive_wigner);
    CHECK(fam.complete);
    CHECK(fam.modes == 1);
    CHECK(fam.elements.front().outcome_weight ==
          doctest::Approx(outcomes.cell_volume()));

    const std::vector<PhasePoint> probes = inner_probes(4.0, 5);
    CHECK(completeness_defect(fam, probes) < 1e-4);

    // element Wigner peaks at the outcome with the coherent-projector value
    const PhasePoint origin = PhasePoint::Zero(2);
    double best = 0.0;
    for (const PovmElement& e : fam.elements)
        best = std::max(best, e.wigner(origin));
    CHECK(best == doctest::Approx(1.0 / (8.0 * M_PI * M_PI)).epsilon(1e-6));

    CHECK_THROWS_AS(heterodyne_family(PhaseGrid(1, 4.0, 32)), std::invalid_argument);
    CHECK_THROWS_AS(heterodyne_family(PhaseGrid(4, 4.0, 16)), std::invalid_argument);
}

TEST_CASE("projector family is truncated without its remainder element") {
    const int max_level = 5;
    const PovmFamily fam = fock_projector_family(max_level);
    REQUIRE(fam.elements.size() == static_cast<std::size_t>(max_level + 1));
    CHECK_FALSE(fam.complete);
    CHECK_FALSE(fam.positive_wigner);

    // at the origin the truncated sum telescopes to zero: defect exactly one
    std::vector<PhasePoint> origin{PhasePoint::Zero(2)};
    CHECK(completeness_defect(fam, origin) == doctest::Approx(1.0).epsilon(1e-12));

    // each element is the matching number-state Wigner function
    PhasePoint x(2);
    x << 0.9, -0.4;
    for (int m = 0; m <= max_level; ++m)
        CHECK(fam.elements[m].wigner(x) ==
              doctest::Approx(fock_wigner(m, x)).epsilon(1e-13));

    const PovmFamily vac_only = fock_projector_family(0);
    CHECK(vac_only.positive_wigner);  // the vacuum projector alone stays positive
}

TEST_CASE("remainder element completes the projector family exactly") {
    const PovmFamily fam = fock_projector_family(6, true);
    REQUIRE(fam.elements.size() == 8);
    CHECK(fam.complete);
    CHECK_FALSE(fam.positive_wigner);
    const std::vector<PhasePoint> probes = inner_probes(5.0, 7);
    CHECK(completeness_defect(fam, probes) < 1e-12);

    // remainder = identity Wigner minus the kept levels
    PhasePoint x(2);
    x << 1.3, 0.2;
    double kept = 0.0;
    for (int m = 0; m <= 6; ++m) kept += fock_wigner(m, x);
    CHECK(fam.elements.back().wigner(x) ==
          doctest::Approx(1.0 / (4.0 * M_PI) - kept).epsilon(1e-12));
}
