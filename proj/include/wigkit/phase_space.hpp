#pragma once

// Phase-space containers and quadrature. Conventions used throughout:
// quadrature axes come in (q, p) pairs, one pair per mode, Alice's modes
// first; the vacuum has unit quadrature variance, so the identity operator
// has constant Wigner value 1/(4pi)^m and trace pairings carry a (4pi)^m
// prefactor.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wigkit {

using PhasePoint = Eigen::VectorXd;

// Mode bookkeeping for bipartite states. Alice holds `alice_modes`, Bob the
// rest; phase-space dimension is twice the number of modes.
struct ModeLayout {
    int alice_modes = 1;
    int bob_modes = 1;

    int total_modes() const { return alice_modes + bob_modes; }
    int dim() const { return 2 * total_modes(); }
    int alice_dim() const { return 2 * alice_modes; }
    int bob_dim() const { return 2 * bob_modes; }
    void validate() const;  // throws std::invalid_argument unless both >= 1
};

// Block-diagonal symplectic form, [[0,1],[-1,0]] per mode. Rejects modes < 1.
Eigen::MatrixXd symplectic_form(int modes);

// Uniform cubic lattice used for all quadrature in the library. Points sit at
// center - L + k*(2L/N) per axis, k = 0..N-1, so the center itself is a
// lattice point (k = N/2) and every point is the midpoint of its own cell of
// volume (2L/N)^dim. Sums over the lattice times the cell volume converge
// spectrally for smooth integrands that decay inside the box.
class PhaseGrid {
  public:
    PhaseGrid(int dim, double half_width, int points_per_axis,
              PhasePoint center = PhasePoint());

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    int points_per_axis() const { return n_; }
    const PhasePoint& center() const { return center_; }

    double step() const { return 2.0 * half_width_ / n_; }
    std::size_t size() const;
    double cell_volume() const;

    double axis_coord(int axis, int k) const {
        return center_[axis] - half_width_ + k * step();
    }
    // Index of the lattice point nearest to x along one axis, clamped.
    int nearest_index(int axis, double x) const;

    void unravel(std::size_t flat, std::span<int> idx) const;  // axis 0 slowest
    std::size_t ravel(std::span<const int> idx) const;
    PhasePoint point(std::size_t flat) const;

    bool same_geometry(const PhaseGrid& other) const;

  private:
    int dim_;
    int n_;
    double half_width_;
    PhasePoint center_;
};

// A Wigner function sampled on a PhaseGrid. `modes` is the number of modes
// the grid covers (dim/2); it fixes the (4pi)^modes pairing prefactor.
struct WignerField {
    PhaseGrid grid;
    std::vector<double> values;
    int modes;

    WignerField(PhaseGrid g, std::vector<double> v);
    WignerField(PhaseGrid g, double fill = 0.0);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    // Multilinear interpolation; zero outside the sampled box.
    double interpolate(const PhasePoint& x) const;
};

WignerField render(const PhaseGrid& grid,
                   const std::function<double(const PhasePoint&)>& fn);

// Midpoint-rule integral over the grid box.
double integrate(const WignerField& f);

// Trace pairing (4pi)^modes * integral of the pointwise product. Both fields
// must live on the same grid geometry.
double pairing(const WignerField& a, const WignerField& b);

// Integrates out every axis not listed in `kept_axes` (ascending, no
// duplicates). The result keeps the same per-axis geometry.
WignerField marginal(const WignerField& f, std::span<const int> kept_axes);

struct FieldMinimum {
    double value;
    PhasePoint location;
};

// Smallest sampled value and where it occurs (first hit wins ties).
FieldMinimum min_value(const WignerField& f);

}  // namespace wigkit
