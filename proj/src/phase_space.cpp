#include "wigkit/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigkit {

void ModeLayout::validate() const {
    if (alice_modes < 1 || bob_modes < 1)
        throw std::invalid_argument("ModeLayout: both parties need >= 1 mode");
}

Eigen::MatrixXd symplectic_form(int modes) {
    if (modes < 1) throw std::invalid_argument("symplectic_form: modes must be >= 1");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

PhaseGrid::PhaseGrid(int dim, double half_width, int points_per_axis,
                     PhasePoint center)
    : dim_(dim), n_(points_per_axis), half_width_(half_width),
      center_(std::move(center)) {
    if (dim_ < 1) throw std::invalid_argument("PhaseGrid: dim must be >= 1");
    if (!(half_width_ > 0.0))
        throw std::invalid_argument("PhaseGrid: half_width must be > 0");
    if (n_ < 16 || n_ % 2 != 0)
        throw std::invalid_argument("PhaseGrid: points per axis must be even and >= 16");
    if (center_.size() == 0) center_ = PhasePoint::Zero(dim_);
    if (center_.size() != dim_)
        throw std::invalid_argument("PhaseGrid: center dimension mismatch");
}

std::size_t PhaseGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(n_);
    return s;
}

double PhaseGrid::cell_volume() const {
    return std::pow(step(), dim_);
}

int PhaseGrid::nearest_index(int axis, double x) const {
    double lo = center_[axis] - half_width_;
    int k = static_cast<int>(std::lround((x - lo) / step()));
    return std::clamp(k, 0, n_ - 1);
}

void PhaseGrid::unravel(std::size_t flat, std::span<int> idx) const {
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n_);
        flat /= n_;
    }
}

std::size_t PhaseGrid::ravel(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a)
        flat = flat * n_ + static_cast<std::size_t>(idx[a]);
    return flat;
}

PhasePoint PhaseGrid::point(std::size_t flat) const {
    PhasePoint x(dim_);
    for (int a = dim_ - 1; a >= 0; --a) {
        x[a] = axis_coord(a, static_cast<int>(flat % n_));
        flat /= n_;
    }
    return x;
}

bool PhaseGrid::same_geometry(const PhaseGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ &&
           half_width_ == other.half_width_ && center_ == other.center_;
}

WignerField::WignerField(PhaseGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)), modes(grid.dim() / 2) {
    if (values.size() != grid.size())
        throw std::invalid_argument("WignerField: value count does not match grid");
}

WignerField::WignerField(PhaseGrid g, double fill)
    : grid(std::move(g)), values(grid.size(), fill), modes(grid.dim() / 2) {}

double WignerField::interpolate(const PhasePoint& x) const {
    const int d = grid.dim();
    const double h = grid.step();
    // Base lattice index and fraction per axis; zero outside the box.
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
        double t = (x[a] - (grid.center()[a] - grid.half_width())) / h;
        if (t < 0.0 || t > grid.points_per_axis() - 1) return 0.0;
        int k = static_cast<int>(std::floor(t));
        k = std::min(k, grid.points_per_axis() - 2);
        base[a] = k;
        frac[a] = t - k;
    }
    double acc = 0.0;
    std::vector<int> idx(d);
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            bool hi = (c >> a) & 1;
            idx[a] = base[a] + (hi ? 1 : 0);
            w *= hi ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) acc += w * values[grid.ravel(idx)];
    }
    return acc;
}

WignerField render(const PhaseGrid& grid,
                   const std::function<double(const PhasePoint&)>& fn) {
    WignerField f(grid);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) f.values[i] = fn(grid.point(i));
    return f;
}

double integrate(const WignerField& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return acc * f.grid.cell_volume();
}

double pairing(const WignerField& a, const WignerField& b) {
    if (!a.grid.same_geometry(b.grid))
        throw std::invalid_argument("pairing: fields live on different grids");
    if (a.grid.dim() % 2 != 0)
        throw std::invalid_argument("pairing: fields must cover whole modes");
    double acc = 0.0;
    const std::size_t n = a.values.size();
    for (std::size_t i = 0; i < n; ++i) acc += a.values[i] * b.values[i];
    const double scale = std::pow(4.0 * M_PI, a.modes);
    return scale * acc * a.grid.cell_volume();
}

WignerField marginal(const WignerField& f, std::span<const int> kept_axes) {
    const int d = f.grid.dim();
    if (kept_axes.empty())
        throw std::invalid_argument("marginal: must keep at least one axis");
    for (std::size_t i = 0; i < kept_axes.size(); ++i) {
        if (kept_axes[i] < 0 || kept_axes[i] >= d)
            throw std::invalid_argument("marginal: axis out of range");
        if (i > 0 && kept_axes[i] <= kept_axes[i - 1])
            throw std::invalid_argument("marginal: axes must be strictly ascending");
    }
    const int kd = static_cast<int>(kept_axes.size());
    if (kd == d) return f;

    PhasePoint sub_center(kd);
    for (int a = 0; a < kd; ++a) sub_center[a] = f.grid.center()[kept_axes[a]];
    PhaseGrid sub(kd, f.grid.half_width(), f.grid.points_per_axis(), sub_center);
    WignerField out(sub, 0.0);

    std::vector<int> idx(d);
    std::vector<int> kidx(kd);
    const std::size_t n = f.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        f.grid.unravel(i, idx);
        for (int a = 0; a < kd; ++a) kidx[a] = idx[kept_axes[a]];
        out.values[sub.ravel(kidx)] += f.values[i];
    }
    const double dropped_cell = std::pow(f.grid.step(), d - kd);
    for (double& v : out.values) v *= dropped_cell;
    return out;
}

FieldMinimum min_value(const WignerField& f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.values.size(); ++i)
        if (f.values[i] < f.values[best]) best = i;
    return {f.values[best], f.grid.point(best)};
}

}  // namespace wigkit
