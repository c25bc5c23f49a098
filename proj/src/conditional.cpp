#include "wigkit/conditional.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

namespace wigkit {

namespace {

constexpr double four_pi = 4.0 * M_PI;
constexpr double herald_floor = 1e-10;

Eigen::Vector2d conj2(const Eigen::Vector2d& f) { return {-f[1], f[0]}; }

int even_points(int n) {
    n = std::max(n, 16);
    return n % 2 ? n + 1 : n;
}

std::string point_str(const PhasePoint& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

struct FieldMoments {
    double mass;  // integral of the field
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

FieldMoments field_moments(const WignerField& f) {
    const PhaseGrid& g = f.grid;
    const int d = g.dim();
    double mass = 0.0;
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, d);
    std::vector<int> idx(d);
    Eigen::VectorXd x(d);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < d; ++a) x[a] = g.axis_coord(a, idx[a]);
        const double w = f.values[i];
        mass += w;
        m1 += w * x;
        m2.noalias() += w * x * x.transpose();
    }
    FieldMoments out;
    if (std::abs(mass) < 1e-300) {
        out.mass = 0.0;
        out.mean = g.center();
        out.cov = Eigen::MatrixXd::Identity(d, d);
        return out;
    }
    out.mean = m1 / mass;
    out.cov = m2 / mass - out.mean * out.mean.transpose();
    out.mass = mass * g.cell_volume();
    return out;
}

double witness_radius(const WitnessOperator& w) {
    if (const auto* p = w.fock())
        return std::sqrt(2.0 * (2 * p->level + 1)) + 4.0;
    return 0.0;  // polynomial witness, no intrinsic support scale
}

Eigen::Vector2d witness_center(const WitnessOperator& w) {
    if (const auto* p = w.fock()) return p->displacement;
    return w.number()->displacement;
}

// Pairing quadrature with an N vs N/2 refinement estimate. The box is sized
// from the state bulk and the witness support unless the caller fixed it.
WitnessExpectation quad_expectation(
    const std::function<double(const PhasePoint&)>& state_wigner,
    const Eigen::Vector2d& state_center, double state_radius,
    const WitnessOperator& wit, const QuadSpec& quad) {
    const Eigen::Vector2d wc = witness_center(wit);
    const Eigen::Vector2d center = 0.5 * (state_center + wc);
    double hw = quad.half_width;
    if (hw <= 0.0)
        hw = 0.5 * (state_center - wc).norm() + state_radius + witness_radius(wit);
    const int n = even_points(std::max(quad.points, 32));
    double v[2];
    int t = 0;
    for (int pts : {n, n / 2}) {
        PhaseGrid g(2, hw, even_points(pts), center);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const PhasePoint x = g.point(i);
            acc += state_wigner(x) * wit.wigner(x);
        }
        v[t++] = four_pi * acc * g.cell_volume();
    }
    return {v[0], 10.0 * std::abs(v[0] - v[1]), false};
}

// Lattice pairing against a stored field; error estimated from a stride-2
// subsample (a coarser, shifted rule).
WitnessExpectation field_expectation(const WignerField& f,
                                     const WitnessOperator& wit) {
    const PhaseGrid& g = f.grid;
    const int d = g.dim();
    std::vector<int> idx(d);
    double full = 0.0, sub = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unravel(i, idx);
        const double t = f.values[i] * wit.wigner(g.point(i));
        full += t;
        bool even = true;
        for (int a = 0; a < d; ++a) even = even && idx[a] % 2 == 0;
        if (even) sub += t;
    }
    const double v = four_pi * full * g.cell_volume();
    const double vs = four_pi * sub * g.cell_volume() * std::pow(2.0, d);
    return {v, 10.0 * std::abs(v - vs), false};
}

}  // namespace

// ---------------------------------------------------------------------------
// JointState

JointState::JointState(GaussianState s)
    : state_(std::move(s)), layout_(std::get<GaussianState>(state_).layout()) {
    alice_peak_ = std::get<GaussianState>(state_).alice_marginal().peak();
}

JointState::JointState(FockMixtureState s)
    : state_(std::move(s)), layout_{1, 1} {
    // The reduced state is radial; scan u = |x|^2 for the extreme value.
    const auto& m = std::get<FockMixtureState>(state_);
    const int cut = m.cutoff();
    std::vector<double> w(cut + 1);
    const double u_max = 2.0 * (2 * cut + 1) + 40.0;
    const int samples = 4096;
    double peak = 0.0;
    for (int k = 0; k <= samples; ++k) {
        fock_wigner_all_radial(cut, u_max * k / samples, w);
        double acc = 0.0;
        for (int n = 0; n <= cut; ++n) acc += m.weight(n) * w[n];
        peak = std::max(peak, std::abs(acc));
    }
    alice_peak_ = peak;
}

JointState::JointState(WignerField joint, ModeLayout layout)
    : state_(std::move(joint)), layout_(layout) {
    layout_.validate();
    const WignerField& f = std::get<WignerField>(state_);
    if (f.grid.dim() != layout_.dim())
        throw std::invalid_argument("JointState: grid dimension does not match layout");
    std::vector<int> axes(layout_.dim());
    std::iota(axes.begin(), axes.end(), 0);
    alice_marginal_field_ =
        marginal(f, std::span<const int>(axes.data(), layout_.alice_dim()));
    bob_marginal_field_ = marginal(
        f, std::span<const int>(axes.data() + layout_.alice_dim(), layout_.bob_dim()));
    double peak = 0.0;
    for (double v : alice_marginal_field_->values) peak = std::max(peak, std::abs(v));
    alice_peak_ = peak;
}

double JointState::wigner(const PhasePoint& x) const {
    if (x.size() != layout_.dim())
        throw std::invalid_argument("JointState::wigner: bad point dimension");
    if (const auto* g = std::get_if<GaussianState>(&state_)) return g->wigner(x);
    if (const auto* m = std::get_if<FockMixtureState>(&state_))
        return m->joint_wigner(x.head(2), x.tail(2));
    return std::get<WignerField>(state_).interpolate(x);
}

double JointState::alice_marginal(const PhasePoint& x_alice) const {
    if (x_alice.size() != layout_.alice_dim())
        throw std::invalid_argument("JointState::alice_marginal: bad point dimension");
    if (const auto* g = std::get_if<GaussianState>(&state_))
        return g->alice_marginal().value(x_alice);
    if (const auto* m = std::get_if<FockMixtureState>(&state_))
        return m->reduced_wigner(x_alice);
    return alice_marginal_field_->interpolate(x_alice);
}

double JointState::bob_marginal(const PhasePoint& x_bob) const {
    if (x_bob.size() != layout_.bob_dim())
        throw std::invalid_argument("JointState::bob_marginal: bad point dimension");
    if (const auto* g = std::get_if<GaussianState>(&state_))
        return g->bob_marginal().value(x_bob);
    if (const auto* m = std::get_if<FockMixtureState>(&state_))
        return m->reduced_wigner(x_bob);
    return bob_marginal_field_->interpolate(x_bob);
}

const GaussianState* JointState::gaussian() const {
    return std::get_if<GaussianState>(&state_);
}
const FockMixtureState* JointState::fock_mixture() const {
    return std::get_if<FockMixtureState>(&state_);
}
const WignerField* JointState::grid() const {
    return std::get_if<WignerField>(&state_);
}
const WignerField* JointState::grid_alice_marginal() const {
    return alice_marginal_field_ ? &*alice_marginal_field_ : nullptr;
}
const WignerField* JointState::grid_bob_marginal() const {
    return bob_marginal_field_ ? &*bob_marginal_field_ : nullptr;
}

double JointState::alice_sigma() const {
    if (const auto* g = std::get_if<GaussianState>(&state_))
        return std::sqrt(g->alice_cov().diagonal().maxCoeff());
    if (const auto* m = std::get_if<FockMixtureState>(&state_))
        return std::sqrt(m->marginal_variance());
    const FieldMoments fm = field_moments(*alice_marginal_field_);
    return std::sqrt(std::max(fm.cov.diagonal().maxCoeff(), 1e-12));
}

double JointState::bob_sigma() const {
    if (const auto* g = std::get_if<GaussianState>(&state_))
        return std::sqrt(g->bob_cov().diagonal().maxCoeff());
    if (const auto* m = std::get_if<FockMixtureState>(&state_))
        return std::sqrt(m->marginal_variance());
    const FieldMoments fm = field_moments(*bob_marginal_field_);
    return std::sqrt(std::max(fm.cov.diagonal().maxCoeff(), 1e-12));
}

PhaseGrid JointState::default_alice_grid(int points_per_axis) const {
    const int n = even_points(points_per_axis);
    if (std::holds_alternative<WignerField>(state_)) {
        const PhaseGrid& mg = alice_marginal_field_->grid;
        return PhaseGrid(mg.dim(), mg.half_width(), n, mg.center());
    }
    PhasePoint center = PhasePoint::Zero(layout_.alice_dim());
    if (const auto* g = std::get_if<GaussianState>(&state_)) center = g->alice_mean();
    return PhaseGrid(layout_.alice_dim(), 6.0 * alice_sigma(), n, center);
}

PhaseGrid JointState::default_bob_grid(int points_per_axis) const {
    const int n = even_points(points_per_axis);
    if (std::holds_alternative<WignerField>(state_)) {
        const PhaseGrid& mg = bob_marginal_field_->grid;
        return PhaseGrid(mg.dim(), mg.half_width(), n, mg.center());
    }
    PhasePoint center = PhasePoint::Zero(layout_.bob_dim());
    if (const auto* g = std::get_if<GaussianState>(&state_)) center = g->bob_mean();
    return PhaseGrid(layout_.bob_dim(), 6.0 * bob_sigma(), n, center);
}

// ---------------------------------------------------------------------------
// WitnessOperator

WitnessOperator WitnessOperator::fock_projector(int level,
                                                const Eigen::Vector2d& displacement) {
    if (level < 0) throw std::invalid_argument("fock_projector: level < 0");
    WitnessOperator w;
    w.op_ = FockProjector{level, displacement};
    return w;
}

WitnessOperator WitnessOperator::displaced_number(const Eigen::Vector2d& axis,
                                                  const Eigen::Vector2d& displacement) {
    const double n = axis.norm();
    if (n < 1e-12) throw std::invalid_argument("displaced_number: zero axis");
    WitnessOperator w;
    w.op_ = DisplacedNumber{axis / n, displacement};
    return w;
}

double WitnessOperator::wigner(const PhasePoint& x_bob) const {
    if (x_bob.size() != 2)
        throw std::invalid_argument("WitnessOperator::wigner: single-mode points only");
    const Eigen::Vector2d x(x_bob[0], x_bob[1]);
    if (const auto* p = std::get_if<FockProjector>(&op_))
        return fock_wigner_radial(p->level, (x - p->displacement).squaredNorm());
    const auto& n = std::get<DisplacedNumber>(op_);
    const Eigen::Vector2d y = x - n.displacement;
    const double a = n.axis.dot(y);
    const double b = conj2(n.axis).dot(y);
    return (a * a + b * b - 2.0) / (16.0 * M_PI);
}

const WitnessOperator::FockProjector* WitnessOperator::fock() const {
    return std::get_if<FockProjector>(&op_);
}
const WitnessOperator::DisplacedNumber* WitnessOperator::number() const {
    return std::get_if<DisplacedNumber>(&op_);
}

std::string WitnessOperator::describe() const {
    char buf[96];
    if (const auto* p = std::get_if<FockProjector>(&op_)) {
        if (p->displacement.norm() < 1e-12)
            std::snprintf(buf, sizeof buf, "fock(%d)", p->level);
        else
            std::snprintf(buf, sizeof buf, "fock(%d)@(%.4g %.4g)", p->level,
                          p->displacement[0], p->displacement[1]);
        return buf;
    }
    const auto& n = std::get<DisplacedNumber>(op_);
    std::snprintf(buf, sizeof buf, "number(%.4g %.4g)@(%.4g %.4g)", n.axis[0],
                  n.axis[1], n.displacement[0], n.displacement[1]);
    return buf;
}

nlohmann::json WitnessOperator::descriptor() const {
    if (const auto* p = std::get_if<FockProjector>(&op_))
        return {{"kind", "fock_projector"},
                {"level", p->level},
                {"displacement", {p->displacement[0], p->displacement[1]}}};
    const auto& n = std::get<DisplacedNumber>(op_);
    return {{"kind", "displaced_number"},
            {"axis", {n.axis[0], n.axis[1]}},
            {"displacement", {n.displacement[0], n.displacement[1]}}};
}

// ---------------------------------------------------------------------------
// ConditionalWigner

ConditionalWigner::ConditionalWigner(ConditionalGaussian g)
    : rep_(std::move(g)), at_(std::get<ConditionalGaussian>(rep_).conditioning_point) {}

ConditionalWigner::ConditionalWigner(Eigen::VectorXd level_weights, PhasePoint at)
    : rep_(std::move(level_weights)), at_(std::move(at)) {
    if (std::get<Eigen::VectorXd>(rep_).size() == 0)
        throw std::invalid_argument("ConditionalWigner: empty level mixture");
}

ConditionalWigner::ConditionalWigner(WignerField f, PhasePoint at)
    : rep_(std::move(f)), at_(std::move(at)) {}

int ConditionalWigner::modes() const {
    if (const auto* g = std::get_if<ConditionalGaussian>(&rep_))
        return static_cast<int>(g->cov.rows()) / 2;
    if (std::get_if<Eigen::VectorXd>(&rep_)) return 1;
    return std::get<WignerField>(rep_).modes;
}

double ConditionalWigner::value(const PhasePoint& x_bob) const {
    if (const auto* g = std::get_if<ConditionalGaussian>(&rep_))
        return g->density(x_bob);
    if (const auto* c = std::get_if<Eigen::VectorXd>(&rep_)) {
        if (x_bob.size() != 2)
            throw std::invalid_argument("ConditionalWigner::value: bad point dimension");
        std::vector<double> w(c->size());
        fock_wigner_all_radial(static_cast<int>(c->size()) - 1, x_bob.squaredNorm(), w);
        double acc = 0.0;
        for (int n = 0; n < c->size(); ++n) acc += (*c)[n] * w[n];
        return acc;
    }
    return std::get<WignerField>(rep_).interpolate(x_bob);
}

Eigen::VectorXd ConditionalWigner::mean() const {
    if (const auto* g = std::get_if<ConditionalGaussian>(&rep_)) return g->mean;
    if (std::get_if<Eigen::VectorXd>(&rep_)) return Eigen::VectorXd::Zero(2);
    return field_moments(std::get<WignerField>(rep_)).mean;
}

Eigen::MatrixXd ConditionalWigner::second_moments() const {
    if (const auto* g = std::get_if<ConditionalGaussian>(&rep_)) return g->cov;
    if (const auto* c = std::get_if<Eigen::VectorXd>(&rep_)) {
        double v = 0.0;
        for (int n = 0; n < c->size(); ++n) v += (*c)[n] * (2.0 * n + 1.0);
        return v * Eigen::MatrixXd::Identity(2, 2);
    }
    return field_moments(std::get<WignerField>(rep_)).cov;
}

WignerField ConditionalWigner::render(const PhaseGrid& grid) const {
    if (const auto* g = std::get_if<ConditionalGaussian>(&rep_)) {
        GaussianDensity dens(g->mean, g->cov);
        return wigkit::render(grid,
                              [&dens](const PhasePoint& x) { return dens.value(x); });
    }
    return wigkit::render(grid, [this](const PhasePoint& x) { return value(x); });
}

const ConditionalGaussian* ConditionalWigner::as_gaussian() const {
    return std::get_if<ConditionalGaussian>(&rep_);
}
const Eigen::VectorXd* ConditionalWigner::level_weights() const {
    return std::get_if<Eigen::VectorXd>(&rep_);
}
const WignerField* ConditionalWigner::as_field() const {
    return std::get_if<WignerField>(&rep_);
}

// ---------------------------------------------------------------------------
// Conditioning

ConditionalWigner conditional_wigner(const JointState& joint,
                                     const PhasePoint& x_alice) {
    if (x_alice.size() != joint.layout().alice_dim())
        throw std::invalid_argument("conditional_wigner: bad conditioning point dimension");

    if (const GaussianState* g = joint.gaussian())
        return ConditionalWigner(conditional_gaussian(*g, x_alice));

    if (const FockMixtureState* m = joint.fock_mixture()) {
        const Eigen::VectorXd levels = m->level_values(x_alice);
        Eigen::VectorXd c(levels.size());
        double w_a = 0.0;
        for (int n = 0; n < levels.size(); ++n) {
            c[n] = m->weight(n) * levels[n];
            w_a += c[n];
        }
        if (std::abs(w_a) < conditioning_floor_rel * joint.alice_peak())
            throw ConditioningError("conditional_wigner: marginal below floor at " +
                                    point_str(x_alice));
        c /= w_a;
        return ConditionalWigner(std::move(c), x_alice);
    }

    const WignerField& f = *joint.grid();
    const int ad = joint.layout().alice_dim();
    const int bd = joint.layout().bob_dim();
    std::vector<int> idx(ad + bd);
    PhasePoint snapped(ad);
    for (int a = 0; a < ad; ++a) {
        idx[a] = f.grid.nearest_index(a, x_alice[a]);
        snapped[a] = f.grid.axis_coord(a, idx[a]);
    }
    const WignerField& am = *joint.grid_alice_marginal();
    const double w_a = am.values[am.grid.ravel(std::span<const int>(idx.data(), ad))];
    if (std::abs(w_a) < conditioning_floor_rel * joint.alice_peak())
        throw ConditioningError("conditional_wigner: marginal below floor at " +
                                point_str(snapped));
    PhaseGrid bob(bd, f.grid.half_width(), f.grid.points_per_axis(),
                  f.grid.center().tail(bd));
    WignerField slice(bob);
    std::vector<int> bidx(bd);
    for (std::size_t k = 0; k < bob.size(); ++k) {
        bob.unravel(k, bidx);
        for (int a = 0; a < bd; ++a) idx[ad + a] = bidx[a];
        slice.values[k] = f.values[f.grid.ravel(idx)] / w_a;
    }
    return ConditionalWigner(std::move(slice), std::move(snapped));
}

// ---------------------------------------------------------------------------
// Witness expectations

WitnessExpectation witness_expectation(const ConditionalWigner& cond,
                                       const WitnessOperator& witness,
                                       const QuadSpec& quad) {
    if (cond.modes() != 1)
        throw std::invalid_argument("witness_expectation: single-mode conditionals only");

    if (const auto* num = witness.number()) {
        if (cond.as_field() == nullptr) {
            // Exact via first and second moments: the witness Wigner function
            // is the quadratic ((f.y)^2 + (f'.y)^2 - 2)/16pi.
            const Eigen::Vector2d f = num->axis;
            const Eigen::Vector2d fc = conj2(f);
            const Eigen::VectorXd mu = cond.mean();
            const Eigen::MatrixXd S = cond.second_moments();
            const Eigen::Vector2d d(mu[0] - num->displacement[0],
                                    mu[1] - num->displacement[1]);
            const double fd = f.dot(d), fcd = fc.dot(d);
            const double v = 0.25 * (f.dot(S * f) + fc.dot(S * fc) + fd * fd +
                                     fcd * fcd - 2.0);
            return {v, 0.0, true};
        }
        return field_expectation(*cond.as_field(), witness);
    }

    const auto* proj = witness.fock();
    if (const Eigen::VectorXd* c = cond.level_weights()) {
        if (proj->displacement.norm() < 1e-12) {
            // Orthogonality: the projector picks its own level weight.
            const double v = proj->level < c->size() ? (*c)[proj->level] : 0.0;
            return {v, 0.0, true};
        }
        const int cut = static_cast<int>(c->size()) - 1;
        const double radius = std::sqrt(2.0 * (2 * cut + 1)) + 6.0;
        return quad_expectation([&cond](const PhasePoint& x) { return cond.value(x); },
                                Eigen::Vector2d::Zero(), radius, witness, quad);
    }
    if (const ConditionalGaussian* g = cond.as_gaussian()) {
        GaussianDensity dens(g->mean, g->cov);
        const double radius = 6.0 * std::sqrt(g->cov.diagonal().maxCoeff()) + 1.0;
        return quad_expectation([&dens](const PhasePoint& x) { return dens.value(x); },
                                Eigen::Vector2d(g->mean[0], g->mean[1]), radius,
                                witness, quad);
    }
    return field_expectation(*cond.as_field(), witness);
}

double conditional_quasi_probability(const JointState& joint,
                                     const WitnessOperator& witness,
                                     const PhasePoint& x_alice,
                                     const QuadSpec& quad) {
    return witness_expectation(conditional_wigner(joint, x_alice), witness, quad).value;
}

// ---------------------------------------------------------------------------
// Physicality certificates

nlohmann::json PhysicalityCertificate::to_json() const {
    nlohmann::json pt = nlohmann::json::array();
    for (int i = 0; i < conditioning_point.size(); ++i) pt.push_back(conditioning_point[i]);
    return {{"conditioning_point", pt},
            {"witness", witness.descriptor()},
            {"value", value},
            {"error_bound", error_bound}};
}

std::optional<PhysicalityCertificate> certify_unphysical(
    const JointState& joint, const PhasePoint& x_alice,
    const WitnessFamilyConfig& config) {
    const ConditionalWigner cond = conditional_wigner(joint, x_alice);
    std::optional<PhysicalityCertificate> best;

    auto consider = [&](const WitnessOperator& w) {
        const WitnessExpectation e = witness_expectation(cond, w, config.quad);
        if (e.value + e.error_bound < -config.violation_floor &&
            (!best || e.value < best->value))
            best = PhysicalityCertificate{cond.conditioning_point(), w, e.value,
                                          e.error_bound};
    };

    const Eigen::VectorXd mu = cond.mean();
    if (config.number_witnesses) {
        const Eigen::MatrixXd S = cond.second_moments();
        if (S.rows() == 2) {
            const Eigen::MatrixXd Om = symplectic_form(1);
            Eigen::MatrixXd N = S + Om.transpose() * S * Om;
            N = 0.5 * (N + N.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
            Eigen::Vector2d axis = es.eigenvectors().col(0);
            const int big = std::abs(axis[0]) >= std::abs(axis[1]) ? 0 : 1;
            if (axis[big] < 0.0) axis = -axis;
            consider(WitnessOperator::displaced_number(axis,
                                                       Eigen::Vector2d(mu[0], mu[1])));
        }
    }
    if (config.max_fock >= 0) {
        const bool displaced = config.displaced_fock && mu.norm() > 1e-9;
        for (int m = 0; m <= config.max_fock; ++m) {
            consider(WitnessOperator::fock_projector(m));
            if (displaced)
                consider(WitnessOperator::fock_projector(m, Eigen::Vector2d(mu[0], mu[1])));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Heralding

HeraldedState remote_conditioned_state(const JointState& joint,
                                       const WitnessOperator& herald,
                                       const PhaseGrid& alice_grid,
                                       const QuadSpec& quad) {
    if (alice_grid.dim() != joint.layout().alice_dim())
        throw std::invalid_argument("remote_conditioned_state: alice grid dimension mismatch");
    if (joint.layout().bob_modes != 1)
        throw std::invalid_argument("remote_conditioned_state: heralds act on one Bob mode");

    const std::size_t na = alice_grid.size();
    std::vector<double> numer(na, 0.0);

    if (const FockMixtureState* mix = joint.fock_mixture()) {
        const int cut = mix->cutoff();
        Eigen::VectorXd pexp = Eigen::VectorXd::Zero(cut + 1);
        const auto* proj = herald.fock();
        if (proj && proj->displacement.norm() < 1e-12) {
            if (proj->level <= cut) pexp[proj->level] = 1.0;
        } else {
            for (int n = 0; n <= cut; ++n) {
                Eigen::VectorXd unit = Eigen::VectorXd::Zero(n + 1);
                unit[n] = 1.0;
                pexp[n] = witness_expectation(
                              ConditionalWigner(std::move(unit), PhasePoint::Zero(2)),
                              herald, quad)
                              .value;
            }
        }
        Eigen::VectorXd coeff(cut + 1);
        for (int n = 0; n <= cut; ++n) coeff[n] = mix->weight(n) * pexp[n];
        std::vector<double> w(cut + 1);
        for (std::size_t i = 0; i < na; ++i) {
            fock_wigner_all_radial(cut, alice_grid.point(i).squaredNorm(), w);
            double acc = 0.0;
            for (int n = 0; n <= cut; ++n) acc += coeff[n] * w[n];
            numer[i] = acc;
        }
    } else if (const GaussianState* gs = joint.gaussian()) {
        const GaussianDensity wa = gs->alice_marginal();
        const Eigen::MatrixXd Sc = schur_complement(*gs);
        const double det = Sc.determinant();
        if (det <= 0.0)
            throw std::invalid_argument("remote_conditioned_state: degenerate conditional covariance");
        const Eigen::MatrixXd Sinv = Sc.inverse();
        const Eigen::MatrixXd K =
            gs->cross_cov().transpose() * gs->alice_cov().inverse();
        const Eigen::VectorXd xiA = gs->alice_mean();
        const Eigen::VectorXd xiB = gs->bob_mean();
        const double norm_c = 1.0 / (2.0 * M_PI * std::sqrt(det));

        // Bob box: marginal bulk, herald support, plus the sweep of the
        // conditional mean over the Alice box corners.
        double shift = 0.0;
        const int ad = joint.layout().alice_dim();
        for (std::size_t c = 0; c < (std::size_t{1} << ad); ++c) {
            Eigen::VectorXd corner(ad);
            for (int a = 0; a < ad; ++a)
                corner[a] = alice_grid.center()[a] +
                            (((c >> a) & 1) ? 1.0 : -1.0) * alice_grid.half_width();
            shift = std::max(shift, (K * (corner - xiA)).norm());
        }
        const double hw = quad.half_width > 0.0
                              ? quad.half_width
                              : 6.0 * joint.bob_sigma() + witness_radius(herald) +
                                    shift + 2.0;
        PhaseGrid bob(2, hw, even_points(quad.points), xiB);
        const std::size_t nb = bob.size();
        std::vector<double> pv(nb), bq(nb), bp(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            const PhasePoint y = bob.point(j);
            pv[j] = herald.wigner(y);
            bq[j] = y[0];
            bp[j] = y[1];
        }
        const double s00 = Sinv(0, 0), s01 = Sinv(0, 1), s11 = Sinv(1, 1);
        const double scale = four_pi * norm_c * bob.cell_volume();
        const double peak_a = wa.peak();
        for (std::size_t i = 0; i < na; ++i) {
            const PhasePoint a = alice_grid.point(i);
            const double w_a = wa.value(a);
            if (std::abs(w_a) < 1e-18 * peak_a) continue;
            const Eigen::VectorXd mu = xiB + K * (a - xiA);
            const double mq = mu[0], mp = mu[1];
            double acc = 0.0;
            for (std::size_t j = 0; j < nb; ++j) {
                const double dq = bq[j] - mq;
                const double dp = bp[j] - mp;
                acc += pv[j] *
                       std::exp(-0.5 * (s00 * dq * dq + 2.0 * s01 * dq * dp +
                                        s11 * dp * dp));
            }
            numer[i] = w_a * scale * acc;
        }
    } else {
        const WignerField& f = *joint.grid();
        const int ad = joint.layout().alice_dim();
        const int bd = joint.layout().bob_dim();
        const double hw = quad.half_width > 0.0 ? quad.half_width : f.grid.half_width();
        PhaseGrid bob(bd, hw, std::min(even_points(quad.points), 64),
                      f.grid.center().tail(bd));
        std::vector<double> pv(bob.size());
        for (std::size_t j = 0; j < bob.size(); ++j) pv[j] = herald.wigner(bob.point(j));
        const double scale = four_pi * bob.cell_volume();
        PhasePoint xfull(ad + bd);
        for (std::size_t i = 0; i < na; ++i) {
            xfull.head(ad) = alice_grid.point(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < bob.size(); ++j) {
                xfull.tail(bd) = bob.point(j);
                acc += pv[j] * f.interpolate(xfull);
            }
            numer[i] = acc * scale;
        }
    }

    double success = 0.0;
    for (double v : numer) success += v;
    success *= alice_grid.cell_volume();
    if (!(success >= herald_floor))
        throw HeraldError("remote_conditioned_state: outcome probability " +
                          std::to_string(success) + " below the 1e-10 floor");
    for (double& v : numer) v /= success;
    return {WignerField(alice_grid, std::move(numer)), success};
}

// ---------------------------------------------------------------------------
// Negativity summary

nlohmann::json NegativitySummary::to_json() const {
    nlohmann::json loc = nlohmann::json::array();
    for (int i = 0; i < location.size(); ++i) loc.push_back(location[i]);
    return {{"min_value", min_value},
            {"location", loc},
            {"negative_volume", negative_volume}};
}

NegativitySummary negativity_summary(const WignerField& f) {
    const FieldMinimum m = min_value(f);
    double neg = 0.0;
    for (double v : f.values)
        if (v < 0.0) neg -= v;
    return {m.value, m.location, neg * f.grid.cell_volume()};
}

}  // namespace wigkit
