#include "wigkit/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace wigkit {

namespace {

constexpr double heisenberg_tol = 1e-9;

void json_matrix(nlohmann::json& j, const char* key, const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    j[key] = std::move(rows);
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw std::invalid_argument("matrix_from_json: empty");
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw std::invalid_argument("matrix_from_json: ragged rows");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace

GaussianDensity::GaussianDensity(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
        throw std::invalid_argument("GaussianDensity: shape mismatch");
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success)
        throw std::invalid_argument("GaussianDensity: covariance not positive definite");
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < cov_.rows(); ++i)
        log_det += 2.0 * std::log(llt_.matrixL()(i, i));
    const double d = static_cast<double>(cov_.rows());
    norm_ = std::exp(-0.5 * (d * std::log(2.0 * M_PI) + log_det));
}

double GaussianDensity::value(const PhasePoint& x) const {
    Eigen::VectorXd d = x - mean_;
    const double q = d.dot(llt_.solve(d));
    return norm_ * std::exp(-0.5 * q);
}

namespace {

// Validates and normalizes the state parameters in place, then builds the
// density evaluator. Used from the constructor initializer list so the
// members are final by the time density_ is made.
GaussianDensity checked_density(const ModeLayout& layout, Eigen::VectorXd& mean,
                                Eigen::MatrixXd& cov) {
    layout.validate();
    const int d = layout.dim();
    if (cov.rows() != d || cov.cols() != d)
        throw std::invalid_argument("GaussianState: covariance shape mismatch");
    if (mean.size() == 0) mean = Eigen::VectorXd::Zero(d);
    if (mean.size() != d)
        throw std::invalid_argument("GaussianState: mean shape mismatch");
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("GaussianState: covariance not symmetric");
    cov = (0.5 * (cov + cov.transpose())).eval();
    if (heisenberg_defect(cov) < -heisenberg_tol)
        throw std::invalid_argument(
            "GaussianState: covariance violates the uncertainty bound");
    return GaussianDensity(mean, cov);
}

}  // namespace

GaussianState::GaussianState(ModeLayout layout, Eigen::VectorXd mean,
                             Eigen::MatrixXd cov)
    : layout_(layout), mean_(std::move(mean)), cov_(std::move(cov)),
      density_(checked_density(layout_, mean_, cov_)) {}

Eigen::MatrixXd GaussianState::alice_cov() const {
    const int a = layout_.alice_dim();
    return cov_.topLeftCorner(a, a);
}

Eigen::MatrixXd GaussianState::bob_cov() const {
    const int b = layout_.bob_dim();
    return cov_.bottomRightCorner(b, b);
}

Eigen::MatrixXd GaussianState::cross_cov() const {
    const int a = layout_.alice_dim();
    const int b = layout_.bob_dim();
    return cov_.topRightCorner(a, b);
}

Eigen::VectorXd GaussianState::alice_mean() const {
    return mean_.head(layout_.alice_dim());
}

Eigen::VectorXd GaussianState::bob_mean() const {
    return mean_.tail(layout_.bob_dim());
}

GaussianDensity GaussianState::alice_marginal() const {
    return GaussianDensity(alice_mean(), alice_cov());
}

GaussianDensity GaussianState::bob_marginal() const {
    return GaussianDensity(bob_mean(), bob_cov());
}

nlohmann::json GaussianState::to_json() const {
    nlohmann::json j;
    std::vector<double> m(mean_.data(), mean_.data() + mean_.size());
    j["mean"] = m;
    json_matrix(j, "covariance", cov_);
    j["n_alice_modes"] = layout_.alice_modes;
    j["n_bob_modes"] = layout_.bob_modes;
    return j;
}

GaussianState GaussianState::from_json(const nlohmann::json& j) {
    ModeLayout layout{j.at("n_alice_modes").get<int>(),
                      j.at("n_bob_modes").get<int>()};
    const auto mvec = j.at("mean").get<std::vector<double>>();
    Eigen::VectorXd mean(mvec.size());
    for (std::size_t i = 0; i < mvec.size(); ++i) mean[i] = mvec[i];
    return GaussianState(layout, std::move(mean),
                         matrix_from_json(j.at("covariance")));
}

double ConditionalGaussian::density(const PhasePoint& x_bob) const {
    return GaussianDensity(mean, cov).value(x_bob);
}

Eigen::MatrixXd schur_complement(const GaussianState& s) {
    const Eigen::MatrixXd va = s.alice_cov();
    const Eigen::MatrixXd vab = s.cross_cov();
    return s.bob_cov() - vab.transpose() * va.llt().solve(vab);
}

ConditionalGaussian conditional_gaussian(const GaussianState& s,
                                         const PhasePoint& x_alice) {
    if (x_alice.size() != s.layout().alice_dim())
        throw std::invalid_argument("conditional_gaussian: point dimension mismatch");
    const Eigen::MatrixXd va = s.alice_cov();
    const Eigen::MatrixXd vab = s.cross_cov();
    ConditionalGaussian out;
    out.cov = s.bob_cov() - vab.transpose() * va.llt().solve(vab);
    out.mean = s.bob_mean() +
               vab.transpose() * va.llt().solve(x_alice - s.alice_mean());
    out.conditioning_point = x_alice;
    return out;
}

double heisenberg_defect(const Eigen::MatrixXd& V) {
    if (V.rows() != V.cols() || V.rows() % 2 != 0 || V.rows() == 0)
        throw std::invalid_argument("heisenberg_defect: need an even-dimensional square matrix");
    const int modes = static_cast<int>(V.rows()) / 2;
    Eigen::MatrixXcd h = V.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * symplectic_form(modes);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return es.eigenvalues()(0);
}

double number_witness_value(const Eigen::MatrixXd& V_c,
                            const Eigen::VectorXd& f) {
    if (V_c.rows() != 2 || V_c.cols() != 2 || f.size() != 2)
        throw std::invalid_argument("number_witness_value: single-mode only");
    const double norm = f.norm();
    if (norm <= 0.0) throw std::invalid_argument("number_witness_value: zero axis");
    const Eigen::Vector2d fu = f / norm;
    const Eigen::Matrix2d omega = symplectic_form(1);
    const Eigen::Matrix2d m = V_c + omega.transpose() * V_c * omega;
    return (fu.dot(m * fu) - 2.0) / 4.0;
}

NumberWitnessOptimum optimal_number_witness(const Eigen::MatrixXd& V_c) {
    if (V_c.rows() != 2 || V_c.cols() != 2)
        throw std::invalid_argument("optimal_number_witness: single-mode only");
    const Eigen::Matrix2d omega = symplectic_form(1);
    Eigen::Matrix2d m = V_c + omega.transpose() * V_c * omega;
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    Eigen::Vector2d f = es.eigenvectors().col(0);  // lowest eigenvalue first
    // Deterministic sign: largest-magnitude component positive.
    const int lead = std::abs(f[0]) >= std::abs(f[1]) ? 0 : 1;
    if (f[lead] < 0.0) f = -f;
    return {f, es.eigenvalues()(0) / 4.0 - 0.5};
}

SteeringVerdict gaussian_steerable(const GaussianState& s) {
    const double defect = heisenberg_defect(schur_complement(s));
    return {defect < -heisenberg_tol, defect};
}

GaussianState make_tmsv(double r) {
    const double c = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    Eigen::MatrixXd v(4, 4);
    v << c, 0, sh, 0,
         0, c, 0, -sh,
         sh, 0, c, 0,
         0, -sh, 0, c;
    return GaussianState({1, 1}, Eigen::VectorXd::Zero(4), v);
}

GaussianState make_product(const Eigen::MatrixXd& V_alice,
                           const Eigen::MatrixXd& V_bob,
                           const Eigen::VectorXd& mean_alice,
                           const Eigen::VectorXd& mean_bob) {
    if (V_alice.rows() % 2 != 0 || V_bob.rows() % 2 != 0 ||
        V_alice.rows() != V_alice.cols() || V_bob.rows() != V_bob.cols())
        throw std::invalid_argument("make_product: covariance blocks must be even square");
    ModeLayout layout{static_cast<int>(V_alice.rows()) / 2,
                      static_cast<int>(V_bob.rows()) / 2};
    const int d = layout.dim();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
    v.topLeftCorner(V_alice.rows(), V_alice.cols()) = V_alice;
    v.bottomRightCorner(V_bob.rows(), V_bob.cols()) = V_bob;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    if (mean_alice.size() != 0) mean.head(V_alice.rows()) = mean_alice;
    if (mean_bob.size() != 0) mean.tail(V_bob.rows()) = mean_bob;
    return GaussianState(layout, std::move(mean), std::move(v));
}

GaussianState attenuate(const GaussianState& s, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("attenuate: eta must lie in [0, 1]");
    const int a = s.layout().alice_dim();
    const int b = s.layout().bob_dim();
    Eigen::MatrixXd v = s.cov();
    const double root = std::sqrt(eta);
    v.bottomRightCorner(b, b) =
        eta * s.bob_cov() + (1.0 - eta) * Eigen::MatrixXd::Identity(b, b);
    v.topRightCorner(a, b) = root * s.cross_cov();
    v.bottomLeftCorner(b, a) = v.topRightCorner(a, b).transpose();
    Eigen::VectorXd mean = s.mean();
    mean.tail(b) *= root;
    return GaussianState(s.layout(), std::move(mean), std::move(v));
}

}  // namespace wigkit
