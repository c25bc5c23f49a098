#include "wigkit/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace wigkit {

namespace {
constexpr double two_pi = 2.0 * M_PI;
// Negativity threshold relative to the vacuum peak 1/(2pi); spacing intended
// to separate genuine sign changes from roundoff.
constexpr double negativity_floor = 1e-12 / two_pi;
}  // namespace

double laguerre(int n, double u) {
    if (n < 0) throw std::invalid_argument("laguerre: order must be >= 0");
    if (n == 0) return 1.0;
    double prev = 1.0;        // L_0
    double cur = 1.0 - u;     // L_1
    for (int k = 1; k < n; ++k) {
        double next = ((2.0 * k + 1.0 - u) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

void laguerre_all(int n, double u, std::span<double> out) {
    if (n < 0) throw std::invalid_argument("laguerre_all: order must be >= 0");
    out[0] = 1.0;
    if (n == 0) return;
    out[1] = 1.0 - u;
    for (int k = 1; k < n; ++k)
        out[k + 1] = ((2.0 * k + 1.0 - u) * out[k] - k * out[k - 1]) / (k + 1.0);
}

double fock_wigner_radial(int n, double u) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * laguerre(n, u) * std::exp(-0.5 * u) / two_pi;
}

double fock_wigner(int n, const PhasePoint& x) {
    if (x.size() != 2)
        throw std::invalid_argument("fock_wigner: single-mode point expected");
    return fock_wigner_radial(n, x.squaredNorm());
}

void fock_wigner_all_radial(int n, double u, std::span<double> out) {
    laguerre_all(n, u, out);
    const double damp = std::exp(-0.5 * u) / two_pi;
    double sign = 1.0;
    for (int k = 0; k <= n; ++k) {
        out[k] *= sign * damp;
        sign = -sign;
    }
}

double fock_recurrence_residual(int m, const PhasePoint& x) {
    if (m < 1) throw std::invalid_argument("fock_recurrence_residual: m >= 1");
    const double u = x.squaredNorm();
    std::vector<double> w(m + 2);
    fock_wigner_all_radial(m + 1, u, w);
    const double lhs = (m + 1.0) * w[m + 1];
    const double rhs = (u - 2.0 * m - 1.0) * w[m] - m * w[m - 1];
    const double scale =
        std::max({std::abs(w[m + 1]), std::abs(w[m]), std::abs(w[m - 1]), 1.0 / two_pi});
    return std::abs(lhs - rhs) / scale;
}

std::optional<int> find_negative_fock(const PhasePoint& x, int m_max) {
    const double u = x.squaredNorm();
    std::vector<double> w(m_max + 1);
    fock_wigner_all_radial(m_max, u, w);
    for (int m = 0; m <= m_max; ++m)
        if (w[m] < -negativity_floor) return m;
    return std::nullopt;
}

FockMixtureState::FockMixtureState(std::vector<double> weights,
                                   std::optional<double> thermal_t)
    : weights_(std::move(weights)), thermal_t_(thermal_t) {
    if (weights_.empty())
        throw std::invalid_argument("FockMixtureState: no weights");
    double sum = 0.0;
    for (double p : weights_) {
        if (p < 0.0)
            throw std::invalid_argument("FockMixtureState: negative weight");
        sum += p;
    }
    if (sum > 1.0 + 1e-12)
        throw std::invalid_argument("FockMixtureState: weights exceed 1");
    if (sum <= 0.0)
        throw std::invalid_argument("FockMixtureState: all weights zero");
    tail_deficit_ = std::max(0.0, 1.0 - sum);
}

Eigen::VectorXd FockMixtureState::level_values(const PhasePoint& x) const {
    const int c = cutoff();
    Eigen::VectorXd w(c + 1);
    fock_wigner_all_radial(c, x.squaredNorm(), std::span<double>(w.data(), c + 1));
    return w;
}

double FockMixtureState::joint_wigner(const PhasePoint& x_alice,
                                      const PhasePoint& x_bob) const {
    const Eigen::VectorXd wa = level_values(x_alice);
    const Eigen::VectorXd wb = level_values(x_bob);
    double acc = 0.0;
    for (int n = 0; n <= cutoff(); ++n) acc += weights_[n] * wa[n] * wb[n];
    return acc;
}

double FockMixtureState::reduced_wigner(const PhasePoint& x) const {
    const Eigen::VectorXd w = level_values(x);
    double acc = 0.0;
    for (int n = 0; n <= cutoff(); ++n) acc += weights_[n] * w[n];
    return acc;
}

double FockMixtureState::marginal_variance() const {
    double sum = 0.0, acc = 0.0;
    for (int n = 0; n <= cutoff(); ++n) {
        sum += weights_[n];
        acc += weights_[n] * (2.0 * n + 1.0);
    }
    return acc / sum;
}

nlohmann::json FockMixtureState::to_json() const {
    nlohmann::json j;
    j["weights"] = weights_;
    j["cutoff"] = cutoff();
    if (thermal_t_) j["t"] = *thermal_t_;
    return j;
}

FockMixtureState FockMixtureState::from_json(const nlohmann::json& j) {
    std::optional<double> t;
    if (j.contains("t")) t = j.at("t").get<double>();
    return FockMixtureState(j.at("weights").get<std::vector<double>>(), t);
}

FockMixtureState thermal_weights(double t, int cutoff) {
    if (!(t > 0.0)) throw std::invalid_argument("thermal_weights: t must be > 0");
    if (cutoff < 0) throw std::invalid_argument("thermal_weights: cutoff < 0");
    std::vector<double> p(cutoff + 1);
    const double ratio = t / (1.0 + t);
    double w = 1.0 / (1.0 + t);
    for (int n = 0; n <= cutoff; ++n) {
        p[n] = w;
        w *= ratio;
    }
    return FockMixtureState(std::move(p), t);
}

int thermal_default_cutoff(double t, double tail_tol) {
    if (!(t > 0.0)) throw std::invalid_argument("thermal_default_cutoff: t must be > 0");
    const double ratio = t / (1.0 + t);
    int c = 0;
    double tail = ratio;  // tail after keeping level 0 is ratio^1
    while (tail >= tail_tol && c < 4096) {
        tail *= ratio;
        ++c;
    }
    return c;
}

}  // namespace wigkit
