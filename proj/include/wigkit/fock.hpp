#pragma once

// Number-state Wigner functions and photon-number-diagonal two-mode mixtures.

#include "wigkit/phase_space.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace wigkit {

// Laguerre polynomial L_n(u) by the standard upward three-term recurrence.
double laguerre(int n, double u);

// Fills out[0..n] with L_0(u)..L_n(u) in one recurrence pass.
void laguerre_all(int n, double u, std::span<double> out);

// Single-mode number-state Wigner value as a function of u = |x|^2:
// (-1)^n L_n(u) exp(-u/2) / (2pi).
double fock_wigner_radial(int n, double u);
double fock_wigner(int n, const PhasePoint& x);  // x.size() == 2

// Fills out[0..n] with the radial Wigner values for levels 0..n.
void fock_wigner_all_radial(int n, double u, std::span<double> out);

// Residual of (m+1) W_{m+1} = (|x|^2 - 2m - 1) W_m - m W_{m-1}, divided by
// the largest |W| entering the identity. Needs m >= 1.
double fock_recurrence_residual(int m, const PhasePoint& x);

// Smallest level m <= m_max whose Wigner function is negative at x (below
// -1e-12/(2pi), to keep roundoff out). Empirically m <= ceil(|x|^2/2) + 2
// always suffices.
std::optional<int> find_negative_fock(const PhasePoint& x, int m_max);

// Two-mode mixture sum_n p_n |n><n| (x) |n><n| with nonnegative weights whose
// deficit from 1 is the reported truncation tail. Both reduced states are
// the same single-mode mixture.
class FockMixtureState {
  public:
    explicit FockMixtureState(std::vector<double> weights,
                              std::optional<double> thermal_t = std::nullopt);

    int cutoff() const { return static_cast<int>(weights_.size()) - 1; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(int n) const { return weights_[n]; }
    double tail_deficit() const { return tail_deficit_; }
    std::optional<double> thermal_t() const { return thermal_t_; }

    double joint_wigner(const PhasePoint& x_alice,
                        const PhasePoint& x_bob) const;
    double reduced_wigner(const PhasePoint& x) const;  // either party

    // W_n(x) for every level, one recurrence pass.
    Eigen::VectorXd level_values(const PhasePoint& x) const;

    // Marginal quadrature variance sum p_n (2n+1) / sum p_n.
    double marginal_variance() const;

    nlohmann::json to_json() const;
    static FockMixtureState from_json(const nlohmann::json& j);

  private:
    std::vector<double> weights_;
    double tail_deficit_;
    std::optional<double> thermal_t_;
};

// Geometric weights p_n = t^n/(1+t)^(n+1) for mean occupation t > 0,
// truncated at `cutoff` with tail (t/(1+t))^(cutoff+1).
FockMixtureState thermal_weights(double t, int cutoff);

// Smallest cutoff whose geometric tail drops below tail_tol.
int thermal_default_cutoff(double t, double tail_tol = 1e-8);

}  // namespace wigkit
