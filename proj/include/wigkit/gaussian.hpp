#pragma once

// Gaussian states, Schur-complement conditioning, and the displaced
// number-operator witness for conditional covariances.

#include "wigkit/phase_space.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

namespace wigkit {

// Normalized multivariate normal evaluator (factorization cached).
class GaussianDensity {
  public:
    GaussianDensity(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    double value(const PhasePoint& x) const;
    double peak() const { return norm_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

  private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double norm_;
};

// Bipartite Gaussian state: normalized Gaussian Wigner function with mean xi
// and covariance V. Construction enforces symmetry, positive definiteness,
// and the uncertainty constraint min eig(V + i Omega) >= -1e-9.
class GaussianState {
  public:
    GaussianState(ModeLayout layout, Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const ModeLayout& layout() const { return layout_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    Eigen::MatrixXd alice_cov() const;  // V_A
    Eigen::MatrixXd bob_cov() const;    // V_B
    Eigen::MatrixXd cross_cov() const;  // V_AB
    Eigen::VectorXd alice_mean() const;
    Eigen::VectorXd bob_mean() const;

    double wigner(const PhasePoint& x) const { return density_.value(x); }
    GaussianDensity alice_marginal() const;
    GaussianDensity bob_marginal() const;

    nlohmann::json to_json() const;
    static GaussianState from_json(const nlohmann::json& j);

  private:
    ModeLayout layout_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    GaussianDensity density_;
};

// Conditional Wigner function of a Gaussian state given Alice's phase-space
// point: Gaussian with x_A-independent covariance (Schur complement) and mean
// xi_B + V_BA V_A^{-1} (x_A - xi_A). Not required to be a physical state.
struct ConditionalGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    PhasePoint conditioning_point;

    double density(const PhasePoint& x_bob) const;
};

Eigen::MatrixXd schur_complement(const GaussianState& s);
ConditionalGaussian conditional_gaussian(const GaussianState& s,
                                         const PhasePoint& x_alice);

// Smallest eigenvalue of the Hermitian matrix V + i Omega. Negative values
// mean V is not a legal covariance matrix.
double heisenberg_defect(const Eigen::MatrixXd& V);

// Expectation of the number operator along unit axis f, displaced to the
// origin, against a Gaussian of covariance V_c:
//   (f^T [V_c + Omega^T V_c Omega] f - 2) / 4.
// Negative values certify that V_c violates the uncertainty bound.
double number_witness_value(const Eigen::MatrixXd& V_c,
                            const Eigen::VectorXd& f);

struct NumberWitnessOptimum {
    Eigen::VectorXd axis;  // unit eigenvector, deterministic sign
    double value;
};

// Minimizes number_witness_value over unit axes: lowest eigenpair of
// V_c + Omega^T V_c Omega, value lambda_min/4 - 1/2.
NumberWitnessOptimum optimal_number_witness(const Eigen::MatrixXd& V_c);

struct SteeringVerdict {
    bool steerable;
    double defect;  // heisenberg_defect of the Schur complement
};

// Alice can steer Bob with Gaussian measurements iff the conditional
// covariance breaks the uncertainty bound (defect < -1e-9).
SteeringVerdict gaussian_steerable(const GaussianState& s);

// Two-mode squeezed vacuum: V_A = V_B = cosh(2r) I, V_AB = sinh(2r) diag(1,-1).
GaussianState make_tmsv(double r);

// Product state from per-party covariances (and optional means).
GaussianState make_product(const Eigen::MatrixXd& V_alice,
                           const Eigen::MatrixXd& V_bob,
                           const Eigen::VectorXd& mean_alice = Eigen::VectorXd(),
                           const Eigen::VectorXd& mean_bob = Eigen::VectorXd());

// Pure loss of transmissivity eta on Bob's modes:
// V_B -> eta V_B + (1-eta) I, V_AB -> sqrt(eta) V_AB, xi_B -> sqrt(eta) xi_B.
GaussianState attenuate(const GaussianState& s, double eta);

}  // namespace wigkit
