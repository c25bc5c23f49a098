#pragma once

// Homodyne conditional statistics, the Reid variance-product criterion, the
// averaged conditional-Wigner variance that lower-bounds it, and local
// hidden-state reconstruction checks for Wigner-positive measurements.

#include "wigkit/conditional.hpp"
#include "wigkit/measurements.hpp"
#include "wigkit/phase_space.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace wigkit {

// Direction w with w.x = g^T Omega x, the quadrature conjugate to axis g.
Eigen::Vector2d conjugate_axis(const Eigen::Vector2d& g);

enum class Quadrature { q, p };

// Control for the grid-slice pipeline that realizes homodyne deltas:
// conditioning on q_A means taking the column of the sampled (q_A, q_B)
// density nearest to it (bin width = cell size). Outer averages skip columns
// whose mass falls below mass_floor_rel times the peak.
struct SliceSpec {
    int points = 256;
    double half_width = 0.0;  // 0 = auto from marginal widths
    double mass_floor_rel = 1e-10;
};

struct Distribution1D {
    Eigen::VectorXd points;
    Eigen::VectorXd density;
    double step = 0.0;
    double conditioned_at = 0.0;  // the q_A actually used (snapped on grids)

    double mass() const;
    double mean() const;
    double variance() const;
};

// P(q_B | q_A) for q_B = f.x_B given g.x_A = q_A. Exact Gaussian algebra for
// Gaussian joints; grid slices otherwise.
Distribution1D conditional_probability(const JointState& joint,
                                       const Eigen::Vector2d& g, double q_alice,
                                       const Eigen::Vector2d& f,
                                       const SliceSpec& spec = {});

// Average over q_A of Var[q_B | q_A] (or the conjugate pair for p).
double conditional_variance(const JointState& joint, const Eigen::Vector2d& g,
                            const Eigen::Vector2d& f, Quadrature which,
                            const SliceSpec& spec = {});

struct ReidReport {
    double var_q;
    double var_p;
    double product;
    bool steering_flag;  // product < 1 demonstrates steering
    nlohmann::json to_json() const;
};

ReidReport reid_product(const JointState& joint, const Eigen::Vector2d& g,
                        const Eigen::Vector2d& f, const SliceSpec& spec = {});

// Average over x_A (full phase-space point) of the conditional-Wigner
// variance along f. Lower-bounds the homodyne conditional variance.
double avg_conditional_wigner_variance(const JointState& joint,
                                       const Eigen::Vector2d& f,
                                       Quadrature which,
                                       const QuadSpec& quad = {});

struct ChainReport {
    double var_q_cond;
    double var_p_cond;
    double product;
    bool reid_flag;
    double var_c_q;
    double var_c_p;
    bool chain_ok;  // var_cond >= var_c - tol on both quadratures
    std::optional<PhasePoint> witness_point;  // x_A with pointwise
                                              // conditional-variance product < 1
    nlohmann::json to_json() const;
};

// Checks Var[q_B|q_A] >= Var_c[q_B] (and the p pair) within tol, and when
// Var_c[q] Var_c[p] < 1 locates a conditioning point whose pointwise
// conditional-variance product drops below 1. Throws std::runtime_error on a
// genuine chain violation beyond tol.
ChainReport verify_variance_chain(const JointState& joint,
                                  const Eigen::Vector2d& g,
                                  const Eigen::Vector2d& f, double tol = 1e-4);

struct Assemblage {
    std::string label;
    double outcome_weight;
    WignerField field;  // unnormalized: integrates to the outcome probability
};

// Bob-side conditional ensemble for a Wigner-positive Alice measurement:
// W_B^a(x_B) = (4pi)^l * integral of W_a(x_A) W(x_A + x_B) over the Alice
// quadrature grid.
std::vector<Assemblage> build_assemblage(const JointState& joint,
                                         const PovmFamily& family,
                                         const PhaseGrid& alice_quad,
                                         const PhaseGrid& bob_grid);

// Rebuilds every assemblage member from the hidden-state form
// integral of P(x_A) P(a|x_A) W(x_B|x_A) and returns the max pointwise
// discrepancy against the direct construction, over the probe points.
// Rejects families with negative Wigner values on the quadrature grid.
double lhs_reconstruction_check(const JointState& joint,
                                const PovmFamily& family,
                                const PhaseGrid& alice_quad,
                                std::span<const PhasePoint> bob_probes);

}  // namespace wigkit
