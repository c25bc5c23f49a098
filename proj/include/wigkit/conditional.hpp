#pragma once

// Conditional Wigner functions W(x_B | x_A) = W(x_A + x_B) / W_A(x_A), their
// physicality tests against positive-semidefinite witnesses, and remote state
// preparation by heralding on Bob.

#include "wigkit/fock.hpp"
#include "wigkit/gaussian.hpp"
#include "wigkit/phase_space.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <variant>

namespace wigkit {

// Conditioning point sits below the Alice-marginal positivity floor.
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Herald outcome has (numerically) zero probability.
struct HeraldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tagged union over the joint-state representations the library understands.
// Grid-backed joints carry their Alice/Bob marginals precomputed.
class JointState {
  public:
    explicit JointState(GaussianState s);
    explicit JointState(FockMixtureState s);
    JointState(WignerField joint, ModeLayout layout);

    const ModeLayout& layout() const { return layout_; }

    double wigner(const PhasePoint& x) const;
    double alice_marginal(const PhasePoint& x_alice) const;
    double bob_marginal(const PhasePoint& x_bob) const;
    double alice_peak() const { return alice_peak_; }

    const GaussianState* gaussian() const;
    const FockMixtureState* fock_mixture() const;
    const WignerField* grid() const;
    const WignerField* grid_alice_marginal() const;
    const WignerField* grid_bob_marginal() const;

    // Largest marginal standard deviation per party; sizes default grids.
    double alice_sigma() const;
    double bob_sigma() const;
    PhaseGrid default_alice_grid(int points_per_axis) const;
    PhaseGrid default_bob_grid(int points_per_axis) const;

  private:
    std::variant<GaussianState, FockMixtureState, WignerField> state_;
    ModeLayout layout_;
    double alice_peak_ = 0.0;
    std::optional<WignerField> alice_marginal_field_;
    std::optional<WignerField> bob_marginal_field_;
};

// Positive-semidefinite test operator given by its Wigner function. Either a
// displaced number-state projector |m><m| or the displaced number operator
// along a phase-space axis f (Wigner value ((f.y)^2 + (f.Omega y)^2 - 2)/16pi
// with y the displaced coordinate).
class WitnessOperator {
  public:
    struct FockProjector {
        int level;
        Eigen::Vector2d displacement;
    };
    struct DisplacedNumber {
        Eigen::Vector2d axis;  // unit vector
        Eigen::Vector2d displacement;
    };

    static WitnessOperator fock_projector(
        int level, const Eigen::Vector2d& displacement = Eigen::Vector2d::Zero());
    static WitnessOperator displaced_number(const Eigen::Vector2d& axis,
                                            const Eigen::Vector2d& displacement);

    double wigner(const PhasePoint& x_bob) const;
    const FockProjector* fock() const;
    const DisplacedNumber* number() const;
    std::string describe() const;
    nlohmann::json descriptor() const;

  private:
    std::variant<FockProjector, DisplacedNumber> op_;
};

// A conditional Wigner function over Bob's phase space. Gaussian joints give
// a Gaussian; number-diagonal mixtures give a signed level mixture
// sum_n c_n W_n with sum c_n = 1; grid joints give a grid slice.
class ConditionalWigner {
  public:
    explicit ConditionalWigner(ConditionalGaussian g);
    ConditionalWigner(Eigen::VectorXd level_weights, PhasePoint at);
    ConditionalWigner(WignerField f, PhasePoint at);

    int modes() const;
    double value(const PhasePoint& x_bob) const;
    const PhasePoint& conditioning_point() const { return at_; }

    Eigen::VectorXd mean() const;
    // Second central moments; exact for the analytic representations. Signed
    // mixtures can return an indefinite matrix.
    Eigen::MatrixXd second_moments() const;

    WignerField render(const PhaseGrid& grid) const;

    const ConditionalGaussian* as_gaussian() const;
    const Eigen::VectorXd* level_weights() const;
    const WignerField* as_field() const;

  private:
    std::variant<ConditionalGaussian, Eigen::VectorXd, WignerField> rep_;
    PhasePoint at_;
};

// Quadrature control for witness expectations. half_width == 0 sizes the
// grid automatically from the conditional state and witness support.
struct QuadSpec {
    int points = 128;
    double half_width = 0.0;
};

// Floor below which conditioning is refused, relative to the Alice peak.
inline constexpr double conditioning_floor_rel = 1e-12;

ConditionalWigner conditional_wigner(const JointState& joint,
                                     const PhasePoint& x_alice);

struct WitnessExpectation {
    double value;
    double error_bound;  // 0 on analytic paths, else 10x refinement delta
    bool exact;
};

// (4pi)^modes * integral of W_witness * W_conditional. Analytic for
// number witnesses (exact moments) and for undisplaced projectors against
// level mixtures (orthogonality); quadrature with N vs N/2 refinement
// otherwise.
WitnessExpectation witness_expectation(const ConditionalWigner& cond,
                                       const WitnessOperator& witness,
                                       const QuadSpec& quad = {});

// Quasi-probability of outcome P_b given x_A; same pairing as above.
double conditional_quasi_probability(const JointState& joint,
                                     const WitnessOperator& witness,
                                     const PhasePoint& x_alice,
                                     const QuadSpec& quad = {});

struct WitnessFamilyConfig {
    int max_fock = 30;
    bool displaced_fock = true;      // also try projectors at the conditional mean
    bool number_witnesses = true;    // displaced number along moment eigen-axes
    QuadSpec quad;
    double violation_floor = 1e-9;   // |value| must clear this plus the bound
};

struct PhysicalityCertificate {
    PhasePoint conditioning_point;
    WitnessOperator witness;
    double value;        // negative expectation on a PSD operator
    double error_bound;  // quadrature error; value + bound < 0 guaranteed
    nlohmann::json to_json() const;
};

// Scans the configured witness family and returns the most negative robust
// violation, or nullopt if none was found (which proves nothing).
std::optional<PhysicalityCertificate> certify_unphysical(
    const JointState& joint, const PhasePoint& x_alice,
    const WitnessFamilyConfig& config = {});

struct HeraldedState {
    WignerField alice;           // normalized remote state, min over the grid
    double success_probability;  // <P_b> on Bob's marginal
};

// Alice's state after heralding outcome P_b on Bob:
// W_{A|b}(x_A) = <P_b>_{B|x_A} W_A(x_A) / <P_b>. Throws HeraldError when the
// success probability falls below 1e-10.
HeraldedState remote_conditioned_state(const JointState& joint,
                                       const WitnessOperator& herald,
                                       const PhaseGrid& alice_grid,
                                       const QuadSpec& quad = {});

struct NegativitySummary {
    double min_value;
    PhasePoint location;
    double negative_volume;  // integral of max(0, -W)
    nlohmann::json to_json() const;
};

NegativitySummary negativity_summary(const WignerField& f);

}  // namespace wigkit
