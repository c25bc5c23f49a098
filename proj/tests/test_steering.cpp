#include <doctest.h>

#include "wigkit/steering.hpp"

#include <cmath>
#include <vector>

using namespace wigkit;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

const Eigen::Vector2d eq(1.0, 0.0);

JointState tmsv_grid_state(double r, double half_width, int n) {
    const GaussianState s = make_tmsv(r);
    WignerField f = render(PhaseGrid(4, half_width, n),
                           [&](const PhasePoint& x) { return s.wigner(x); });
    return JointState(std::move(f), ModeLayout{1, 1});
}

std::vector<PhasePoint> bob_probes() {
    std::vector<PhasePoint> probes;
    const double coords[5][2] = {
        {0.0, 0.0}, {0.8, -0.4}, {-1.2, 0.5}, {1.6, 1.1}, {0.3, 0.3}};
    for (const auto& c : coords) {
        PhasePoint x(2);
        x << c[0], c[1];
        probes.push_back(x);
    }
    return probes;
}

}  // namespace

TEST_CASE("conjugate axis applies the symplectic form") {
    const Eigen::Vector2d g(0.6, -0.8);
    const Eigen::Vector2d w = conjugate_axis(g);
    CHECK(w[0] == doctest::Approx(0.8));
    CHECK(w[1] == doctest::Approx(0.6));
    CHECK(w.dot(g) == doctest::Approx(0.0));
    CHECK(w.norm() == doctest::Approx(g.norm()));
}

TEST_CASE("gaussian homodyne conditionals match the exact algebra") {
    const JointState joint{make_tmsv(0.5)};
    const Distribution1D d = conditional_probability(joint, eq, 0.8, eq);
    CHECK(d.conditioned_at == 0.8);
    CHECK(static_cast<int>(d.points.size()) == SliceSpec{}.points);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.mean() == doctest::Approx(std::tanh(1.0) * 0.8).epsilon(1e-9));
    CHECK(d.variance() == doctest::Approx(sech(1.0)).epsilon(1e-5));

    // conjugate quadratures anticorrelate
    const Eigen::Vector2d ep(0.0, 1.0);
    const Distribution1D dp = conditional_probability(joint, ep, 0.8, ep);
    CHECK(dp.mean() == doctest::Approx(-std::tanh(1.0) * 0.8).epsilon(1e-9));
}

TEST_CASE("level-mixture homodyne conditionals come from the sampled table") {
    const JointState joint{thermal_weights(1.0, 26)};
    const Distribution1D d = conditional_probability(joint, eq, 0.0, eq);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(d.mean()) < 1e-9);
    // conditioning the position at zero silences every odd level, whose
    // position density vanishes there. The surviving even-level weights are
    // w_n ~ 2^-n (n-1)!!/n!!, and sum w_n (2n+1) / sum w_n = 5/3.
    CHECK(d.variance() == doctest::Approx(5.0 / 3.0).epsilon(1e-3));

    SliceSpec strict;
    strict.mass_floor_rel = 1e-3;
    CHECK_THROWS_AS(conditional_probability(joint, eq, 25.0, eq, strict),
                    ConditioningError);
}

TEST_CASE("average conditional variance is exact on the analytic joints") {
    const JointState vac{make_product(Eigen::MatrixXd::Identity(2, 2),
                                      Eigen::MatrixXd::Identity(2, 2))};
    CHECK(conditional_variance(vac, eq, eq, Quadrature::q) ==
          doctest::Approx(1.0).epsilon(1e-12));

    for (double r : {0.25, 0.5, 1.0}) {
        const JointState joint{make_tmsv(r)};
        CHECK(conditional_variance(joint, eq, eq, Quadrature::q) ==
              doctest::Approx(sech(2.0 * r)).epsilon(1e-12));
        CHECK(conditional_variance(joint, eq, eq, Quadrature::p) ==
              doctest::Approx(sech(2.0 * r)).epsilon(1e-12));
    }

    const JointState mix{thermal_weights(1.0, 26)};
    CHECK(conditional_variance(mix, eq, eq, Quadrature::q) ==
          doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("sampled joints reproduce the gaussian conditional variances") {
    const JointState grid = tmsv_grid_state(0.4, 7.0, 40);

    // canonical axes ride the precomputed pair marginal
    CHECK(conditional_variance(grid, eq, eq, Quadrature::q) ==
          doctest::Approx(sech(0.8)).epsilon(5e-3));

    const Distribution1D d = conditional_probability(grid, eq, 0.5, eq);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(d.mean() == doctest::Approx(std::tanh(0.8) * d.conditioned_at).epsilon(0.02));

    // a rotated axis decorrelates the two-mode squeezing: variance cosh(2r)
    const Eigen::Vector2d diag(std::sqrt(0.5), std::sqrt(0.5));
    SliceSpec spec;
    spec.points = 48;
    CHECK(conditional_variance(grid, diag, diag, Quadrature::q, spec) ==
          doctest::Approx(std::cosh(0.8)).epsilon(0.05));
}

TEST_CASE("variance products flag steering exactly when below one") {
    const JointState tmsv{make_tmsv(0.5)};
    const ReidReport r1 = reid_product(tmsv, eq, eq);
    CHECK(r1.var_q == doctest::Approx(sech(1.0)).epsilon(1e-12));
    CHECK(r1.product == doctest::Approx(sech(1.0) * sech(1.0)).epsilon(1e-12));
    CHECK(r1.steering_flag);

    const JointState mix{thermal_weights(1.0, 26)};
    const ReidReport r2 = reid_product(mix, eq, eq);
    CHECK(r2.product == doctest::Approx(9.0).epsilon(1e-5));
    CHECK_FALSE(r2.steering_flag);

    const JointState cut{attenuate(make_tmsv(0.7), 0.5)};
    const double va = std::cosh(1.4);
    const double vb = 0.5 * std::cosh(1.4) + 0.5;
    const double c = std::sqrt(0.5) * std::sinh(1.4);
    const double cvar = vb - c * c / va;
    const ReidReport r3 = reid_product(cut, eq, eq);
    CHECK(r3.product == doctest::Approx(cvar * cvar).epsilon(1e-12));
    CHECK(r3.steering_flag);

    const JointState vac{make_product(Eigen::MatrixXd::Identity(2, 2),
                                      Eigen::MatrixXd::Identity(2, 2))};
    CHECK_FALSE(reid_product(vac, eq, eq).steering_flag);
}

TEST_CASE("averaged conditional-Wigner variance lower-bounds the homodyne one") {
    for (double r : {0.25, 0.5, 1.0}) {
        const JointState joint{make_tmsv(r)};
        CHECK(avg_conditional_wigner_variance(joint, eq, Quadrature::q) ==
              doctest::Approx(sech(2.0 * r)).epsilon(1e-12));
    }
    const JointState mix{thermal_weights(1.0, 26)};
    CHECK(avg_conditional_wigner_variance(mix, eq, Quadrature::q) ==
          doctest::Approx(3.0).epsilon(1e-5));
    CHECK(avg_conditional_wigner_variance(mix, eq, Quadrature::p) ==
          doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("the variance chain holds on every scenario state") {
    struct Case {
        JointState joint;
        bool steerable;
    };
    std::vector<Case> cases;
    cases.push_back({JointState{make_tmsv(0.5)}, true});
    cases.push_back({JointState{make_tmsv(1.0)}, true});
    cases.push_back({JointState{attenuate(make_tmsv(0.7), 0.6)}, true});
    cases.push_back({JointState{attenuate(make_tmsv(0.7), 0.0)}, false});
    Eigen::MatrixXd va(2, 2);
    va << 2.0, 0.0, 0.0, 0.5;
    cases.push_back(
        {JointState{make_product(va, 3.0 * Eigen::MatrixXd::Identity(2, 2))}, false});
    cases.push_back({JointState{thermal_weights(1.0, 26)}, false});

    for (const Case& c : cases) {
        const ChainReport rep = verify_variance_chain(c.joint, eq, eq);
        CHECK(rep.chain_ok);
        CHECK(rep.var_q_cond >= rep.var_c_q - 1e-4);
        CHECK(rep.var_p_cond >= rep.var_c_p - 1e-4);
        CHECK(rep.witness_point.has_value() == c.steerable);
        if (rep.witness_point) {
            const ConditionalWigner cw =
                conditional_wigner(c.joint, *rep.witness_point);
            const Eigen::MatrixXd s = cw.second_moments();
            CHECK(s(0, 0) * s(1, 1) < 1.0);
        }
    }

    const ChainReport tm = verify_variance_chain(cases[0].joint, eq, eq);
    CHECK(tm.var_q_cond == doctest::Approx(sech(1.0)).epsilon(1e-12));
    CHECK(tm.var_c_q == doctest::Approx(sech(1.0)).epsilon(1e-12));
    CHECK(tm.reid_flag);
    REQUIRE(tm.witness_point.has_value());
    CHECK(tm.witness_point->norm() == doctest::Approx(0.0));
}

TEST_CASE("level-projector assemblages recover the weighted photon states") {
    const FockMixtureState mix = thermal_weights(1.0, 26);
    const JointState joint{mix};
    const PovmFamily family = fock_projector_family(26);
    REQUIRE(static_cast<int>(family.elements.size()) == 27);

    const PhaseGrid alice_quad(2, 12.0, 192);
    const PhaseGrid bob_grid(2, 8.0, 64);
    const std::vector<Assemblage> members =
        build_assemblage(joint, family, alice_quad, bob_grid);
    REQUIRE(members.size() == family.elements.size());

    // member m integrates to the level weight and is the level state itself
    CHECK(integrate(members[1].field) == doctest::Approx(0.25).epsilon(1e-6));
    for (std::size_t k = 0; k < members[1].field.values.size(); k += 11) {
        const PhasePoint x = bob_grid.point(k);
        CHECK(std::abs(members[1].field.values[k] - 0.25 * fock_wigner(1, x)) < 1e-7);
    }

    // summing the ensemble reconstructs bob's marginal (at a lattice node,
    // so no interpolation error enters)
    const std::size_t node = bob_grid.size() / 2 + 7;
    const PhasePoint probe = bob_grid.point(node);
    double total = 0.0;
    for (const Assemblage& m : members)
        total += m.outcome_weight * m.field.values[node];
    CHECK(total == doctest::Approx(mix.reduced_wigner(probe)).epsilon(1e-6));
}

TEST_CASE("coherent-projector assemblages carry the outcome statistics") {
    const GaussianState s = make_tmsv(0.5);
    const JointState joint{s};
    const PhaseGrid outcomes(2, 6.0, 16);
    const PovmFamily family = heterodyne_family(outcomes);
    const PhaseGrid alice_quad(2, 7.0, 32);
    const PhaseGrid bob_grid(2, 7.0, 24);
    const std::vector<Assemblage> members =
        build_assemblage(joint, family, alice_quad, bob_grid);
    REQUIRE(members.size() == outcomes.size());

    // the outcome density is the alice marginal smeared by a vacuum unit
    const double husimi_var = std::cosh(1.0) + 1.0;
    std::size_t central = 0;
    double best = -1.0;
    for (std::size_t e = 0; e < family.elements.size(); ++e) {
        const double v = family.elements[e].wigner(PhasePoint::Zero(2));
        if (v > best) {
            best = v;
            central = e;
        }
    }
    CHECK(integrate(members[central].field) ==
          doctest::Approx(1.0 / (2.0 * M_PI * husimi_var)).epsilon(1e-4));

    double total = 0.0;
    for (const Assemblage& m : members) total += m.outcome_weight * integrate(m.field);
    CHECK(total == doctest::Approx(1.0).epsilon(2e-3));

    // pointwise mixture reconstruction of bob's marginal at a lattice node
    const std::size_t node = bob_grid.size() / 2 + 5;
    const PhasePoint probe = bob_grid.point(node);
    double at_probe = 0.0;
    for (const Assemblage& m : members)
        at_probe += m.outcome_weight * m.field.values[node];
    CHECK(at_probe ==
          doctest::Approx(s.bob_marginal().value(probe)).epsilon(1e-3));
}

TEST_CASE("hidden-state reconstruction matches the direct assemblage") {
    const auto probes = bob_probes();

    const JointState tmsv{make_tmsv(0.5)};
    const double worst_g = lhs_reconstruction_check(
        tmsv, heterodyne_family(PhaseGrid(2, 5.0, 16)), PhaseGrid(2, 7.0, 40), probes);
    CHECK(worst_g < 1e-6);

    const JointState mix{thermal_weights(1.0, 26)};
    const double worst_f = lhs_reconstruction_check(
        mix, heterodyne_family(PhaseGrid(2, 5.0, 16)), PhaseGrid(2, 12.0, 64), probes);
    CHECK(worst_f < 1e-6);

    // families with negative Wigner elements admit no such decomposition
    CHECK_THROWS_AS(lhs_reconstruction_check(tmsv, fock_projector_family(3),
                                             PhaseGrid(2, 7.0, 40), probes),
                    std::invalid_argument);
}
