#include <doctest.h>

#include "wigkit/fock.hpp"
#include "wigkit/phase_space.hpp"

#include <cmath>
#include <random>

using namespace wigkit;

namespace {

// Independent Laguerre oracle: explicit series sum_k C(n,k) (-u)^k / k!.
double laguerre_series(int n, double u) {
    double term = 1.0, acc = 1.0;  // k = 0
    for (int k = 1; k <= n; ++k) {
        term *= -u * (n - k + 1) / (static_cast<double>(k) * k);
        acc += term;
    }
    return acc;
}

}  // namespace

TEST_CASE("laguerre recurrence matches the explicit series") {
    for (int n = 0; n <= 12; ++n)
        for (double u : {0.0, 0.3, 1.0, 2.0, 5.5, 11.0})
            CHECK(laguerre(n, u) ==
                  doctest::Approx(laguerre_series(n, u)).epsilon(1e-10));
    CHECK(laguerre(2, 2.0) == doctest::Approx(-1.0));  // 1 - 2u + u^2/2 at u=2
    std::vector<double> all(13);
    laguerre_all(12, 3.7, all);
    for (int n = 0; n <= 12; ++n)
        CHECK(all[n] == doctest::Approx(laguerre(n, 3.7)).epsilon(1e-14));
}

TEST_CASE("number-state Wigner values at the origin alternate in sign") {
    const PhasePoint origin = PhasePoint::Zero(2);
    for (int n = 0; n <= 10; ++n) {
        const double expect = (n % 2 ? -1.0 : 1.0) / (2.0 * M_PI);
        CHECK(fock_wigner(n, origin) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(fock_wigner_radial(n, 0.0) == doctest::Approx(expect).epsilon(1e-14));
    }
    std::vector<double> w(11);
    fock_wigner_all_radial(10, 2.9, w);
    for (int n = 0; n <= 10; ++n)
        CHECK(w[n] == doctest::Approx(fock_wigner_radial(n, 2.9)).epsilon(1e-13));
}

TEST_CASE("three-term recurrence residuals stay at roundoff") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> radius(0.0, 6.0), angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = radius(rng), th = angle(rng);
        PhasePoint x(2);
        x << r * std::cos(th), r * std::sin(th);
        for (int m : {1, 2, 5, 10, 20, 30})
            CHECK(std::abs(fock_recurrence_residual(m, x)) <= 1e-10);
    }
}

TEST_CASE("every phase-space point has a nearby negative level") {
    // empirical bound: the first negative level appears by ceil(u/2) + 2
    for (double r : {0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0}) {
        PhasePoint x(2);
        x << r, 0.0;
        const double u = x.squaredNorm();
        const int bound = static_cast<int>(std::ceil(0.5 * u)) + 2;
        const auto m = find_negative_fock(x, bound);
        REQUIRE(m.has_value());
        CHECK(*m <= bound);
        CHECK(fock_wigner(*m, x) < 0.0);
        // every level below reported nonnegative at this point
        for (int k = 0; k < *m; ++k)
            CHECK(fock_wigner(k, x) >= -1e-12 / (2.0 * M_PI));
    }
    PhasePoint x(2);
    x << 3.0, 0.0;
    CHECK_FALSE(find_negative_fock(x, 0).has_value());  // vacuum never negative
}

TEST_CASE("geometric weights carry the documented tail") {
    const FockMixtureState m = thermal_weights(1.0, 20);
    CHECK(m.cutoff() == 20);
    CHECK(m.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.weight(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.weight(2) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(m.tail_deficit() == doctest::Approx(std::pow(0.5, 21)).epsilon(1e-12));
    CHECK(thermal_default_cutoff(1.0) == 26);
    CHECK(thermal_default_cutoff(1.0, 1e-4) == 13);
    CHECK_THROWS_AS(thermal_weights(-0.5, 10), std::invalid_argument);
}

TEST_CASE("level mixture reduces to the closed-form isotropic Gaussian") {
    // sum_n p_n W_n for geometric p_n is exp(-u/(2(2t+1))) / (2pi (2t+1))
    const double t = 1.0;
    const FockMixtureState m = thermal_weights(t, thermal_default_cutoff(t));
    const double v = 2.0 * t + 1.0;
    for (double r : {0.0, 0.7, 1.5, 3.0}) {
        PhasePoint x(2);
        x << r, -0.3 * r;
        const double expect =
            std::exp(-x.squaredNorm() / (2.0 * v)) / (2.0 * M_PI * v);
        CHECK(m.reduced_wigner(x) == doctest::Approx(expect).epsilon(1e-7));
    }
    CHECK(m.marginal_variance() == doctest::Approx(v).epsilon(1e-6));

    // joint value factorizes level by level
    PhasePoint a(2), b(2);
    a << 0.4, -0.2;
    b << -1.1, 0.5;
    double direct = 0.0;
    for (int n = 0; n <= m.cutoff(); ++n)
        direct += m.weight(n) * fock_wigner(n, a) * fock_wigner(n, b);
    CHECK(m.joint_wigner(a, b) == doctest::Approx(direct).epsilon(1e-13));

    const Eigen::VectorXd lv = m.level_values(a);
    REQUIRE(lv.size() == m.cutoff() + 1);
    for (int n = 0; n <= m.cutoff(); ++n)
        CHECK(lv[n] == doctest::Approx(fock_wigner(n, a)).epsilon(1e-13));
}

TEST_CASE("mixture weights round trip through JSON") {
    const FockMixtureState m = thermal_weights(0.8, 15);
    const FockMixtureState back = FockMixtureState::from_json(m.to_json());
    REQUIRE(back.cutoff() == m.cutoff());
    for (int n = 0; n <= m.cutoff(); ++n)
        CHECK(back.weight(n) == m.weight(n));
    REQUIRE(back.thermal_t().has_value());
    CHECK(*back.thermal_t() == 0.8);

    const FockMixtureState plain(std::vector<double>{0.5, 0.5});
    CHECK_FALSE(FockMixtureState::from_json(plain.to_json()).thermal_t().has_value());
    CHECK_THROWS_AS(FockMixtureState(std::vector<double>{0.5, -0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FockMixtureState(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("low number states are orthonormal under the trace pairing") {
    PhaseGrid g(2, 7.0, 160);
    std::vector<WignerField> w;
    for (int n = 0; n <= 4; ++n)
        w.push_back(render(g, [n](const PhasePoint& x) { return fock_wigner(n, x); }));
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 4; ++m) {
            const double expect = n == m ? 1.0 : 0.0;
            CHECK(std::abs(pairing(w[n], w[m]) - expect) < 1e-6);
        }
}
