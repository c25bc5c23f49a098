#include <doctest.h>

#include "wigkit/field_io.hpp"
#include "wigkit/phase_space.hpp"

#include <cmath>
#include <filesystem>

using namespace wigkit;

namespace {

double vacuum_wigner(const PhasePoint& x) {
    return std::exp(-0.5 * x.squaredNorm()) / (2.0 * M_PI);
}

// First excited number state, written out to stay independent of the library.
double one_photon_wigner(const PhasePoint& x) {
    const double u = x.squaredNorm();
    return (u - 1.0) * std::exp(-0.5 * u) / (2.0 * M_PI);
}

}  // namespace

TEST_CASE("symplectic form is antisymmetric and squares to minus identity") {
    for (int m = 1; m <= 8; ++m) {
        const Eigen::MatrixXd o = symplectic_form(m);
        REQUIRE(o.rows() == 2 * m);
        CHECK((o + o.transpose()).norm() == 0.0);
        const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(2 * m, 2 * m);
        CHECK((o * o + i).norm() == 0.0);
    }
    CHECK_THROWS_AS(symplectic_form(0), std::invalid_argument);
}

TEST_CASE("grid lattice places the center on a node") {
    PhaseGrid g(2, 4.0, 32);
    CHECK(g.step() == doctest::Approx(0.25));
    CHECK(g.axis_coord(0, 16) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.axis_coord(0, 0) == doctest::Approx(-4.0));
    CHECK(g.size() == 1024);
    CHECK(g.cell_volume() == doctest::Approx(0.0625));

    std::vector<int> idx(2);
    for (std::size_t flat : {std::size_t{0}, std::size_t{5}, std::size_t{1023}}) {
        g.unravel(flat, idx);
        CHECK(g.ravel(idx) == flat);
    }
    CHECK(g.nearest_index(0, -100.0) == 0);
    CHECK(g.nearest_index(0, 100.0) == 31);
    CHECK(g.nearest_index(0, 0.01) == 16);
    CHECK(g.point(g.ravel(std::vector<int>{16, 16})).norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(PhaseGrid(0, 1.0, 32), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGrid(2, 0.0, 32), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGrid(2, 1.0, 31), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGrid(2, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGrid(2, 1.0, 32, PhasePoint::Zero(3)), std::invalid_argument);
}

TEST_CASE("vacuum Wigner function integrates to one") {
    PhaseGrid g(2, 8.0, 128);
    const WignerField f = render(g, vacuum_wigner);
    CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-6));

    // midpoint sums converge spectrally: doubling barely moves the value
    PhaseGrid g2(2, 8.0, 256);
    const WignerField f2 = render(g2, vacuum_wigner);
    CHECK(std::abs(integrate(f) - integrate(f2)) < 1e-9);
}

TEST_CASE("trace pairing reproduces purities, traces, and orthogonality") {
    PhaseGrid g(2, 8.0, 192);
    const WignerField vac = render(g, vacuum_wigner);
    const WignerField one = render(g, one_photon_wigner);
    const WignerField identity(g, 1.0 / (4.0 * M_PI));

    CHECK(pairing(vac, vac) == doctest::Approx(1.0).epsilon(1e-8));    // purity
    CHECK(pairing(vac, identity) == doctest::Approx(1.0).epsilon(1e-8));  // trace
    CHECK(pairing(one, identity) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(pairing(vac, one)) < 1e-8);  // orthogonal projectors
    CHECK(pairing(vac, one) == doctest::Approx(pairing(one, vac)));

    PhaseGrid other(2, 8.0, 128);
    const WignerField coarse = render(other, vacuum_wigner);
    CHECK_THROWS_AS(pairing(vac, coarse), std::invalid_argument);
}

TEST_CASE("pairing rejects fields covering half a mode") {
    PhaseGrid g(1, 6.0, 32);
    const WignerField f = render(g, [](const PhasePoint& x) {
        return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2.0 * M_PI);
    });
    CHECK_THROWS_AS(pairing(f, f), std::invalid_argument);
}

TEST_CASE("marginals integrate out the dropped axes") {
    // product state: vacuum for Alice, isotropic thermal (variance 3) for Bob
    PhaseGrid g(4, 12.0, 48);
    const WignerField joint = render(g, [](const PhasePoint& x) {
        const double ua = x.head(2).squaredNorm();
        const double ub = x.tail(2).squaredNorm();
        return std::exp(-0.5 * ua) / (2.0 * M_PI) * std::exp(-ub / 6.0) / (6.0 * M_PI);
    });

    const std::array<int, 2> bob_axes{2, 3};
    const WignerField wb = marginal(joint, std::span<const int>(bob_axes.data(), 2));
    REQUIRE(wb.grid.dim() == 2);
    CHECK(wb.modes == 1);
    for (double q : {0.0, 1.0, -2.5}) {
        PhasePoint x(2);
        x << q, 0.5;
        const double expect = std::exp(-x.squaredNorm() / 6.0) / (6.0 * M_PI);
        const std::size_t flat = wb.grid.ravel(std::vector<int>{
            wb.grid.nearest_index(0, q), wb.grid.nearest_index(1, 0.5)});
        CHECK(wb.values[flat] ==
              doctest::Approx(expect).epsilon(1e-6).scale(1.0 / (6.0 * M_PI)));
    }

    // 2D -> 1D: the q marginal of the vacuum is the unit normal density
    PhaseGrid g2(2, 8.0, 64);
    const WignerField vac = render(g2, vacuum_wigner);
    const std::array<int, 1> keep_q{0};
    const WignerField mq = marginal(vac, std::span<const int>(keep_q.data(), 1));
    const std::size_t at = static_cast<std::size_t>(mq.grid.nearest_index(0, 1.0));
    CHECK(mq.values[at] ==
          doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI)).epsilon(1e-6));

    const std::array<int, 2> bad{1, 0};
    CHECK_THROWS_AS(marginal(joint, std::span<const int>(bad.data(), 2)),
                    std::invalid_argument);
}

TEST_CASE("minimum scan finds the most negative sample") {
    PhaseGrid g(2, 6.0, 64);
    const WignerField one = render(g, one_photon_wigner);
    const FieldMinimum m = min_value(one);
    CHECK(m.value == doctest::Approx(-1.0 / (2.0 * M_PI)).epsilon(1e-12));
    CHECK(m.location.norm() == doctest::Approx(0.0));
}

TEST_CASE("interpolation is exact on nodes and zero outside the box") {
    PhaseGrid g(2, 4.0, 32);
    const WignerField f = render(g, vacuum_wigner);
    for (std::size_t flat : {std::size_t{0}, std::size_t{100}, std::size_t{700}}) {
        const PhasePoint x = g.point(flat);
        CHECK(f.interpolate(x) == doctest::Approx(f.values[flat]).epsilon(1e-14));
    }
    PhasePoint far(2);
    far << 9.0, 0.0;
    CHECK(f.interpolate(far) == 0.0);
    // between nodes the value stays within the bracketing samples
    PhasePoint mid(2);
    mid << 0.5 * g.step(), 0.0;
    CHECK(f.interpolate(mid) <= vacuum_wigner(PhasePoint::Zero(2)));
    CHECK(f.interpolate(mid) > 0.0);
}

TEST_CASE("field files round trip through both formats") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wigkit_test_io";
    fs::remove_all(dir);
    fs::create_directories(dir);

    PhasePoint center(2);
    center << 0.5, -1.0;
    PhaseGrid g(2, 3.0, 16, center);
    const WignerField f = render(g, vacuum_wigner);

    for (FieldFormat fmt : {FieldFormat::csv, FieldFormat::f64le}) {
        const std::string base =
            (dir / (fmt == FieldFormat::csv ? "a" : "b")).string();
        const FieldFiles files = save_field(f, base, fmt);
        const WignerField back = load_field(files.header_path);
        REQUIRE(back.grid.same_geometry(f.grid));
        CHECK(back.modes == f.modes);
        REQUIRE(back.values.size() == f.values.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
        CHECK(worst == 0.0);  // %.17g and raw doubles both round trip
    }
    fs::remove_all(dir);
}
