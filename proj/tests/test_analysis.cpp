#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "intermit/analysis.hpp"
#include "intermit/spectral.hpp"
#include "intermit/tower.hpp"

using namespace intermit;

namespace {

UlamMatrix from_dense(const Eigen::MatrixXd& D) {
    UlamMatrix M;
    M.partition = UniformPartition{static_cast<int>(D.rows()), 0.0, 1.0};
    M.kind = MatrixKind::closed;
    M.P = D.sparseView();
    M.P.makeCompressed();
    return M;
}

} // namespace

TEST_CASE("two-state model: frozen rates at eps0 = 0.1") {
    const PMMap map = PMMap::lsv(0.5);
    const TwoStateModel m = two_state(map, 0.1);
    CHECK(m.a == doctest::Approx(0.27568220365098511).epsilon(1e-13));
    CHECK(m.b == doctest::Approx(0.055555555555555559).epsilon(1e-14));
    CHECK(m.lambda2 == doctest::Approx(0.66876224079345925).epsilon(1e-13));

    // rows are probability vectors
    CHECK(m.matrix.row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.matrix.row(1).sum() == doctest::Approx(1.0).epsilon(1e-15));

    // invariant is stationary for the row convention and sums to 1
    const Eigen::Vector2d push = m.matrix.transpose() * m.invariant;
    CHECK(push[0] == doctest::Approx(m.invariant[0]).epsilon(1e-14));
    CHECK(push[1] == doctest::Approx(m.invariant[1]).epsilon(1e-14));
    CHECK(m.invariant.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.invariant[0] == doctest::Approx(m.b / (m.a + m.b)).epsilon(1e-15));

    CHECK_THROWS_AS(two_state(map, 0.0), config_error);
    CHECK_THROWS_AS(two_state(map, map.breakpoint), config_error);
    CHECK_THROWS_AS(two_state(map, -0.2), config_error);
}

TEST_CASE("two-state model: lambda2 agrees with the deflated iteration") {
    const PMMap map = PMMap::lsv(0.5);
    for (double eps0 : {0.05, 0.1, 0.25}) {
        const TwoStateModel m = two_state(map, eps0);
        const UlamMatrix M = from_dense(m.matrix);
        const SpectralResult st = leading(M, 1e-14);
        REQUIRE(st.converged);
        const SpectralResult sec = second(M, st, 1e-13);
        REQUIRE(sec.converged);
        CHECK(sec.eigenvalue == doctest::Approx(m.lambda2).epsilon(1e-12));
    }
}

TEST_CASE("two-state model: small-hole asymptotics of the rates") {
    const PMMap map = PMMap::lsv(0.5);
    // b = (1-x0) eps0 / (1-eps0) exactly for the affine right branch
    for (double eps0 : {1e-2, 1e-3, 1e-4}) {
        const TwoStateModel m = two_state(map, eps0);
        CHECK(m.b == doctest::Approx((1.0 - map.breakpoint) * eps0 / (1.0 - eps0))
                         .epsilon(1e-12));
    }
    // a ~ c_alpha eps0^alpha: exit slows down polynomially as the hole shrinks
    std::vector<std::pair<double, double>> pts;
    for (double eps0 : {1e-2, 1e-3, 1e-4})
        pts.emplace_back(eps0, two_state(map, eps0).a);
    const ScalingFit fit = scaling_fit(pts);
    CHECK(fit.slope == doctest::Approx(map.alpha).epsilon(0.1));
    CHECK(fit.r_squared > 0.999);
}

TEST_CASE("log-log regression: exact power law is recovered to machine precision") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {0.5, 1.0, 2.0, 7.0, 31.0})
        pts.emplace_back(x, 3.0 * std::pow(x, -2.0));
    const ScalingFit fit = scaling_fit(pts);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.log_points.size() == 5);

    // scaling y by a constant only moves the intercept
    std::vector<std::pair<double, double>> scaled;
    for (const auto& [x, y] : pts) scaled.emplace_back(x, 10.0 * y);
    const ScalingFit fit2 = scaling_fit(scaled);
    CHECK(fit2.slope == doctest::Approx(fit.slope).epsilon(1e-12));
    CHECK(fit2.intercept == doctest::Approx(fit.intercept + std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("log-log regression: degenerate inputs") {
    // constant y: slope 0 and r_squared pinned to 1 (no variance to explain)
    std::vector<std::pair<double, double>> flat = {{1.0, 2.0}, {2.0, 2.0}, {4.0, 2.0}};
    const ScalingFit fit = scaling_fit(flat);
    CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fit.r_squared == 1.0);

    CHECK_THROWS_AS(scaling_fit({{1.0, 1.0}, {2.0, 2.0}}), config_error);
    CHECK_THROWS_AS(scaling_fit({{1.0, 1.0}, {2.0, -2.0}, {3.0, 1.0}}), config_error);
    CHECK_THROWS_AS(scaling_fit({{1.0, 1.0}, {0.0, 2.0}, {3.0, 1.0}}), config_error);
    CHECK_THROWS_AS(scaling_fit({{2.0, 1.0}, {2.0, 2.0}, {2.0, 3.0}}), config_error);
}

TEST_CASE("total variation: metric axioms and exact values") {
    Eigen::VectorXd p(4), q(4);
    p << 0.25, 0.25, 0.25, 0.25;
    q << 0.5, 0.5, 0.0, 0.0;
    CHECK(tv_distance(p, p) == 0.0);
    CHECK(tv_distance(p, q) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tv_distance(p, q) == tv_distance(q, p));

    Eigen::VectorXd d1(2), d2(2);
    d1 << 1.0, 0.0;
    d2 << 0.0, 1.0;
    CHECK(tv_distance(d1, d2) == doctest::Approx(1.0).epsilon(1e-15));

    // triangle inequality on reproducible random triples
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = unif(rng);
        return Eigen::VectorXd(v / v.sum());
    };
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::VectorXd a = draw(16), b = draw(16), c = draw(16);
        CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
        CHECK(tv_distance(a, b) >= 0.0);
        CHECK(tv_distance(a, b) <= 1.0 + 1e-12);
    }
}

TEST_CASE("total variation: uniform refinement across resolutions") {
    // a coarse vector is at distance 0 from its own uniform refinement
    Eigen::VectorXd coarse(3);
    coarse << 0.5, 0.3, 0.2;
    Eigen::VectorXd fine(6);
    fine << 0.25, 0.25, 0.15, 0.15, 0.1, 0.1;
    CHECK(tv_distance(coarse, fine) == doctest::Approx(0.0).epsilon(1e-15));

    // moving mass within one coarse bin is invisible at the coarse scale but
    // visible at the fine one
    Eigen::VectorXd skew(6);
    skew << 0.5, 0.0, 0.15, 0.15, 0.1, 0.1;
    CHECK(tv_distance(coarse, skew) == doctest::Approx(0.25).epsilon(1e-15));

    Eigen::VectorXd bad(4);
    bad << 0.25, 0.25, 0.25, 0.25;
    CHECK_THROWS_AS(tv_distance(coarse, bad), config_error); // 3 does not divide 4

    Eigen::VectorXd neg(3);
    neg << 0.6, 0.6, -0.2;
    CHECK_THROWS_AS(tv_distance(coarse, neg), config_error);
    Eigen::VectorXd unnorm(3);
    unnorm << 0.5, 0.3, 0.3;
    CHECK_THROWS_AS(tv_distance(coarse, unnorm), config_error);
}

TEST_CASE("survivor profile: follows the preimage ladder exactly") {
    const PMMap map = PMMap::lsv(0.5);
    const std::vector<double> xs = preimage_sequence(map, 60).values;

    const std::vector<double> prof = escape_profile(map, xs[2], 40);
    REQUIRE(prof.size() == 41);
    for (int k = 0; k <= 40; ++k)
        CHECK(prof[static_cast<size_t>(k)] ==
              doctest::Approx(xs[static_cast<size_t>(k) + 2]).epsilon(1e-13));
    for (size_t k = 1; k < prof.size(); ++k) CHECK(prof[k] < prof[k - 1]);

    // polynomial decay: successive ratios climb toward 1, never geometric
    const std::vector<double> longprof = escape_profile(map, map.breakpoint, 2000);
    const double r10 = longprof[11] / longprof[10];
    const double r100 = longprof[101] / longprof[100];
    const double r1000 = longprof[1001] / longprof[1000];
    CHECK(r10 < r100);
    CHECK(r100 < r1000);
    CHECK(r1000 > 0.995);
    CHECK(r1000 < 1.0);

    CHECK_THROWS_AS(escape_profile(map, 0.3, 10), config_error); // not a preimage
    CHECK_THROWS_AS(escape_profile(map, xs[2], 0), config_error);
    CHECK_THROWS_AS(escape_profile(map, 0.0, 10), config_error);
}

TEST_CASE("survivor profile: tail slope is -1/alpha") {
    for (double alpha : {0.5, 0.75}) {
        const PMMap map = PMMap::lsv(alpha);
        const std::vector<double> prof = escape_profile(map, map.breakpoint, 3000);
        std::vector<std::pair<double, double>> pts;
        for (int k = 100; k <= 3000; k = static_cast<int>(k * 1.5))
            pts.emplace_back(static_cast<double>(k), prof[static_cast<size_t>(k)]);
        const ScalingFit fit = scaling_fit(pts);
        CHECK(fit.slope == doctest::Approx(-1.0 / alpha).epsilon(0.05));
    }
}

TEST_CASE("gap table: fields, bracket membership, and reference columns") {
    const PMMap map = PMMap::lsv(0.5);
    const std::vector<Table1Row> rows = table1(map, {100, 200}, 64);
    REQUIRE(rows.size() == 2);

    CHECK(rows[0].N == 100);
    CHECK(rows[1].N == 200);
    CHECK(rows[0].n_eps == 16);
    CHECK(rows[1].n_eps == 23);
    for (const Table1Row& r : rows) {
        REQUIRE(r.ok);
        CHECK(r.error.empty());
        CHECK(r.one_minus_lambda2 > 0.0);
        CHECK(r.one_minus_lambda2 < 1.0);
        // the averaged operator lands strictly inside the perturbation bracket
        CHECK(r.one_minus_lambda2_avg > r.bound_lo);
        CHECK(r.one_minus_lambda2_avg < r.bound_hi);
        CHECK(r.bound_hi == doctest::Approx(2.0 * r.bound_lo).epsilon(1e-12));
        // tower cross-check column is populated when M > 0
        CHECK(std::isfinite(r.one_minus_lambda_tower));
        CHECK(r.one_minus_lambda_tower > 0.0);
        CHECK(r.one_minus_lambda_tower < 1.0);
        // published values exist on this grid; same scaling, different map
        CHECK(std::isfinite(r.ref_one_minus_lambda2));
    }
    CHECK(rows[0].ref_one_minus_lambda2 == doctest::Approx(0.069494728128226).epsilon(1e-12));
    CHECK(rows[0].ref_bound_lo == doctest::Approx(0.060750416292176).epsilon(1e-12));
    // the gap shrinks with resolution
    CHECK(rows[1].one_minus_lambda2 < rows[0].one_minus_lambda2);

    // no tower column and no published values off the benchmark grid
    const PMMap map25 = PMMap::lsv(0.25);
    const std::vector<Table1Row> other = table1(map25, {128}, 0);
    REQUIRE(other.size() == 1);
    REQUIRE(other[0].ok);
    CHECK(!std::isfinite(other[0].one_minus_lambda_tower));
    CHECK(!std::isfinite(other[0].ref_one_minus_lambda2));

    CHECK_THROWS_AS(table1(map, {}, 0), config_error);
}

TEST_CASE("gap table: per-row failures are reported, not thrown") {
    const PMMap map = PMMap::lsv(0.5);
    // a 3-iteration budget cannot converge; every row must still come back
    const std::vector<Table1Row> rows = table1(map, {100, 200}, 0, 1e-10, 3);
    REQUIRE(rows.size() == 2);
    for (const Table1Row& r : rows) {
        CHECK(!r.ok);
        CHECK(!r.error.empty());
    }
}

TEST_CASE("density tail slope: synthetic power laws and window validation") {
    const UniformPartition part{1000, 0.0, 1.0};
    const double w = part.width();
    Eigen::VectorXd power(1000), flat(1000);
    for (int i = 0; i < 1000; ++i) {
        power[i] = std::pow(part.midpoint(i), -0.5) * w;
        flat[i] = w;
    }
    CHECK(density_tail_slope(power, part, 2, 400) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(density_tail_slope(flat, part, 2, 400) == doctest::Approx(0.0).epsilon(1e-10));

    CHECK_THROWS_AS(density_tail_slope(power, part, 0, 400), config_error);
    CHECK_THROWS_AS(density_tail_slope(power, part, 10, 10), config_error);
    CHECK_THROWS_AS(density_tail_slope(power, part, 10, 1200), config_error);
    // [40, 300) spans less than a decade of midpoints
    CHECK_THROWS_AS(density_tail_slope(power, part, 40, 300), config_error);
}

TEST_CASE("density tail slope: invariant density blows up like x^{-alpha}") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 2000);
    const SpectralResult st = leading(M, 1e-12);
    REQUIRE(st.converged);
    const double slope = density_tail_slope(st.eigenvector, M.partition, 3, 199);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.2)); // alpha +- 0.1 absolute
}
