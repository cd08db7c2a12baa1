#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "intermit/spectral.hpp"

using namespace intermit;

namespace {

UlamMatrix from_dense(const Eigen::MatrixXd& D, MatrixKind kind = MatrixKind::closed) {
    UlamMatrix M;
    const int n = static_cast<int>(D.rows());
    M.partition = UniformPartition{n, 0.0, 1.0};
    M.kind = kind;
    M.P = D.sparseView();
    M.P.makeCompressed();
    return M;
}

// Real eigenvalues of the full spectrum, descending; oracle for small N.
std::vector<double> dense_real_spectrum(const UlamMatrix& M) {
    const Eigen::MatrixXd D = Eigen::MatrixXd(M.P).transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(D);
    std::vector<double> out;
    for (int i = 0; i < D.rows(); ++i)
        if (std::abs(es.eigenvalues()[i].imag()) < 1e-9)
            out.push_back(es.eigenvalues()[i].real());
    std::sort(out.rbegin(), out.rend());
    return out;
}

} // namespace

TEST_CASE("stationary vector of the two-bin system") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 2);
    const SpectralResult r = leading(M, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.eigenvector[0] == doctest::Approx(0.53754209643900364).epsilon(1e-10));
    CHECK(r.eigenvector[1] == doctest::Approx(0.46245790356099631).epsilon(1e-10));
    CHECK(r.residual <= 1e-12);
}

TEST_CASE("doubly stochastic matrices have the uniform stationary vector") {
    Eigen::MatrixXd D(3, 3);
    D << 0.2, 0.5, 0.3,
         0.5, 0.3, 0.2,
         0.3, 0.2, 0.5;
    const SpectralResult r = leading(from_dense(D), 1e-13);
    REQUIRE(r.converged);
    for (int i = 0; i < 3; ++i)
        CHECK(r.eigenvector[i] == doctest::Approx(1.0 / 3).epsilon(1e-11));
}

TEST_CASE("second eigenvalue of a 2x2 chain is 1-a-b") {
    const double a = 0.27568220365098511, b = 0.055555555555555559;
    Eigen::MatrixXd D(2, 2);
    D << 1 - a, a, b, 1 - b;
    const UlamMatrix M = from_dense(D);
    const SpectralResult st = leading(M, 1e-13);
    const SpectralResult sec = second(M, st, 1e-13);
    REQUIRE(sec.converged);
    CHECK(sec.eigenvalue == doctest::Approx(1 - a - b).epsilon(1e-12));
    CHECK(std::abs(sec.eigenvector.sum()) <= 1e-10);
    CHECK(sec.eigenvector.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sec.max_mean_drift <= 1e-12);

    // negative second eigenvalue converges with its sign intact
    Eigen::MatrixXd F(2, 2);
    F << 0.3, 0.7, 0.7, 0.3;
    const UlamMatrix M2 = from_dense(F);
    const SpectralResult st2 = leading(M2, 1e-13);
    const SpectralResult sec2 = second(M2, st2, 1e-13);
    REQUIRE(sec2.converged);
    CHECK(sec2.eigenvalue == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("reducible input is reported, not forced") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(2, 2);
    const UlamMatrix M = from_dense(D);
    const SpectralResult st = leading(M, 1e-13);
    REQUIRE(st.converged);
    const SpectralResult sec = second(M, st, 1e-13, 10000);
    CHECK(!sec.converged);
    CHECK(std::abs(sec.eigenvalue) >= 1.0 - 1e-10);
}

TEST_CASE("complex dominant pair on the zero-mean subspace is flagged") {
    // lopsided damped 3-cycle, second eigenvalues -0.44 +- 0.686i;
    // the estimate oscillates forever instead of settling
    Eigen::MatrixXd D(3, 3);
    D << 0.02, 0.90, 0.08,
         0.10, 0.05, 0.85,
         0.88, 0.07, 0.05;
    const UlamMatrix M = from_dense(D);
    const SpectralResult st = leading(M, 1e-12);
    REQUIRE(st.converged);
    const SpectralResult sec = second(M, st, 1e-10, 100000);
    CHECK(!sec.converged);
    CHECK(sec.non_real_dominant);
    // flagged early, not by exhausting the budget
    CHECK(sec.iterations < 5000);
}

TEST_CASE("open two-bin system: eigenvalue 1/2 on the survivor") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 2);
    const UlamMatrix O = open_submatrix(M, {0});
    const SpectralResult r = substochastic_leading(O, 1e-13);
    REQUIRE(r.converged);
    CHECK(r.eigenvalue == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.eigenvector[0] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("substochastic iteration on a closed matrix returns 1") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 32);
    const SpectralResult r = substochastic_leading(M, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("escape rate from the first bin is of order 1/N") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 1000);
    const UlamMatrix O = open_submatrix(M, {0});
    const SpectralResult r = substochastic_leading(O, 1e-11);
    REQUIRE(r.converged);
    const double drop = 1.0 - r.eigenvalue;
    CHECK(drop > 0.2 / 1000);
    CHECK(drop < 5.0 / 1000);
}

TEST_CASE("iteration agrees with the dense full-spectrum oracle at small N") {
    const PMMap map = PMMap::lsv(0.5);
    for (int N : {8, 16, 32, 64}) {
        const UlamMatrix M = assemble(map, N);
        const SpectralResult st = leading(M, 1e-13);
        const SpectralResult sec = second(M, st, 1e-13);
        REQUIRE(st.converged);
        REQUIRE(sec.converged);
        const std::vector<double> spec = dense_real_spectrum(M);
        REQUIRE(spec.size() >= 2);
        CHECK(std::abs(st.eigenvalue - spec[0]) <= 1e-8);
        // deflation tracks the largest real sub-dominant eigenvalue
        CHECK(std::abs(sec.eigenvalue - spec[1]) <= 1e-8);

        const UlamMatrix O = open_submatrix(M, {0});
        const SpectralResult ro = substochastic_leading(O, 1e-13);
        REQUIRE(ro.converged);
        const std::vector<double> ospec = dense_real_spectrum(O);
        REQUIRE(!ospec.empty());
        CHECK(std::abs(ro.eigenvalue - ospec[0]) <= 1e-8);
    }
}

TEST_CASE("stationary tail mass scales like eps^{1-alpha}") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 1000);
    const SpectralResult st = leading(M, 1e-11);
    REQUIRE(st.converged);
    // cumulative mass on [0, eps] quadruples slower than eps: ratio ~ (1/4)^{1/2}
    auto cum = [&](int bins) { return st.eigenvector.head(bins).sum(); };
    const double m40 = cum(40), m160 = cum(160);
    CHECK(m40 / m160 == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("eigenvalue stable under doubled iteration budget") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 64);
    const SpectralResult st = leading(M, 1e-11);
    const SpectralResult a = second(M, st, 1e-11, 1000000);
    const SpectralResult b = second(M, st, 1e-11, 2000000);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(std::abs(a.eigenvalue - b.eigenvalue) <= 1e-10);
}

TEST_CASE("spectral runs are bitwise deterministic") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 256);
    const SpectralResult a = leading(M, 1e-12);
    const SpectralResult b = leading(M, 1e-12);
    CHECK(a.eigenvalue == b.eigenvalue);
    CHECK(a.iterations == b.iterations);
    CHECK((a.eigenvector - b.eigenvector).cwiseAbs().maxCoeff() == 0.0);
    const SpectralResult s1 = second(M, a, 1e-12);
    const SpectralResult s2 = second(M, b, 1e-12);
    CHECK(s1.eigenvalue == s2.eigenvalue);
    CHECK((s1.eigenvector - s2.eigenvector).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mass stays normalized during the leading iteration") {
    const PMMap map = PMMap::lsv(0.5);
    const UlamMatrix M = assemble(map, 128);
    const SpectralResult r = leading(M, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.eigenvector.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eigenvector.minCoeff() >= 0.0);
}
