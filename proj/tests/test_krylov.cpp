#include <doctest.h>

#include <cmath>
#include <vector>

#include "cosprec/errors.hpp"
#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/krylov.hpp"
#include "cosprec/matcore.hpp"
#include "cosprec/precond.hpp"

using namespace cosprec;

namespace {

SymMatrix random_spd_k(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DenseMatrix B(n);
    for (double& v : B.a) v = 2.0 * rng.uniform01() - 1.0;
    DenseMatrix Bt(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Bt(i, j) = B(j, i);
    DenseMatrix A = dense_matmul(Bt, B);
    for (int i = 0; i < n; ++i) A(i, i) += 0.5;
    return SymMatrix(std::move(A));
}

DenseMatrix gj_inverse_k(const DenseMatrix& A) {
    const int n = A.n;
    DenseMatrix M = A, X = DenseMatrix::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(M(r, c)) > std::abs(M(piv, c))) piv = r;
        for (int j = 0; j < n; ++j) {
            std::swap(M(c, j), M(piv, j));
            std::swap(X(c, j), X(piv, j));
        }
        const double d = M(c, c);
        REQUIRE(std::abs(d) > 1e-14);
        for (int j = 0; j < n; ++j) {
            M(c, j) /= d;
            X(c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = M(r, c);
            for (int j = 0; j < n; ++j) {
                M(r, j) -= f * M(c, j);
                X(r, j) -= f * X(c, j);
            }
        }
    }
    return X;
}

} // namespace

TEST_CASE("cg solves the identity in one step") {
    const std::vector<double> b = {3.0, -1.0, 0.5};
    const SolveResult r = cg(SymMatrix(DenseMatrix::identity(3)), b, 1e-12, 10);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 1);
    for (int i = 0; i < 3; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("cg finishes in two steps for two distinct eigenvalues") {
    DenseMatrix d(2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    const SolveResult r = cg(SymMatrix(d), {1.0, 1.0}, 1e-12, 10);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 2);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cg matches a direct solve") {
    const SymMatrix A = random_spd_k(30, 17);
    const std::vector<double> b = random_rhs(30, 99);
    const SolveResult r = cg(A, b, 1e-12, 200);
    REQUIRE(r.report.converged);
    const DenseMatrix inv = gj_inverse_k(A.dense());
    std::vector<double> xs(30, 0.0);
    dense_matvec(inv, b.data(), xs.data());
    for (int i = 0; i < 30; ++i) CHECK(r.x[i] == doctest::Approx(xs[i]).epsilon(1e-6));
}

TEST_CASE("cg terminates within a small margin of n iterations") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const SymMatrix A = random_spd_k(20, s);
        const SolveResult r = cg(A, random_rhs(20, 100 + s), 1e-12, 25);
        CHECK(r.report.converged);
        CHECK(r.report.iterations <= 25);
        CHECK(r.report.residual_history.size() ==
              static_cast<std::size_t>(r.report.iterations) + 1);
    }
}

TEST_CASE("cg reports the initial residual and honors a zero rhs") {
    const SymMatrix A = random_spd_k(8, 3);
    const std::vector<double> b = random_rhs(8, 4);
    const SolveResult r = cg(A, b, 1e-10, 50);
    double nb = 0.0;
    for (double v : b) nb += v * v;
    CHECK(r.report.residual_history[0] == doctest::Approx(std::sqrt(nb)).epsilon(1e-14));

    const SolveResult rz = cg(A, std::vector<double>(8, 0.0), 1e-10, 50);
    CHECK(rz.report.converged);
    CHECK(rz.report.iterations == 0);
    for (double v : rz.x) CHECK(v == 0.0);
}

TEST_CASE("cg breaks down on indefinite input") {
    DenseMatrix d(2);
    d(0, 0) = 1.0;
    d(1, 1) = -2.0;
    CHECK_THROWS_AS(cg(SymMatrix(d), {1.0, 1.0}, 1e-10, 10), Breakdown);
}

TEST_CASE("cg validates arguments") {
    const SymMatrix A = random_spd_k(5, 9);
    CHECK_THROWS_AS(cg(A, std::vector<double>(4, 1.0), 1e-10, 10), DimensionMismatch);
    CHECK_THROWS_AS(cg(A, std::vector<double>(5, 1.0), 1e-10, 0), InvalidParam);
    CHECK_THROWS_AS(pcg(A, SymMatrix(DenseMatrix::identity(4)), std::vector<double>(5, 1.0),
                        1e-10, 10),
                    DimensionMismatch);
}

TEST_CASE("pcg with the exact inverse converges in one step") {
    const SymMatrix A = random_spd_k(15, 21);
    const SymMatrix X(gj_inverse_k(A.dense()));
    const SolveResult r = pcg(A, X, random_rhs(15, 5), 1e-10, 50);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 1);
}

TEST_CASE("pcg with the identity reproduces cg") {
    const SymMatrix A = generate({MatrixTag::poisson2d, 8, 0});
    const std::vector<double> b = random_rhs(64, 31);
    const SolveResult rc = cg(A, b, 1e-10, 500);
    const SolveResult rp =
        pcg(A, SymMatrix(DenseMatrix::identity(64)), b, 1e-10, 500);
    CHECK(rc.report.converged);
    CHECK(rp.report.converged);
    CHECK(rc.report.iterations == rp.report.iterations);
    REQUIRE(rc.report.residual_history.size() == rp.report.residual_history.size());
    for (std::size_t t = 0; t < rc.report.residual_history.size(); ++t)
        CHECK(rp.report.residual_history[t] ==
              doctest::Approx(rc.report.residual_history[t]).epsilon(1e-10));
    for (int i = 0; i < 64; ++i) CHECK(rp.x[i] == doctest::Approx(rc.x[i]).epsilon(1e-9));
}

TEST_CASE("pcg accepts a built preconditioner and solves correctly") {
    const SymMatrix A = generate({MatrixTag::poisson2d, 10, 0});
    PrecondOptions o;
    o.method = Method::mincos;
    o.epsilon = 0.01;
    o.max_iter = 50;
    o.mode = StorageMode::sparse;
    o.thr = 0.04;
    o.lfil = 40;
    const SymMatrix X = build_preconditioner(A, o).X;
    const std::vector<double> b = random_rhs(100, 123);
    const SolveResult r = pcg(A, X, b, 1e-10, 500);
    CHECK(r.report.converged);
    std::vector<double> ax(100, 0.0);
    const DenseMatrix Ad = A.to_dense().dense();
    dense_matvec(Ad, r.x.data(), ax.data());
    double res = 0.0, nb = 0.0;
    for (int i = 0; i < 100; ++i) {
        res += (ax[i] - b[i]) * (ax[i] - b[i]);
        nb += b[i] * b[i];
    }
    CHECK(std::sqrt(res) <= 1e-9 * std::sqrt(nb));
}

TEST_CASE("pcg breaks down on an indefinite preconditioner") {
    const SymMatrix A = SymMatrix(DenseMatrix::identity(2));
    DenseMatrix x(2);
    x(0, 0) = 1.0;
    x(1, 1) = -1.0;
    CHECK_THROWS_AS(pcg(A, SymMatrix(x), {1.0, 1.0}, 1e-10, 10), Breakdown);
}

TEST_CASE("random_rhs is deterministic per seed and bounded") {
    const std::vector<double> a = random_rhs(50, 7);
    const std::vector<double> b = random_rhs(50, 7);
    const std::vector<double> c = random_rhs(50, 8);
    CHECK(a == b);
    CHECK(a != c);
    for (double v : a) {
        CHECK(v >= -1.0);
        CHECK(v < 1.0);
    }
}
