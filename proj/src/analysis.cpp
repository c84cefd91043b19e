#include <algorithm>
#include <cmath>
#include <cstdint>

#include <lapacke.h>

#include "cosprec/analysis.hpp"
#include "cosprec/errors.hpp"
#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/matcore.hpp"

namespace cosprec {

namespace {

// Products of a dropped/symmetrized X with A carry asymmetry up to about
// 1e-3 relative (X no longer commutes with A), so the guard here is a coarse
// bug catcher, not a roundoff bound.
constexpr double kSymGuard = 1e-2;
constexpr int kLanczosMax = 200;
constexpr double kLanczosTol = 1e-8;

void check_near_symmetric(const SymMatrix& M) {
    double drift = 0.0, norm = 0.0;
    if (M.is_sparse()) {
        drift = frob_norm(csc_add(1.0, M.csc(), -1.0, csc_transpose(M.csc())));
        norm = frob_norm(M.csc());
    } else {
        const DenseMatrix& D = M.dense();
        double d2 = 0.0;
        for (int i = 0; i < D.n; ++i)
            for (int j = i + 1; j < D.n; ++j) {
                const double d = D(i, j) - D(j, i);
                d2 += 2.0 * d * d;
            }
        drift = std::sqrt(d2);
        norm = frob_norm(D);
    }
    if (drift > kSymGuard * (norm > 0.0 ? norm : 1.0))
        throw NotSymmetric("matrix is too far from symmetric to analyze");
}

DenseMatrix symmetrized_dense(const SymMatrix& M) {
    DenseMatrix D = M.is_sparse() ? M.csc().to_dense() : M.dense();
    for (int i = 0; i < D.n; ++i)
        for (int j = i + 1; j < D.n; ++j) {
            const double v = 0.5 * (D(i, j) + D(j, i));
            D(i, j) = v;
            D(j, i) = v;
        }
    return D;
}

SymMatrix symmetric_part(const SymMatrix& M) {
    if (M.is_sparse())
        return SymMatrix(csc_add(0.5, M.csc(), 0.5, csc_transpose(M.csc())));
    return SymMatrix(symmetrized_dense(M));
}

std::vector<double> dsyev_values(DenseMatrix D) {
    const int n = D.n;
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', n, D.a.data(), n, w.data());
    if (info != 0) throw NotConverged("symmetric eigensolve failed");
    return w;
}

std::pair<double, double> lanczos_extremes(const SymMatrix& M) {
    // Lanczos with full reorthogonalization on sym(M). Deterministic start.
    const int n = M.n();
    CscMatrix S;
    if (M.is_sparse()) {
        S = csc_add(0.5, M.csc(), 0.5, csc_transpose(M.csc()));
    } else {
        S = CscMatrix::from_dense(M.dense());
        S = csc_add(0.5, S, 0.5, csc_transpose(S));
    }
    const double nf = frob_norm(S);
    const double tol = kLanczosTol * (nf > 0.0 ? nf : 1.0);

    std::vector<std::vector<double>> V;
    std::vector<double> alpha, beta;
    std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));

    SplitMix64 rng(0x243F6A8885A308D3ull); // fixed start keeps runs reproducible
    for (int i = 0; i < n; ++i) v[i] = rng.uniform01() - 0.5;
    double vn = std::sqrt(sumsq_kahan(v.data(), n));
    for (double& x : v) x /= vn;

    for (int k = 0; k < kLanczosMax; ++k) {
        V.push_back(v);
        sparse_matvec(S, v.data(), w.data());
        double a = dot_kahan(v.data(), w.data(), n);
        alpha.push_back(a);
        for (int i = 0; i < n; ++i) w[i] -= a * v[i];
        if (k > 0) {
            const std::vector<double>& prev = V[static_cast<std::size_t>(k) - 1];
            for (int i = 0; i < n; ++i) w[i] -= beta[static_cast<std::size_t>(k) - 1] * prev[i];
        }
        // two passes of block reorthogonalization against all stored vectors
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : V) {
                const double c = dot_kahan(u.data(), w.data(), n);
                for (int i = 0; i < n; ++i) w[i] -= c * u[i];
            }
        }
        const double b = std::sqrt(sumsq_kahan(w.data(), n));
        const int m = k + 1;

        // tridiagonal eigensolve for the Ritz values and the last-row weights
        std::vector<double> d(alpha.begin(), alpha.end());
        std::vector<double> e(beta.begin(), beta.end());
        e.resize(static_cast<std::size_t>(m), 0.0); // dstev reads e[0..m-2]
        std::vector<double> zmat(static_cast<std::size_t>(m) * m);
        const lapack_int info =
            LAPACKE_dstev(LAPACK_ROW_MAJOR, 'V', m, d.data(), e.data(), zmat.data(), m);
        if (info != 0) throw NotConverged("tridiagonal eigensolve failed");

        const double res_lo = b * std::abs(zmat[static_cast<std::size_t>(m - 1) * m + 0]);
        const double res_hi = b * std::abs(zmat[static_cast<std::size_t>(m - 1) * m + (m - 1)]);
        if ((res_lo <= tol && res_hi <= tol) || b <= tol) {
            return {d.front(), d.back()};
        }
        if (m == kLanczosMax) break;
        beta.push_back(b);
        for (int i = 0; i < n; ++i) v[i] = w[i] / b;
    }
    throw NotConverged("lanczos did not resolve both spectrum endpoints");
}

double csc_one_norm(const CscMatrix& A) {
    double best = 0.0;
    for (int j = 0; j < A.n; ++j) {
        double s = 0.0;
        for (std::int64_t t = A.colptr[j]; t < A.colptr[j + 1]; ++t) s += std::abs(A.val[t]);
        best = std::max(best, s);
    }
    return best;
}

double dense_one_norm(const DenseMatrix& A) {
    double best = 0.0;
    for (int j = 0; j < A.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < A.n; ++i) s += std::abs(A(i, j));
        best = std::max(best, s);
    }
    return best;
}

DenseMatrix dense_inverse(DenseMatrix A) {
    const int n = A.n;
    std::vector<lapack_int> piv(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, n, n, A.a.data(), n, piv.data());
    if (info != 0) throw NotConverged("lu factorization failed (singular matrix)");
    info = LAPACKE_dgetri(LAPACK_ROW_MAJOR, n, A.a.data(), n, piv.data());
    if (info != 0) throw NotConverged("matrix inversion failed");
    return A;
}

} // namespace

std::pair<double, double> spectrum_interval(const SymMatrix& M, int exact_threshold) {
    if (M.n() < 1) throw InvalidParam("empty matrix");
    check_near_symmetric(M);
    if (M.n() <= exact_threshold) {
        const std::vector<double> w = dsyev_values(symmetrized_dense(M));
        return {w.front(), w.back()};
    }
    return lanczos_extremes(M);
}

std::vector<double> full_spectrum(const SymMatrix& M, int exact_threshold) {
    if (M.n() < 1) throw InvalidParam("empty matrix");
    if (M.n() > exact_threshold)
        throw InvalidParam("full spectrum requires the dense path (matrix too large)");
    check_near_symmetric(M);
    return dsyev_values(symmetrized_dense(M));
}

std::optional<double> cond_ratio(const SymMatrix& X, const SymMatrix& A) {
    if (X.n() != A.n()) throw DimensionMismatch("preconditioner size mismatch");
    const SymMatrix P = matmul(X, A, StorageMode::dense);
    DenseMatrix S = symmetrized_dense(P); // reported on the symmetric part of XA

    // positive definiteness of sym(XA) via Cholesky
    {
        DenseMatrix C = S;
        const lapack_int info =
            LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'U', C.n, C.a.data(), C.n);
        if (info != 0) return std::nullopt;
    }

    const DenseMatrix Ad = A.is_sparse() ? A.csc().to_dense() : A.dense();
    const double kA = dense_one_norm(Ad) * dense_one_norm(dense_inverse(Ad));
    const double kP = dense_one_norm(S) * dense_one_norm(dense_inverse(S));
    return kP / kA;
}

double fill_percent(const SymMatrix& X) {
    const double n = static_cast<double>(X.n());
    if (n < 1.0) throw InvalidParam("empty matrix");
    return 100.0 * static_cast<double>(X.count_nonzeros()) / (n * n);
}

SpectrumReport analyze_preconditioner(const SymMatrix& X, const SymMatrix& A,
                                      int exact_threshold) {
    SpectrumReport rep;
    const StorageMode mode =
        (X.is_sparse() && A.is_sparse()) ? StorageMode::sparse : StorageMode::dense;
    // work on sym(XA) directly: dropped preconditioners no longer commute
    // with A, so the raw product is only approximately symmetric
    const SymMatrix P = symmetric_part(matmul(X, A, mode));
    const auto [lo, hi] = spectrum_interval(P, exact_threshold);
    rep.lambda_min = lo;
    rep.lambda_max = hi;
    rep.spd = lo > 0.0;
    rep.fill_percent = fill_percent(X);
    rep.cond_ratio = cond_ratio(X, A);
    return rep;
}

std::vector<double> dense_eigenvalues(const SymMatrix& M) {
    check_near_symmetric(M);
    return dsyev_values(symmetrized_dense(M));
}

double one_norm(const SymMatrix& M) {
    return M.is_sparse() ? csc_one_norm(M.csc()) : dense_one_norm(M.dense());
}

double inverse_one_norm(const SymMatrix& M) {
    const DenseMatrix D = M.is_sparse() ? M.csc().to_dense() : M.dense();
    return dense_one_norm(dense_inverse(D));
}

} // namespace cosprec
