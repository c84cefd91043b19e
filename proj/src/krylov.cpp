#include <cmath>

#include "cosprec/errors.hpp"
#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/krylov.hpp"

namespace cosprec {

namespace {

void apply(const SymMatrix& M, const std::vector<double>& x, std::vector<double>& y) {
    if (M.is_sparse())
        sparse_matvec(M.csc(), x.data(), y.data());
    else
        dense_matvec(M.dense(), x.data(), y.data());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return dot_kahan(a.data(), b.data(), static_cast<std::int64_t>(a.size()));
}

double nrm2(const std::vector<double>& a) {
    return std::sqrt(sumsq_kahan(a.data(), static_cast<std::int64_t>(a.size())));
}

} // namespace

SolveResult cg(const SymMatrix& A, const std::vector<double>& b, double tol, int max_iter) {
    const int n = A.n();
    if (static_cast<int>(b.size()) != n) throw DimensionMismatch("rhs length mismatch");
    if (max_iter < 1) throw InvalidParam("max_iter must be >= 1");

    SolveResult out;
    out.x.assign(n, 0.0);
    std::vector<double> r = b, p = b, Ap(n);
    const double nb = nrm2(b);
    const double target = tol * (nb > 0.0 ? nb : 1.0);
    double rr = dot(r, r);
    out.report.residual_history.push_back(std::sqrt(rr));
    if (out.report.residual_history.back() <= target) {
        out.report.converged = true;
        return out;
    }
    for (int k = 1; k <= max_iter; ++k) {
        apply(A, p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) throw Breakdown("cg: p'Ap <= 0");
        const double alpha = rr / pAp;
        for (int i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_next = dot(r, r);
        const double rn = std::sqrt(rr_next);
        out.report.residual_history.push_back(rn);
        out.report.iterations = k;
        if (rn <= target) {
            out.report.converged = true;
            return out;
        }
        const double beta = rr_next / rr;
        rr = rr_next;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return out;
}

SolveResult pcg(const SymMatrix& A, const SymMatrix& X, const std::vector<double>& b,
                double tol, int max_iter) {
    const int n = A.n();
    if (X.n() != n) throw DimensionMismatch("preconditioner size mismatch");
    if (static_cast<int>(b.size()) != n) throw DimensionMismatch("rhs length mismatch");
    if (max_iter < 1) throw InvalidParam("max_iter must be >= 1");

    SolveResult out;
    out.x.assign(n, 0.0);
    std::vector<double> r = b, z(n), p(n), Ap(n);
    const double nb = nrm2(b);
    const double target = tol * (nb > 0.0 ? nb : 1.0);
    out.report.residual_history.push_back(nrm2(r));
    if (out.report.residual_history.back() <= target) {
        out.report.converged = true;
        return out;
    }
    apply(X, r, z);
    p = z;
    double rz = dot(r, z);
    if (rz <= 0.0) throw Breakdown("pcg: r'Xr <= 0");
    for (int k = 1; k <= max_iter; ++k) {
        apply(A, p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) throw Breakdown("pcg: p'Ap <= 0");
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rn = nrm2(r);
        out.report.residual_history.push_back(rn);
        out.report.iterations = k;
        if (rn <= target) {
            out.report.converged = true;
            return out;
        }
        apply(X, r, z);
        const double rz_next = dot(r, z);
        if (rz_next <= 0.0) throw Breakdown("pcg: r'Xr <= 0");
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return out;
}

std::vector<double> random_rhs(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = 2.0 * rng.uniform01() - 1.0;
    return b;
}

} // namespace cosprec
