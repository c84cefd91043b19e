#include <algorithm>
#include <chrono>
#include <cmath>

#include "cosprec/errors.hpp"
#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/precond.hpp"

namespace cosprec {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kStagnationRel = 1e-15;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double kahan_sumsq(const std::vector<double>& v) {
    return sumsq_kahan(v.data(), static_cast<std::int64_t>(v.size()));
}

// ----- dense engine ---------------------------------------------------------
//
// Keeps X and the running product P = XA. The rescaled methods update P as a
// linear combination (Z A = X A + alpha * D A), so each iteration costs one
// or two O(n^3) products instead of three.

struct DenseState {
    int n = 0;
    double sqrtn = 0.0;
    DenseMatrix X, P; // P = X*A
    const DenseMatrix* A = nullptr;

    double w() const {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += P(i, i);
        return t;
    }
    double F() const {
        const double np = frob_norm(P);
        if (np <= kUnderflow) throw ZeroMatrix("XA vanished");
        return std::max(0.0, 1.0 - w() / (sqrtn * np));
    }
    double Phi() const {
        double sum = 0.0, comp = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = P(i, j) - (i == j ? 1.0 : 0.0);
                const double term = v * v - comp;
                const double next = sum + term;
                comp = (next - sum) - term;
                sum = next;
            }
        return 0.5 * sum;
    }
};

struct ResidualState {
    int n = 0;
    double sqrtn = 0.0;
    DenseMatrix X, R; // R = I - A*X
    const DenseMatrix* A = nullptr;

    double Phi() const { return 0.5 * kahan_sumsq(R.a); }
    // F needs trace and norm of XA = I - R (X commutes with A up to roundoff).
    double F() const {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += 1.0 - R(i, i);
        double sum = 0.0, comp = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = (i == j ? 1.0 : 0.0) - R(i, j);
                const double term = v * v - comp;
                const double next = sum + term;
                comp = (next - sum) - term;
                sum = next;
            }
        const double norm = std::sqrt(sum);
        if (norm <= kUnderflow) throw ZeroMatrix("XA vanished");
        return std::max(0.0, 1.0 - tr / (sqrtn * norm));
    }
};

// One rescaled step (cauchycos or mincos). Returns false on StepUndefined /
// degenerate product, true otherwise; stagnant reports negligible motion.
bool dense_rescaled_step(DenseState& st, Method method, double& alpha_out, double& sign_out,
                         bool& stagnant) {
    const int n = st.n;
    const double w = st.w();
    // M = (1/n)((w/n) P - I); gradient G = M*A, MinCos direction Dhat = -M
    DenseMatrix M = st.P;
    const double f0 = w / (static_cast<double>(n) * n);
    for (double& v : M.a) v *= f0;
    for (int i = 0; i < n; ++i) M(i, i) -= 1.0 / n;

    DenseMatrix DirA; // (direction)*A
    DenseMatrix Dir;  // direction in X-space
    if (method == Method::cauchycos) {
        DenseMatrix G = dense_matmul(M, *st.A); // G = grad F (on S)
        DirA = dense_matmul(G, *st.A);
        for (double& v : DirA.a) v = -v; // direction is -G
        Dir = std::move(G);
        for (double& v : Dir.a) v = -v;
    } else {
        Dir = M; // Dhat = -M
        for (double& v : Dir.a) v = -v;
        DirA = dense_matmul(Dir, *st.A);
    }

    const double c1 = frob_inner(st.P, DirA);
    const double c2 = [&] {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += DirA(i, i);
        return t;
    }();
    const double c3 = frob_inner(DirA, DirA);
    const double num = w * c1 - n * c2;
    const double den = c2 * c1 - w * c3;
    if (std::abs(den) <= kUnderflow) return false;
    const double alpha = std::abs(num / den);

    // Z = X + alpha*Dir, ZA = P + alpha*DirA
    DenseMatrix ZA = st.P;
    for (std::size_t t = 0; t < ZA.a.size(); ++t) ZA.a[t] += alpha * DirA.a[t];
    double tz = 0.0;
    for (int i = 0; i < n; ++i) tz += ZA(i, i);
    const double nz = frob_norm(ZA);
    if (nz <= kUnderflow) return false;
    const double s = tz >= 0.0 ? 1.0 : -1.0;
    const double fac = s * st.sqrtn / nz;

    double diff2 = 0.0, old2 = 0.0;
    for (std::size_t t = 0; t < st.X.a.size(); ++t) {
        const double xn = fac * (st.X.a[t] + alpha * Dir.a[t]);
        const double d = xn - st.X.a[t];
        diff2 += d * d;
        old2 += st.X.a[t] * st.X.a[t];
        st.X.a[t] = xn;
    }
    for (std::size_t t = 0; t < st.P.a.size(); ++t) st.P.a[t] = fac * ZA.a[t];

    alpha_out = alpha;
    sign_out = s;
    stagnant = diff2 <= kStagnationRel * kStagnationRel * old2;
    return true;
}

bool dense_residual_step(ResidualState& st, Method method, double& alpha_out, bool& stagnant) {
    DenseMatrix Dir, ADir;
    if (method == Method::cauchyfro) {
        Dir = dense_matmul(*st.A, st.R);  // G = A*R
        ADir = dense_matmul(*st.A, Dir);  // A*G
    } else {
        Dir = st.R;
        ADir = dense_matmul(*st.A, st.R);
    }
    const double c1 = frob_inner(st.R, ADir);
    const double c2 = frob_inner(ADir, ADir);
    if (c2 <= kUnderflow) return false;
    const double alpha = c1 / c2;

    double diff2 = 0.0, old2 = 0.0;
    for (std::size_t t = 0; t < st.X.a.size(); ++t) {
        const double d = alpha * Dir.a[t];
        diff2 += d * d;
        old2 += st.X.a[t] * st.X.a[t];
        st.X.a[t] += d;
        st.R.a[t] -= alpha * ADir.a[t];
    }
    alpha_out = alpha;
    stagnant = diff2 <= kStagnationRel * kStagnationRel * old2;
    return true;
}

// ----- sparse engine --------------------------------------------------------

CscMatrix drop_all_columns(const CscMatrix& Z, double thr, int lfil) {
    const int n = Z.n;
    CscMatrix out(n);
    SparseColumn col, kept;
    for (int j = 0; j < n; ++j) {
        col.rows.clear();
        col.vals.clear();
        for (std::int64_t t = Z.colptr[j]; t < Z.colptr[j + 1]; ++t) {
            col.rows.push_back(Z.rowind[t]);
            col.vals.push_back(Z.val[t]);
        }
        kept = drop_column(col, j, thr, lfil);
        out.rowind.insert(out.rowind.end(), kept.rows.begin(), kept.rows.end());
        out.val.insert(out.val.end(), kept.vals.begin(), kept.vals.end());
        out.colptr[j + 1] = static_cast<std::int64_t>(out.rowind.size());
    }
    return out;
}

CscMatrix symmetrize_half(const CscMatrix& Z) {
    return csc_add(0.5, Z, 0.5, csc_transpose(Z));
}

struct SparseState {
    int n = 0;
    double sqrtn = 0.0;
    CscMatrix X, P; // P = X*A for the rescaled methods
    CscMatrix R;    // R = I - A*X for the residual methods
    const CscMatrix* A = nullptr;

    double wP() const { return csc_trace(P); }
    double F_fromP() const {
        const double np = frob_norm(P);
        if (np <= kUnderflow) throw ZeroMatrix("XA vanished");
        return std::max(0.0, 1.0 - wP() / (sqrtn * np));
    }
    double Phi_fromP() const {
        // 0.5 * sum (P - I)^2 over the sparse pattern plus missing diagonal ones
        double s = 0.0;
        std::vector<bool> seen(n, false);
        for (int j = 0; j < n; ++j)
            for (std::int64_t t = P.colptr[j]; t < P.colptr[j + 1]; ++t) {
                double v = P.val[t];
                if (P.rowind[t] == j) {
                    v -= 1.0;
                    seen[j] = true;
                }
                s += v * v;
            }
        for (int j = 0; j < n; ++j)
            if (!seen[j]) s += 1.0;
        return 0.5 * s;
    }
    double Phi_fromR() const {
        return 0.5 * sumsq_kahan(R.val.data(), static_cast<std::int64_t>(R.val.size()));
    }
    double F_fromR() const {
        const CscMatrix E = csc_add_identity(csc_scale(R, -1.0), 1.0); // I - R = XA
        const double norm = frob_norm(E);
        if (norm <= kUnderflow) throw ZeroMatrix("XA vanished");
        return std::max(0.0, 1.0 - csc_trace(E) / (sqrtn * norm));
    }
};

bool sparse_rescaled_step(SparseState& st, Method method, const PrecondOptions& opts,
                          double& alpha_out, double& sign_out, bool& stagnant) {
    const int n = st.n;
    const double w = st.wP();
    // M = (1/n)((w/n) P - I)
    CscMatrix M = csc_add_identity(csc_scale(st.P, w / (static_cast<double>(n) * n)), -1.0 / n);

    CscMatrix Dir, DirA;
    if (method == Method::cauchycos) {
        CscMatrix G = sparse_matmul(M, *st.A);
        DirA = csc_scale(sparse_matmul(G, *st.A), -1.0);
        Dir = csc_scale(G, -1.0);
    } else {
        Dir = csc_scale(M, -1.0);
        DirA = sparse_matmul(Dir, *st.A);
    }

    const double c1 = frob_inner(st.P, DirA);
    const double c2 = csc_trace(DirA);
    const double c3 = frob_inner(DirA, DirA);
    const double num = w * c1 - n * c2;
    const double den = c2 * c1 - w * c3;
    if (std::abs(den) <= kUnderflow) return false;
    const double alpha = std::abs(num / den);

    CscMatrix Z = csc_add(1.0, st.X, alpha, Dir);
    Z = drop_all_columns(Z, opts.thr, opts.lfil);
    if (opts.symmetrize_after_drop) Z = symmetrize_half(Z);

    CscMatrix ZA = sparse_matmul(Z, *st.A); // pattern changed: recompute
    const double nz = frob_norm(ZA);
    if (nz <= kUnderflow) return false;
    const double s = csc_trace(ZA) >= 0.0 ? 1.0 : -1.0;
    const double fac = s * st.sqrtn / nz;

    CscMatrix Xn = csc_scale(Z, fac);
    const CscMatrix diff = csc_add(1.0, Xn, -1.0, st.X);
    stagnant = frob_norm(diff) <= kStagnationRel * frob_norm(st.X);
    st.X = std::move(Xn);
    st.P = csc_scale(ZA, fac);
    alpha_out = alpha;
    sign_out = s;
    return true;
}

bool sparse_residual_step(SparseState& st, Method method, const PrecondOptions& opts,
                          double& alpha_out, bool& stagnant) {
    CscMatrix Dir, ADir;
    if (method == Method::cauchyfro) {
        Dir = sparse_matmul(*st.A, st.R);
        ADir = sparse_matmul(*st.A, Dir);
    } else {
        Dir = st.R;
        ADir = sparse_matmul(*st.A, st.R);
    }
    const double c1 = frob_inner(st.R, ADir);
    const double c2 = frob_inner(ADir, ADir);
    if (c2 <= kUnderflow) return false;
    const double alpha = c1 / c2;

    CscMatrix Xn = csc_add(1.0, st.X, alpha, Dir);
    Xn = drop_all_columns(Xn, opts.thr, opts.lfil);
    if (opts.symmetrize_after_drop) Xn = symmetrize_half(Xn);

    const CscMatrix diff = csc_add(1.0, Xn, -1.0, st.X);
    stagnant = frob_norm(diff) <= kStagnationRel * frob_norm(st.X);
    st.X = std::move(Xn);
    // dropping invalidates the residual recursion: recompute R = I - A*X
    st.R = csc_add_identity(csc_scale(sparse_matmul(*st.A, st.X), -1.0), 1.0);
    alpha_out = alpha;
    return true;
}

void check_symmetric(const SymMatrix& A) {
    // cheap probabilistic check on a handful of entries plus exact for small n
    const int n = A.n();
    if (n <= 400) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double x = A.at(i, j), y = A.at(j, i);
                const double scale = std::max({std::abs(x), std::abs(y), 1.0});
                if (std::abs(x - y) > 1e-12 * scale)
                    throw NotSymmetric("input matrix is not symmetric");
            }
        return;
    }
    SplitMix64 probe(0x5EEDu);
    for (int t = 0; t < 256; ++t) {
        const int i = static_cast<int>(probe.next() % static_cast<std::uint64_t>(n));
        const int j = static_cast<int>(probe.next() % static_cast<std::uint64_t>(n));
        const double x = A.at(i, j), y = A.at(j, i);
        const double scale = std::max({std::abs(x), std::abs(y), 1.0});
        if (std::abs(x - y) > 1e-12 * scale)
            throw NotSymmetric("input matrix is not symmetric");
    }
}

} // namespace

PrecondResult build_preconditioner(const SymMatrix& A_in, const PrecondOptions& opts) {
    if (opts.epsilon <= 0.0) throw InvalidParam("epsilon must be positive");
    if (opts.max_iter < 1) throw InvalidParam("max_iter must be >= 1");
    if (opts.thr < 0.0 || opts.thr > 1.0) throw InvalidParam("thr must lie in [0,1]");
    if (opts.lfil < 0) throw InvalidParam("lfil must be >= 0");
    check_symmetric(A_in);

    const auto t0 = Clock::now();
    PrecondResult res;
    const int n = A_in.n();
    const double sqrtn = std::sqrt(static_cast<double>(n));
    const bool rescaled = opts.method == Method::cauchycos || opts.method == Method::mincos;

    if (opts.mode == StorageMode::dense) {
        const SymMatrix Ad = A_in.to_dense();
        const DenseMatrix& A = Ad.dense();
        const double na = frob_norm(A);
        if (na <= kUnderflow) throw ZeroMatrix("input matrix is zero");
        const double x0 = sqrtn / na;

        if (rescaled) {
            DenseState st;
            st.n = n;
            st.sqrtn = sqrtn;
            st.A = &A;
            st.X = DenseMatrix(n);
            for (int i = 0; i < n; ++i) st.X(i, i) = x0;
            st.P = A;
            for (double& v : st.P.a) v *= x0;

            IterationRecord rec{0, st.F(), st.Phi(), 0.0, 1.0, seconds_since(t0)};
            res.history.push_back(rec);
            if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
                res.termination = Termination::converged;
                res.iterations = 0;
                res.X = SymMatrix(std::move(st.X));
                return res;
            }
            for (int k = 1; k <= opts.max_iter; ++k) {
                double alpha = 0.0, sign = 1.0;
                bool stagnant = false;
                if (!dense_rescaled_step(st, opts.method, alpha, sign, stagnant)) {
                    res.termination = Termination::stagnated;
                    res.iterations = k - 1;
                    res.X = SymMatrix(std::move(st.X));
                    return res;
                }
                rec = IterationRecord{k, st.F(), st.Phi(), alpha, sign, seconds_since(t0)};
                res.history.push_back(rec);
                if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
                    res.termination = Termination::converged;
                    res.iterations = k;
                    res.X = SymMatrix(std::move(st.X));
                    return res;
                }
                if (stagnant) {
                    res.termination = Termination::stagnated;
                    res.iterations = k;
                    res.X = SymMatrix(std::move(st.X));
                    return res;
                }
            }
            res.termination = Termination::max_iter;
            res.iterations = opts.max_iter;
            res.X = SymMatrix(std::move(st.X));
            return res;
        }

        ResidualState st;
        st.n = n;
        st.sqrtn = sqrtn;
        st.A = &A;
        st.X = DenseMatrix(n);
        for (int i = 0; i < n; ++i) st.X(i, i) = x0;
        st.R = A;
        for (double& v : st.R.a) v *= -x0;
        for (int i = 0; i < n; ++i) st.R(i, i) += 1.0;

        IterationRecord rec{0, st.F(), st.Phi(), 0.0, 1.0, seconds_since(t0)};
        res.history.push_back(rec);
        if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
            res.termination = Termination::converged;
            res.iterations = 0;
            res.X = SymMatrix(std::move(st.X));
            return res;
        }
        for (int k = 1; k <= opts.max_iter; ++k) {
            double alpha = 0.0;
            bool stagnant = false;
            if (!dense_residual_step(st, opts.method, alpha, stagnant)) {
                res.termination = Termination::stagnated;
                res.iterations = k - 1;
                res.X = SymMatrix(std::move(st.X));
                return res;
            }
            rec = IterationRecord{k, st.F(), st.Phi(), alpha, 1.0, seconds_since(t0)};
            res.history.push_back(rec);
            if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
                res.termination = Termination::converged;
                res.iterations = k;
                res.X = SymMatrix(std::move(st.X));
                return res;
            }
            if (stagnant) {
                res.termination = Termination::stagnated;
                res.iterations = k;
                res.X = SymMatrix(std::move(st.X));
                return res;
            }
        }
        res.termination = Termination::max_iter;
        res.iterations = opts.max_iter;
        res.X = SymMatrix(std::move(st.X));
        return res;
    }

    // sparse mode
    const SymMatrix As = A_in.to_sparse();
    const CscMatrix& A = As.csc();
    const double na = frob_norm(A);
    if (na <= kUnderflow) throw ZeroMatrix("input matrix is zero");
    const double x0 = sqrtn / na;

    SparseState st;
    st.n = n;
    st.sqrtn = sqrtn;
    st.A = &A;
    st.X = csc_scale(csc_identity(n), x0);
    if (rescaled) {
        st.P = csc_scale(A, x0);
    } else {
        st.R = csc_add_identity(csc_scale(A, -x0), 1.0);
    }

    auto current_F = [&] { return rescaled ? st.F_fromP() : st.F_fromR(); };
    auto current_Phi = [&] { return rescaled ? st.Phi_fromP() : st.Phi_fromR(); };

    IterationRecord rec{0, current_F(), current_Phi(), 0.0, 1.0, seconds_since(t0)};
    res.history.push_back(rec);
    if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
        res.termination = Termination::converged;
        res.iterations = 0;
        res.X = SymMatrix(std::move(st.X));
        return res;
    }
    for (int k = 1; k <= opts.max_iter; ++k) {
        double alpha = 0.0, sign = 1.0;
        bool stagnant = false;
        bool ok;
        try {
            ok = rescaled ? sparse_rescaled_step(st, opts.method, opts, alpha, sign, stagnant)
                          : sparse_residual_step(st, opts.method, opts, alpha, stagnant);
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) {
            res.termination = Termination::stagnated;
            res.iterations = k - 1;
            res.X = SymMatrix(std::move(st.X));
            return res;
        }
        rec = IterationRecord{k, current_F(), current_Phi(), alpha, sign, seconds_since(t0)};
        res.history.push_back(rec);
        if (std::min(rec.F, rec.Phi) <= opts.epsilon) {
            res.termination = Termination::converged;
            res.iterations = k;
            res.X = SymMatrix(std::move(st.X));
            return res;
        }
        if (stagnant) {
            res.termination = Termination::stagnated;
            res.iterations = k;
            res.X = SymMatrix(std::move(st.X));
            return res;
        }
    }
    res.termination = Termination::max_iter;
    res.iterations = opts.max_iter;
    res.X = SymMatrix(std::move(st.X));
    return res;
}

} // namespace cosprec
