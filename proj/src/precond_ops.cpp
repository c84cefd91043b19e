#include <algorithm>
#include <cmath>

#include "cosprec/errors.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/precond.hpp"

namespace cosprec {

namespace {
constexpr double kUnderflow = 1e-300;

StorageMode common_mode(const SymMatrix& X, const SymMatrix& A) {
    return (X.is_sparse() && A.is_sparse()) ? StorageMode::sparse : StorageMode::dense;
}
} // namespace

Method parse_method(const std::string& name) {
    if (name == "cauchycos") return Method::cauchycos;
    if (name == "mincos") return Method::mincos;
    if (name == "cauchyfro") return Method::cauchyfro;
    if (name == "minres") return Method::minres;
    throw InvalidParam("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::cauchycos: return "cauchycos";
        case Method::mincos: return "mincos";
        case Method::cauchyfro: return "cauchyfro";
        case Method::minres: return "minres";
    }
    return "?";
}

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_iter: return "max_iter";
        case Termination::stagnated: return "stagnated";
    }
    return "?";
}

double F_value(const SymMatrix& X, const SymMatrix& A) {
    SymMatrix P = matmul(X, A, common_mode(X, A));
    return 1.0 - cosine(P, SymMatrix::identity_like(P));
}

double phi_value(const SymMatrix& X, const SymMatrix& A) {
    SymMatrix P = matmul(X, A, common_mode(X, A));
    if (P.is_sparse()) {
        double s = 0.0;
        const CscMatrix& m = P.csc();
        std::vector<bool> diag_seen(m.n, false);
        for (int j = 0; j < m.n; ++j)
            for (std::int64_t t = m.colptr[j]; t < m.colptr[j + 1]; ++t) {
                double v = m.val[t];
                if (m.rowind[t] == j) {
                    v -= 1.0;
                    diag_seen[j] = true;
                }
                s += v * v;
            }
        for (int j = 0; j < m.n; ++j)
            if (!diag_seen[j]) s += 1.0;
        return 0.5 * s;
    }
    const DenseMatrix& d = P.dense();
    double sum = 0.0, comp = 0.0;
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) {
            const double v = d(i, j) - (i == j ? 1.0 : 0.0);
            const double term = v * v - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
    return 0.5 * sum;
}

SymMatrix grad_F(const SymMatrix& X, const SymMatrix& A) {
    const int n = X.n();
    const StorageMode mode = common_mode(X, A);
    SymMatrix P = matmul(X, A, mode);
    const double np = frob_norm(P);
    if (np <= kUnderflow) throw ZeroMatrix("grad_F: XA is zero");
    const double w = trace(P);
    const double sqrtn = std::sqrt(static_cast<double>(n));
    // (1/(|I| |XA|)) ((w/|XA|^2) XA - I) A
    if (mode == StorageMode::sparse) {
        CscMatrix M = csc_add_identity(csc_scale(P.csc(), w / (np * np)), -1.0);
        CscMatrix G = sparse_matmul(M, A.csc());
        return SymMatrix(csc_scale(G, 1.0 / (sqrtn * np)));
    }
    DenseMatrix M = P.to_dense().dense();
    for (double& v : M.a) v *= w / (np * np);
    for (int i = 0; i < n; ++i) M(i, i) -= 1.0;
    DenseMatrix G = dense_matmul(M, A.to_dense().dense());
    const double f = 1.0 / (sqrtn * np);
    for (double& v : G.a) v *= f;
    return SymMatrix(std::move(G));
}

double optimal_step(const SymMatrix& X, const SymMatrix& A, const SymMatrix& D) {
    const int n = X.n();
    const StorageMode mode = common_mode(X, A);
    SymMatrix P = matmul(X, A, mode);
    SymMatrix DA = matmul(D, A, mode);
    const double w = trace(P);
    const double c1 = frob_inner(P, DA);
    const double c2 = trace(DA);
    const double c3 = frob_inner(DA, DA);
    const double num = w * c1 - n * c2;
    const double den = c2 * c1 - w * c3;
    if (std::abs(den) <= kUnderflow)
        throw StepUndefined("optimal_step: degenerate direction");
    return std::abs(num / den);
}

SymMatrix dhat_direction(const SymMatrix& X, const SymMatrix& A) {
    const int n = X.n();
    const StorageMode mode = common_mode(X, A);
    SymMatrix P = matmul(X, A, mode);
    const double w = trace(P);
    // -(1/n)((w/n) XA - I)
    if (mode == StorageMode::sparse)
        return SymMatrix(csc_add_identity(csc_scale(P.csc(), -w / (static_cast<double>(n) * n)),
                                          1.0 / n));
    DenseMatrix D = P.to_dense().dense();
    const double f = -w / (static_cast<double>(n) * n);
    for (double& v : D.a) v *= f;
    for (int i = 0; i < n; ++i) D(i, i) += 1.0 / n;
    return SymMatrix(std::move(D));
}

namespace {

IterationRecord make_record(const SymMatrix& X, const SymMatrix& A, double alpha, double sign) {
    IterationRecord rec;
    rec.F = F_value(X, A);
    rec.Phi = phi_value(X, A);
    rec.alpha = alpha;
    rec.sign = sign;
    return rec;
}

} // namespace

std::pair<SymMatrix, IterationRecord> step_cauchycos(const SymMatrix& X, const SymMatrix& A) {
    SymMatrix G = grad_F(X, A);
    if (frob_norm(G) <= kUnderflow)
        throw StepUndefined("step_cauchycos: zero gradient (converged)");
    // move along D = -G
    SymMatrix D = G;
    if (D.is_sparse()) {
        D = SymMatrix(csc_scale(D.csc(), -1.0));
    } else {
        DenseMatrix d = D.dense();
        for (double& v : d.a) v = -v;
        D = SymMatrix(std::move(d));
    }
    const double alpha = optimal_step(X, A, D);
    SymMatrix Z;
    if (X.is_sparse() && D.is_sparse()) {
        Z = SymMatrix(csc_add(1.0, X.csc(), alpha, D.csc()));
    } else {
        DenseMatrix z = X.to_dense().dense();
        const DenseMatrix dd = D.to_dense().dense();
        for (std::size_t t = 0; t < z.a.size(); ++t) z.a[t] += alpha * dd.a[t];
        Z = SymMatrix(std::move(z));
    }
    auto [Xn, s] = scale_to_S(Z, A);
    IterationRecord rec = make_record(Xn, A, alpha, s);
    return {std::move(Xn), rec};
}

std::pair<SymMatrix, IterationRecord> step_mincos(const SymMatrix& X, const SymMatrix& A) {
    SymMatrix D = dhat_direction(X, A);
    if (frob_norm(D) <= kUnderflow)
        throw StepUndefined("step_mincos: zero direction (converged)");
    const double alpha = optimal_step(X, A, D);
    SymMatrix Z;
    if (X.is_sparse() && D.is_sparse()) {
        Z = SymMatrix(csc_add(1.0, X.csc(), alpha, D.csc()));
    } else {
        DenseMatrix z = X.to_dense().dense();
        const DenseMatrix dd = D.to_dense().dense();
        for (std::size_t t = 0; t < z.a.size(); ++t) z.a[t] += alpha * dd.a[t];
        Z = SymMatrix(std::move(z));
    }
    auto [Xn, s] = scale_to_S(Z, A);
    IterationRecord rec = make_record(Xn, A, alpha, s);
    return {std::move(Xn), rec};
}

ResidualStep step_cauchyfro(const SymMatrix& X, const SymMatrix& A, const SymMatrix& R) {
    const StorageMode mode = common_mode(X, A);
    SymMatrix G = matmul(A, R, mode);
    SymMatrix AG = matmul(A, G, mode);
    const double c1 = frob_inner(R, AG);
    const double c2 = frob_inner(AG, AG);
    if (c2 <= kUnderflow) throw StepUndefined("step_cauchyfro: <AG,AG> underflows");
    const double alpha = c1 / c2;
    ResidualStep out;
    if (mode == StorageMode::sparse) {
        out.X = SymMatrix(csc_add(1.0, X.csc(), alpha, G.csc()));
        CscMatrix AX = sparse_matmul(A.csc(), out.X.csc());
        out.R = SymMatrix(csc_add_identity(csc_scale(AX, -1.0), 1.0));
    } else {
        DenseMatrix x = X.to_dense().dense();
        const DenseMatrix g = G.to_dense().dense();
        for (std::size_t t = 0; t < x.a.size(); ++t) x.a[t] += alpha * g.a[t];
        out.X = SymMatrix(std::move(x));
        DenseMatrix AX = dense_matmul(A.to_dense().dense(), out.X.dense());
        for (double& v : AX.a) v = -v;
        for (int i = 0; i < AX.n; ++i) AX(i, i) += 1.0;
        out.R = SymMatrix(std::move(AX));
    }
    out.record = make_record(out.X, A, alpha, 1.0);
    return out;
}

ResidualStep step_minres(const SymMatrix& X, const SymMatrix& A, const SymMatrix& R) {
    const StorageMode mode = common_mode(X, A);
    SymMatrix AR = matmul(A, R, mode);
    const double c1 = frob_inner(R, AR);
    const double c2 = frob_inner(AR, AR);
    if (c2 <= kUnderflow) throw StepUndefined("step_minres: <AR,AR> underflows");
    const double alpha = c1 / c2;
    ResidualStep out;
    if (mode == StorageMode::sparse) {
        out.X = SymMatrix(csc_add(1.0, X.csc(), alpha, R.csc()));
        out.R = SymMatrix(csc_add(1.0, R.csc(), -alpha, AR.csc()));
    } else {
        DenseMatrix x = X.to_dense().dense();
        const DenseMatrix r = R.to_dense().dense();
        const DenseMatrix ar = AR.to_dense().dense();
        DenseMatrix rn = r;
        for (std::size_t t = 0; t < x.a.size(); ++t) {
            x.a[t] += alpha * r.a[t];
            rn.a[t] -= alpha * ar.a[t];
        }
        out.X = SymMatrix(std::move(x));
        out.R = SymMatrix(std::move(rn));
    }
    out.record = make_record(out.X, A, alpha, 1.0);
    return out;
}

SparseColumn drop_column(const SparseColumn& col, int diag_index, double thr, int lfil) {
    double diag_val = 0.0;
    bool have_diag = false;
    double maxoff = 0.0;
    for (std::size_t t = 0; t < col.rows.size(); ++t) {
        if (col.rows[t] == diag_index) {
            diag_val = col.vals[t];
            have_diag = true;
        } else {
            maxoff = std::max(maxoff, std::abs(col.vals[t]));
        }
    }
    const double cutoff = thr * maxoff;
    struct Cand {
        double mag;
        int row;
        double val;
    };
    std::vector<Cand> cand;
    cand.reserve(col.rows.size());
    for (std::size_t t = 0; t < col.rows.size(); ++t) {
        if (col.rows[t] == diag_index) continue;
        const double mag = std::abs(col.vals[t]);
        if (mag > cutoff) cand.push_back({mag, col.rows[t], col.vals[t]});
    }
    // ties at equal magnitude keep the smaller row index
    std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        return a.row < b.row;
    });
    if (static_cast<int>(cand.size()) > lfil) cand.resize(static_cast<std::size_t>(lfil));
    std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.row < b.row; });

    SparseColumn out;
    out.rows.reserve(cand.size() + 1);
    out.vals.reserve(cand.size() + 1);
    bool diag_emitted = false;
    for (const Cand& c : cand) {
        if (have_diag && !diag_emitted && diag_index < c.row) {
            out.rows.push_back(diag_index);
            out.vals.push_back(diag_val);
            diag_emitted = true;
        }
        out.rows.push_back(c.row);
        out.vals.push_back(c.val);
    }
    if (have_diag && !diag_emitted) {
        out.rows.push_back(diag_index);
        out.vals.push_back(diag_val);
    }
    return out;
}

} // namespace cosprec
