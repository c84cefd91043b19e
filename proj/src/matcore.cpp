#include "cosprec/matcore.hpp"

#include <algorithm>
#include <cmath>

#include "cosprec/errors.hpp"
#include "cosprec/kernels.hpp"

namespace cosprec {

namespace {
constexpr double kUnderflow = 1e-300;
// Compensated sums above this element count (naive summation loses digits
// on the |XA|_F = sqrt(n) invariant for 4e4-sized matrices).
constexpr std::int64_t kKahanCutover = 10000;

double dot_plain(const double* a, const double* b, std::int64_t len) {
    double s = 0.0;
    for (std::int64_t i = 0; i < len; ++i) s += a[i] * b[i];
    return s;
}
} // namespace

double frob_inner(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.n != B.n) throw DimensionMismatch("frob_inner operands differ in size");
    const std::int64_t len = static_cast<std::int64_t>(A.a.size());
    if (len > kKahanCutover) return dot_kahan(A.a.data(), B.a.data(), len);
    return dot_plain(A.a.data(), B.a.data(), len);
}

double frob_inner(const CscMatrix& A, const CscMatrix& B) {
    if (A.n != B.n) throw DimensionMismatch("frob_inner operands differ in size");
    double sum = 0.0, comp = 0.0;
    for (int j = 0; j < A.n; ++j) {
        std::int64_t ta = A.colptr[j], ea = A.colptr[j + 1];
        std::int64_t tb = B.colptr[j], eb = B.colptr[j + 1];
        while (ta < ea && tb < eb) {
            if (A.rowind[ta] < B.rowind[tb]) {
                ++ta;
            } else if (B.rowind[tb] < A.rowind[ta]) {
                ++tb;
            } else {
                const double term = A.val[ta++] * B.val[tb++] - comp;
                const double next = sum + term;
                comp = (next - sum) - term;
                sum = next;
            }
        }
    }
    return sum;
}

double frob_inner(const SymMatrix& A, const SymMatrix& B) {
    if (A.n() != B.n()) throw DimensionMismatch("frob_inner operands differ in size");
    if (A.is_sparse() && B.is_sparse()) return frob_inner(A.csc(), B.csc());
    if (!A.is_sparse() && !B.is_sparse()) return frob_inner(A.dense(), B.dense());
    return frob_inner(A.to_dense().dense(), B.to_dense().dense());
}

double frob_norm(const DenseMatrix& A) {
    const std::int64_t len = static_cast<std::int64_t>(A.a.size());
    if (len > kKahanCutover) return std::sqrt(sumsq_kahan(A.a.data(), len));
    return std::sqrt(dot_plain(A.a.data(), A.a.data(), len));
}

double frob_norm(const CscMatrix& A) {
    return std::sqrt(sumsq_kahan(A.val.data(), static_cast<std::int64_t>(A.val.size())));
}

double frob_norm(const SymMatrix& A) {
    return A.is_sparse() ? frob_norm(A.csc()) : frob_norm(A.dense());
}

double cosine(const SymMatrix& A, const SymMatrix& B) {
    const double na = frob_norm(A);
    const double nb = frob_norm(B);
    if (na <= kUnderflow || nb <= kUnderflow)
        throw ZeroMatrix("cosine of a (numerically) zero matrix");
    // clamp roundoff spill so 1 - cosine stays in [0, 2]
    return std::clamp(frob_inner(A, B) / (na * nb), -1.0, 1.0);
}

SymMatrix matmul(const SymMatrix& X, const SymMatrix& A, StorageMode mode) {
    if (X.n() != A.n()) throw DimensionMismatch("matmul operands differ in size");
    if (mode == StorageMode::sparse)
        return SymMatrix(sparse_matmul(X.to_sparse().csc(), A.to_sparse().csc()));
    return SymMatrix(dense_matmul(X.to_dense().dense(), A.to_dense().dense()));
}

double trace(const SymMatrix& A) {
    if (A.is_sparse()) return csc_trace(A.csc());
    double t = 0.0;
    for (int i = 0; i < A.n(); ++i) t += A.dense()(i, i);
    return t;
}

std::pair<SymMatrix, double> scale_to_S(const SymMatrix& Z, const SymMatrix& A) {
    const StorageMode mode = (Z.is_sparse() && A.is_sparse()) ? StorageMode::sparse
                                                              : StorageMode::dense;
    SymMatrix ZA = matmul(Z, A, mode);
    const double nz = frob_norm(ZA);
    if (nz <= kUnderflow) throw DegenerateProduct("scale_to_S: |ZA| underflows");
    const double s = trace(ZA) >= 0.0 ? 1.0 : -1.0;
    const double factor = s * std::sqrt(static_cast<double>(Z.n())) / nz;
    if (Z.is_sparse()) return {SymMatrix(csc_scale(Z.csc(), factor)), s};
    DenseMatrix X = Z.dense();
    for (double& v : X.a) v *= factor;
    return {SymMatrix(std::move(X)), s};
}

} // namespace cosprec
