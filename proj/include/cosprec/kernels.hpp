#pragma once

#include "cosprec/csc_matrix.hpp"
#include "cosprec/dense_matrix.hpp"

namespace cosprec {

// Global thread count for the parallel kernels (default 1, see COSPREC_THREADS).
void set_threads(int k);
int get_threads();

// C = A*B, straightforward O(n^3). The serial kernel is the reference;
// the blocked/OpenMP kernel accumulates each C(i,j) in the same k order,
// so both produce identical results.
void dense_matmul_serial(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& C);
void dense_matmul_omp(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& C);
DenseMatrix dense_matmul(const DenseMatrix& A, const DenseMatrix& B);

// C = A*B in CSC with a sparse accumulator per output column.
CscMatrix sparse_matmul_serial(const CscMatrix& A, const CscMatrix& B);
CscMatrix sparse_matmul_omp(const CscMatrix& A, const CscMatrix& B);
CscMatrix sparse_matmul(const CscMatrix& A, const CscMatrix& B);

// y = A*x (CSC column sweep).
void sparse_matvec(const CscMatrix& A, const double* x, double* y);
void dense_matvec(const DenseMatrix& A, const double* x, double* y);

// Compensated (Kahan) sums keep Frobenius invariants testable at 1e-10.
double dot_kahan(const double* a, const double* b, std::int64_t len);
double sumsq_kahan(const double* a, std::int64_t len);

} // namespace cosprec
