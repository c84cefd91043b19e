#pragma once

#include <utility>

#include "cosprec/sym_matrix.hpp"

namespace cosprec {

enum class StorageMode { dense, sparse };

// <A,B> = trace(B^T A) = sum_ij a_ij b_ij
double frob_inner(const SymMatrix& A, const SymMatrix& B);
double frob_inner(const DenseMatrix& A, const DenseMatrix& B);
double frob_inner(const CscMatrix& A, const CscMatrix& B);

double frob_norm(const SymMatrix& A);
double frob_norm(const DenseMatrix& A);
double frob_norm(const CscMatrix& A);

// cos(A,B) = <A,B>/(|A||B|); ZeroMatrix if either norm underflows.
double cosine(const SymMatrix& A, const SymMatrix& B);

SymMatrix matmul(const SymMatrix& X, const SymMatrix& A, StorageMode mode);

// X = s*sqrt(n)*Z/|ZA|_F with s = +1 if trace(ZA) >= 0, else -1.
// Ties at exactly zero trace take s = +1 (the T-feasible sign).
std::pair<SymMatrix, double> scale_to_S(const SymMatrix& Z, const SymMatrix& A);

double trace(const SymMatrix& A);

} // namespace cosprec
