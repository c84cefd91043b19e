#pragma once

#include <cstdint>
#include <vector>

#include "cosprec/dense_matrix.hpp"
#include "cosprec/errors.hpp"

namespace cosprec {

// Compressed sparse column storage. Row indices are strictly increasing
// within each column and explicit zeros are pruned at construction.
struct CscMatrix {
    int n = 0;
    std::vector<std::int64_t> colptr; // size n+1
    std::vector<int> rowind;          // size nnz
    std::vector<double> val;          // size nnz

    CscMatrix() = default;
    explicit CscMatrix(int size) : n(size), colptr(static_cast<std::size_t>(size) + 1, 0) {}

    std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }

    double at(int i, int j) const;

    DenseMatrix to_dense() const;
    static CscMatrix from_dense(const DenseMatrix& d);

    // Builds from unordered triplets; duplicates are summed, zeros pruned.
    static CscMatrix from_triplets(int n, const std::vector<int>& rows,
                                   const std::vector<int>& cols,
                                   const std::vector<double>& vals);
};

CscMatrix csc_transpose(const CscMatrix& m);

// (a*A + b*B) with pattern merge; exact zeros pruned.
CscMatrix csc_add(double a, const CscMatrix& A, double b, const CscMatrix& B);

CscMatrix csc_scale(const CscMatrix& A, double s);

// A + s*I on the full diagonal.
CscMatrix csc_add_identity(const CscMatrix& A, double s);

CscMatrix csc_identity(int n);

double csc_trace(const CscMatrix& A);

} // namespace cosprec
