#pragma once

#include <utility>

#include "cosprec/csc_matrix.hpp"
#include "cosprec/dense_matrix.hpp"

namespace cosprec {

// A square real matrix in either dense or CSC storage. The name reflects the
// intended use: operands here are symmetric (or near-symmetric products of
// symmetric factors); storage itself does not enforce symmetry.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(DenseMatrix d) : n_(d.n), sparse_(false), dense_(std::move(d)) {}
    explicit SymMatrix(CscMatrix s) : n_(s.n), sparse_(true), csc_(std::move(s)) {}

    int n() const { return n_; }
    bool is_sparse() const { return sparse_; }

    const DenseMatrix& dense() const { return dense_; }
    const CscMatrix& csc() const { return csc_; }

    double at(int i, int j) const { return sparse_ ? csc_.at(i, j) : dense_(i, j); }

    std::int64_t count_nonzeros() const {
        return sparse_ ? csc_.nnz() : dense_.count_nonzeros();
    }

    SymMatrix to_dense() const {
        return sparse_ ? SymMatrix(csc_.to_dense()) : *this;
    }
    SymMatrix to_sparse() const {
        return sparse_ ? *this : SymMatrix(CscMatrix::from_dense(dense_));
    }

    static SymMatrix identity_like(const SymMatrix& m) {
        if (m.is_sparse()) return SymMatrix(csc_identity(m.n()));
        return SymMatrix(DenseMatrix::identity(m.n()));
    }

private:
    int n_ = 0;
    bool sparse_ = false;
    DenseMatrix dense_;
    CscMatrix csc_;
};

} // namespace cosprec
