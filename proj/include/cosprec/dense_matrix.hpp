#pragma once

#include <cstdint>
#include <vector>

#include "cosprec/errors.hpp"

namespace cosprec {

// Row-major square matrix of doubles.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a; // n*n entries, a[i*n + j]

    DenseMatrix() = default;
    explicit DenseMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {
        if (size < 0) throw InvalidParam("matrix size must be nonnegative");
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static DenseMatrix identity(int size) {
        DenseMatrix m(size);
        for (int i = 0; i < size; ++i) m(i, i) = 1.0;
        return m;
    }

    std::int64_t count_nonzeros() const {
        std::int64_t cnt = 0;
        for (double v : a)
            if (v != 0.0) ++cnt;
        return cnt;
    }
};

} // namespace cosprec
