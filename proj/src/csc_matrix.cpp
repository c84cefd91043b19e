#include "cosprec/csc_matrix.hpp"

#include <algorithm>
#include <numeric>

namespace cosprec {

double CscMatrix::at(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n) throw IndexOutOfRange("CscMatrix::at");
    const auto lo = rowind.begin() + colptr[j];
    const auto hi = rowind.begin() + colptr[j + 1];
    const auto it = std::lower_bound(lo, hi, i);
    if (it == hi || *it != i) return 0.0;
    return val[static_cast<std::size_t>(it - rowind.begin())];
}

DenseMatrix CscMatrix::to_dense() const {
    DenseMatrix d(n);
    for (int j = 0; j < n; ++j)
        for (std::int64_t t = colptr[j]; t < colptr[j + 1]; ++t)
            d(rowind[t], j) = val[t];
    return d;
}

CscMatrix CscMatrix::from_dense(const DenseMatrix& d) {
    CscMatrix m(d.n);
    for (int j = 0; j < d.n; ++j) {
        for (int i = 0; i < d.n; ++i) {
            const double v = d(i, j);
            if (v != 0.0) {
                m.rowind.push_back(i);
                m.val.push_back(v);
            }
        }
        m.colptr[j + 1] = static_cast<std::int64_t>(m.rowind.size());
    }
    return m;
}

CscMatrix CscMatrix::from_triplets(int n, const std::vector<int>& rows,
                                   const std::vector<int>& cols,
                                   const std::vector<double>& vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw InvalidParam("triplet arrays differ in length");
    const std::size_t m = rows.size();
    for (std::size_t t = 0; t < m; ++t)
        if (rows[t] < 0 || rows[t] >= n || cols[t] < 0 || cols[t] >= n)
            throw IndexOutOfRange("triplet index outside matrix");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cols[a] != cols[b]) return cols[a] < cols[b];
        return rows[a] < rows[b];
    });

    CscMatrix out(n);
    int curc = -1, curr = -1;
    for (std::size_t t : order) {
        const int c = cols[t], r = rows[t];
        if (c == curc && r == curr) {
            out.val.back() += vals[t]; // duplicate: accumulate
            continue;
        }
        while (curc < c) out.colptr[++curc] = static_cast<std::int64_t>(out.rowind.size());
        out.rowind.push_back(r);
        out.val.push_back(vals[t]);
        curr = r;
    }
    while (curc < n) out.colptr[++curc] = static_cast<std::int64_t>(out.rowind.size());

    // prune zeros (including summed cancellations)
    CscMatrix pruned(n);
    for (int j = 0; j < n; ++j) {
        for (std::int64_t t = out.colptr[j]; t < out.colptr[j + 1]; ++t)
            if (out.val[t] != 0.0) {
                pruned.rowind.push_back(out.rowind[t]);
                pruned.val.push_back(out.val[t]);
            }
        pruned.colptr[j + 1] = static_cast<std::int64_t>(pruned.rowind.size());
    }
    return pruned;
}

CscMatrix csc_transpose(const CscMatrix& m) {
    const int n = m.n;
    CscMatrix t(n);
    std::vector<std::int64_t> count(static_cast<std::size_t>(n) + 1, 0);
    for (int r : m.rowind) ++count[static_cast<std::size_t>(r) + 1];
    for (int i = 0; i < n; ++i) count[i + 1] += count[i];
    t.colptr = count;
    t.rowind.resize(m.rowind.size());
    t.val.resize(m.val.size());
    std::vector<std::int64_t> next(count.begin(), count.end() - 1);
    for (int j = 0; j < n; ++j)
        for (std::int64_t s = m.colptr[j]; s < m.colptr[j + 1]; ++s) {
            const std::int64_t pos = next[m.rowind[s]]++;
            t.rowind[pos] = j;
            t.val[pos] = m.val[s];
        }
    return t;
}

CscMatrix csc_add(double a, const CscMatrix& A, double b, const CscMatrix& B) {
    if (A.n != B.n) throw DimensionMismatch("csc_add operands differ in size");
    const int n = A.n;
    CscMatrix out(n);
    for (int j = 0; j < n; ++j) {
        std::int64_t ta = A.colptr[j], ea = A.colptr[j + 1];
        std::int64_t tb = B.colptr[j], eb = B.colptr[j + 1];
        while (ta < ea || tb < eb) {
            int r;
            double v;
            if (tb >= eb || (ta < ea && A.rowind[ta] < B.rowind[tb])) {
                r = A.rowind[ta];
                v = a * A.val[ta++];
            } else if (ta >= ea || B.rowind[tb] < A.rowind[ta]) {
                r = B.rowind[tb];
                v = b * B.val[tb++];
            } else {
                r = A.rowind[ta];
                v = a * A.val[ta++] + b * B.val[tb++];
            }
            if (v != 0.0) {
                out.rowind.push_back(r);
                out.val.push_back(v);
            }
        }
        out.colptr[j + 1] = static_cast<std::int64_t>(out.rowind.size());
    }
    return out;
}

CscMatrix csc_scale(const CscMatrix& A, double s) {
    CscMatrix out = A;
    for (double& v : out.val) v *= s;
    if (s == 0.0) return CscMatrix(A.n);
    return out;
}

CscMatrix csc_add_identity(const CscMatrix& A, double s) {
    return csc_add(1.0, A, s, csc_identity(A.n));
}

CscMatrix csc_identity(int n) {
    CscMatrix m(n);
    m.rowind.resize(n);
    m.val.assign(n, 1.0);
    for (int j = 0; j < n; ++j) {
        m.rowind[j] = j;
        m.colptr[j + 1] = j + 1;
    }
    return m;
}

double csc_trace(const CscMatrix& A) {
    double t = 0.0;
    for (int j = 0; j < A.n; ++j)
        for (std::int64_t s = A.colptr[j]; s < A.colptr[j + 1]; ++s)
            if (A.rowind[s] == j) t += A.val[s];
    return t;
}

} // namespace cosprec
