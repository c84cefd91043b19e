#include "cosprec/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cosprec/errors.hpp"

namespace cosprec {

namespace {
std::atomic<int> g_threads{1};

void check_square_match(int an, int bn) {
    if (an != bn) throw DimensionMismatch("matmul operands differ in size");
}
} // namespace

void set_threads(int k) { g_threads.store(k < 1 ? 1 : k); }
int get_threads() { return g_threads.load(); }

// Reference kernel: i-k-j order, each C(i,j) accumulates over ascending k.
void dense_matmul_serial(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& C) {
    check_square_match(A.n, B.n);
    const int n = A.n;
    C = DenseMatrix(n);
    const double* a = A.a.data();
    const double* b = B.a.data();
    double* c = C.a.data();
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * n;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b + static_cast<std::size_t>(k) * n;
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
}

// Blocked over (k, j) for cache reuse and parallel over rows. Each C(i,j)
// still accumulates over ascending k, so the result matches the serial
// kernel bit for bit.
void dense_matmul_omp(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& C) {
    check_square_match(A.n, B.n);
    const int n = A.n;
    C = DenseMatrix(n);
    const double* a = A.a.data();
    const double* b = B.a.data();
    double* c = C.a.data();
    constexpr int KB = 128;
    constexpr int JB = 512;
    const int nthreads = get_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * n;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int j0 = 0; j0 < n; j0 += JB) {
            const int j1 = std::min(j0 + JB, n);
            for (int k0 = 0; k0 < n; k0 += KB) {
                const int k1 = std::min(k0 + KB, n);
                for (int k = k0; k < k1; ++k) {
                    const double aik = arow[k];
                    if (aik == 0.0) continue;
                    const double* brow = b + static_cast<std::size_t>(k) * n;
                    for (int j = j0; j < j1; ++j) crow[j] += aik * brow[j];
                }
            }
        }
    }
    (void)nthreads;
}

DenseMatrix dense_matmul(const DenseMatrix& A, const DenseMatrix& B) {
    DenseMatrix C;
    dense_matmul_omp(A, B, C);
    return C;
}

namespace {

// One output column of A*B via a sparse accumulator.
void spmm_column(const CscMatrix& A, const CscMatrix& B, int j,
                 std::vector<double>& acc, std::vector<int>& touched,
                 std::vector<int>& outr, std::vector<double>& outv) {
    touched.clear();
    for (std::int64_t t = B.colptr[j]; t < B.colptr[j + 1]; ++t) {
        const int k = B.rowind[t];
        const double bkj = B.val[t];
        for (std::int64_t s = A.colptr[k]; s < A.colptr[k + 1]; ++s) {
            const int i = A.rowind[s];
            if (acc[i] == 0.0) touched.push_back(i);
            acc[i] += A.val[s] * bkj;
        }
    }
    std::sort(touched.begin(), touched.end());
    outr.clear();
    outv.clear();
    for (int i : touched) {
        const double v = acc[i];
        acc[i] = 0.0;
        if (v != 0.0) { // prune exact zeros, including cancellations
            outr.push_back(i);
            outv.push_back(v);
        }
    }
}

} // namespace

CscMatrix sparse_matmul_serial(const CscMatrix& A, const CscMatrix& B) {
    check_square_match(A.n, B.n);
    const int n = A.n;
    CscMatrix C(n);
    std::vector<double> acc(n, 0.0);
    std::vector<int> touched, outr;
    std::vector<double> outv;
    for (int j = 0; j < n; ++j) {
        spmm_column(A, B, j, acc, touched, outr, outv);
        C.rowind.insert(C.rowind.end(), outr.begin(), outr.end());
        C.val.insert(C.val.end(), outv.begin(), outv.end());
        C.colptr[j + 1] = static_cast<std::int64_t>(C.rowind.size());
    }
    return C;
}

CscMatrix sparse_matmul_omp(const CscMatrix& A, const CscMatrix& B) {
    check_square_match(A.n, B.n);
    const int n = A.n;
    const int nthreads = get_threads();
    if (nthreads <= 1) return sparse_matmul_serial(A, B);

    std::vector<std::vector<int>> rows(n);
    std::vector<std::vector<double>> vals(n);
#ifdef _OPENMP
#pragma omp parallel num_threads(nthreads)
#endif
    {
        std::vector<double> acc(n, 0.0);
        std::vector<int> touched, outr;
        std::vector<double> outv;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
        for (int j = 0; j < n; ++j) {
            spmm_column(A, B, j, acc, touched, outr, outv);
            rows[j] = outr;
            vals[j] = outv;
        }
    }
    CscMatrix C(n);
    std::int64_t total = 0;
    for (int j = 0; j < n; ++j) total += static_cast<std::int64_t>(rows[j].size());
    C.rowind.reserve(total);
    C.val.reserve(total);
    for (int j = 0; j < n; ++j) {
        C.rowind.insert(C.rowind.end(), rows[j].begin(), rows[j].end());
        C.val.insert(C.val.end(), vals[j].begin(), vals[j].end());
        C.colptr[j + 1] = static_cast<std::int64_t>(C.rowind.size());
    }
    return C;
}

CscMatrix sparse_matmul(const CscMatrix& A, const CscMatrix& B) {
    return sparse_matmul_omp(A, B);
}

void sparse_matvec(const CscMatrix& A, const double* x, double* y) {
    const int n = A.n;
    std::memset(y, 0, sizeof(double) * static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        for (std::int64_t t = A.colptr[j]; t < A.colptr[j + 1]; ++t)
            y[A.rowind[t]] += A.val[t] * xj;
    }
}

void dense_matvec(const DenseMatrix& A, const double* x, double* y) {
    const int n = A.n;
    for (int i = 0; i < n; ++i) {
        const double* row = A.a.data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

double dot_kahan(const double* a, const double* b, std::int64_t len) {
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        const double term = a[i] * b[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

double sumsq_kahan(const double* a, std::int64_t len) {
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        const double term = a[i] * a[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

} // namespace cosprec
