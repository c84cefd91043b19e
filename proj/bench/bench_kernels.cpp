#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"

using namespace cosprec;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

DenseMatrix random_dense(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DenseMatrix M(n);
    for (double& v : M.a) v = rng.uniform01() - 0.5;
    return M;
}

double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
    double m = 0.0;
    for (std::size_t t = 0; t < A.a.size(); ++t)
        m = std::max(m, std::abs(A.a[t] - B.a[t]));
    return m;
}

void bench_dense(int n, int threads, int reps) {
    const DenseMatrix A = random_dense(n, 1);
    const DenseMatrix B = random_dense(n, 2);
    DenseMatrix C1(n), C2(n);

    double t_serial = 1e300, t_omp = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        dense_matmul_serial(A, B, C1);
        t_serial = std::min(t_serial, now_s() - t0);
    }
    set_threads(threads);
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        dense_matmul_omp(A, B, C2);
        t_omp = std::min(t_omp, now_s() - t0);
    }
    const double flops = 2.0 * n * double(n) * n;
    std::printf("dense n=%-5d serial %7.1f ms (%5.2f GF/s)   omp[%d] %7.1f ms (%5.2f GF/s)   "
                "speedup %.2fx   max|diff| %.1e\n",
                n, t_serial * 1e3, flops / t_serial * 1e-9, threads, t_omp * 1e3,
                flops / t_omp * 1e-9, t_serial / t_omp, max_abs_diff(C1, C2));
}

void bench_sparse(int N, int threads, int reps) {
    MatrixKind kind{MatrixTag::poisson2d, N, 0};
    const SymMatrix A = generate(kind).to_sparse();
    const CscMatrix& S = A.csc();

    double t_serial = 1e300, t_omp = 1e300;
    CscMatrix C1, C2;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        C1 = sparse_matmul_serial(S, S);
        t_serial = std::min(t_serial, now_s() - t0);
    }
    set_threads(threads);
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        C2 = sparse_matmul_omp(S, S);
        t_omp = std::min(t_omp, now_s() - t0);
    }
    bool same = C1.nnz() == C2.nnz();
    if (same)
        for (std::int64_t t = 0; t < C1.nnz(); ++t)
            if (C1.rowind[t] != C2.rowind[t] || C1.val[t] != C2.val[t]) {
                same = false;
                break;
            }
    std::printf("sparse poisson2d(%d) n=%-6d serial %7.1f ms   omp[%d] %7.1f ms   "
                "speedup %.2fx   identical %s\n",
                N, S.n, t_serial * 1e3, threads, t_omp * 1e3, t_serial / t_omp,
                same ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    int threads = 4;
    int reps = 3;
    if (argc > 1) threads = std::atoi(argv[1]);
    if (argc > 2) reps = std::atoi(argv[2]);
    std::printf("kernel benchmark, serial reference vs OpenMP (best of %d)\n", reps);
    for (int n : {256, 512, 1024, 2048}) bench_dense(n, threads, reps);
    for (int N : {50, 100, 200}) bench_sparse(N, threads, reps);
    return 0;
}
