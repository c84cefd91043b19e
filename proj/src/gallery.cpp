#include "cosprec/gallery.hpp"

#include <array>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cosprec/errors.hpp"

namespace cosprec {

int kind_dimension(const MatrixKind& kind) {
    if (kind.param < 1) throw InvalidParam("gallery parameter must be >= 1");
    const std::int64_t N = kind.param;
    std::int64_t n = 0;
    switch (kind.tag) {
        case MatrixTag::poisson2d: n = N * N; break;
        case MatrixTag::poisson3d: n = N * N * N; break;
        case MatrixTag::lehmer:
        case MatrixTag::minij:
        case MatrixTag::moler: n = N; break;
        case MatrixTag::wathen: n = 3 * N * N + 4 * N + 1; break;
    }
    if (n > (1 << 30)) throw InvalidParam("gallery dimension too large");
    return static_cast<int>(n);
}

MatrixTag parse_tag(const std::string& name) {
    if (name == "poisson2d") return MatrixTag::poisson2d;
    if (name == "poisson3d") return MatrixTag::poisson3d;
    if (name == "lehmer") return MatrixTag::lehmer;
    if (name == "minij") return MatrixTag::minij;
    if (name == "moler") return MatrixTag::moler;
    if (name == "wathen") return MatrixTag::wathen;
    throw InvalidParam("unknown matrix kind: " + name);
}

namespace {

SymMatrix make_poisson2d(int N) {
    const int n = N * N;
    CscMatrix m(n);
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(5ull * n);
    cols.reserve(5ull * n);
    vals.reserve(5ull * n);
    auto id = [N](int i, int j) { return i * N + j; };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const int c = id(i, j);
            rows.push_back(c);
            cols.push_back(c);
            vals.push_back(4.0);
            const int di[4] = {-1, 1, 0, 0};
            const int dj[4] = {0, 0, -1, 1};
            for (int t = 0; t < 4; ++t) {
                const int ii = i + di[t], jj = j + dj[t];
                if (ii >= 0 && ii < N && jj >= 0 && jj < N) {
                    rows.push_back(id(ii, jj));
                    cols.push_back(c);
                    vals.push_back(-1.0);
                }
            }
        }
    return SymMatrix(CscMatrix::from_triplets(n, rows, cols, vals));
}

SymMatrix make_poisson3d(int N) {
    const int n = N * N * N;
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(7ull * n);
    cols.reserve(7ull * n);
    vals.reserve(7ull * n);
    auto id = [N](int i, int j, int k) { return (i * N + j) * N + k; };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const int c = id(i, j, k);
                rows.push_back(c);
                cols.push_back(c);
                vals.push_back(6.0);
                const int d[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                     {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
                for (auto& dv : d) {
                    const int ii = i + dv[0], jj = j + dv[1], kk = k + dv[2];
                    if (ii >= 0 && ii < N && jj >= 0 && jj < N && kk >= 0 && kk < N) {
                        rows.push_back(id(ii, jj, kk));
                        cols.push_back(c);
                        vals.push_back(-1.0);
                    }
                }
            }
    return SymMatrix(CscMatrix::from_triplets(n, rows, cols, vals));
}

SymMatrix make_lehmer(int N) {
    DenseMatrix m(N);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j)
            m(i - 1, j - 1) = static_cast<double>(std::min(i, j)) / std::max(i, j);
    return SymMatrix(std::move(m));
}

SymMatrix make_minij(int N) {
    DenseMatrix m(N);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j) m(i - 1, j - 1) = std::min(i, j);
    return SymMatrix(std::move(m));
}

SymMatrix make_moler(int N) {
    // A = U'U with U unit upper triangular filled with alpha; entrywise
    // a_ii = 1 + (i-1) alpha^2, a_ij = alpha + (min(i,j)-1) alpha^2.
    constexpr double alpha = 0.1;
    DenseMatrix m(N);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j)
            m(i - 1, j - 1) = (i == j) ? 1.0 + (i - 1) * alpha * alpha
                                       : alpha + (std::min(i, j) - 1) * alpha * alpha;
    return SymMatrix(std::move(m));
}

SymMatrix make_wathen(int N, std::uint64_t seed) {
    static const double e1[4][4] = {{6, -6, 2, -8}, {-6, 32, -6, 20}, {2, -6, 6, -6}, {-8, 20, -6, 32}};
    static const double e2[4][4] = {{3, -8, 2, -6}, {-8, 16, -8, 20}, {2, -8, 3, -8}, {-6, 20, -8, 16}};
    double e[8][8];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            e[a][b] = e1[a][b] / 45.0;
            e[a][b + 4] = e2[a][b] / 45.0;
            e[a + 4][b] = e2[b][a] / 45.0;
            e[a + 4][b + 4] = e1[a][b] / 45.0;
        }
    const int nx = N, ny = N;
    const int n = 3 * nx * ny + 2 * nx + 2 * ny + 1;
    SplitMix64 rng(seed);
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(64ull * nx * ny);
    cols.reserve(64ull * nx * ny);
    vals.reserve(64ull * nx * ny);
    for (int j = 1; j <= ny; ++j)
        for (int i = 1; i <= nx; ++i) {
            int nn[8];
            nn[0] = 3 * j * nx + 2 * i + 2 * j + 1;
            nn[1] = nn[0] - 1;
            nn[2] = nn[1] - 1;
            nn[3] = (3 * j - 1) * nx + 2 * j + i - 1;
            nn[4] = 3 * (j - 1) * nx + 2 * i + 2 * j - 3;
            nn[5] = nn[4] + 1;
            nn[6] = nn[5] + 1;
            nn[7] = nn[3] + 1;
            const double rho = rng.uniform01();
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b) {
                    rows.push_back(nn[a] - 1);
                    cols.push_back(nn[b] - 1);
                    vals.push_back(e[a][b] * rho);
                }
        }
    return SymMatrix(CscMatrix::from_triplets(n, rows, cols, vals));
}

} // namespace

SymMatrix generate(const MatrixKind& kind) {
    if (kind.param < 1) throw InvalidParam("gallery parameter must be >= 1");
    switch (kind.tag) {
        case MatrixTag::poisson2d: return make_poisson2d(kind.param);
        case MatrixTag::poisson3d: return make_poisson3d(kind.param);
        case MatrixTag::lehmer: return make_lehmer(kind.param);
        case MatrixTag::minij: return make_minij(kind.param);
        case MatrixTag::moler: return make_moler(kind.param);
        case MatrixTag::wathen: return make_wathen(kind.param, kind.seed);
    }
    throw InvalidParam("unknown matrix kind");
}

SymMatrix mm_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        if (banner != "%%MatrixMarket") throw ParseError("missing MatrixMarket banner");
        for (auto* s : {&object, &format, &field, &symmetry})
            for (char& c : *s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (object != "matrix" || format != "coordinate")
            throw ParseError("only coordinate matrices are supported");
        if (field != "real")
            throw ParseError("only real-valued matrices are supported");
        if (symmetry != "symmetric")
            throw NotSymmetric("matrix header is '" + symmetry + "', expected symmetric");
    }
    // comments, then the size line
    long rows = 0, colsn = 0;
    long long entries = 0;
    for (;;) {
        if (!std::getline(in, line)) throw ParseError("missing size line");
        if (!line.empty() && line[0] == '%') continue;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> colsn >> entries)) throw ParseError("malformed size line");
        break;
    }
    if (rows != colsn) throw NotSymmetric("matrix is not square");
    if (rows < 1) throw ParseError("empty matrix");
    const int n = static_cast<int>(rows);

    std::vector<int> ri, ci;
    std::vector<double> vv;
    ri.reserve(2 * entries);
    ci.reserve(2 * entries);
    vv.reserve(2 * entries);
    long long seen = 0;
    while (seen < entries) {
        if (!std::getline(in, line)) throw ParseError("unexpected end of file");
        if (line.empty() || line[0] == '%' ||
            line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        long i = 0, j = 0;
        double v = 0.0;
        std::istringstream ss(line);
        if (!(ss >> i >> j >> v)) throw ParseError("malformed entry line: " + line);
        if (i < 1 || j < 1 || i > rows || j > rows)
            throw IndexOutOfRange("entry index outside matrix");
        if (j > i)
            throw ParseError("symmetric file stores the lower triangle; found entry above the diagonal");
        ++seen;
        ri.push_back(static_cast<int>(i - 1));
        ci.push_back(static_cast<int>(j - 1));
        vv.push_back(v);
        if (i != j) { // expand to the upper triangle
            ri.push_back(static_cast<int>(j - 1));
            ci.push_back(static_cast<int>(i - 1));
            vv.push_back(v);
        }
    }
    return SymMatrix(CscMatrix::from_triplets(n, ri, ci, vv));
}

void mm_write(const SymMatrix& A, const std::string& path) {
    const int n = A.n();
    const CscMatrix m = A.is_sparse() ? A.csc() : CscMatrix::from_dense(A.dense());
    std::int64_t lower = 0;
    for (int j = 0; j < n; ++j)
        for (std::int64_t t = m.colptr[j]; t < m.colptr[j + 1]; ++t)
            if (m.rowind[t] >= j) ++lower;
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "%%%%MatrixMarket matrix coordinate real symmetric\n");
    std::fprintf(f, "%d %d %" PRId64 "\n", n, n, lower);
    for (int j = 0; j < n; ++j)
        for (std::int64_t t = m.colptr[j]; t < m.colptr[j + 1]; ++t)
            if (m.rowind[t] >= j)
                std::fprintf(f, "%d %d %.17g\n", m.rowind[t] + 1, j + 1, m.val[t]);
    if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

} // namespace cosprec
