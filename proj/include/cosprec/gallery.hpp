#pragma once

#include <cstdint>
#include <string>

#include "cosprec/sym_matrix.hpp"

namespace cosprec {

enum class MatrixTag { poisson2d, poisson3d, lehmer, minij, moler, wathen };

struct MatrixKind {
    MatrixTag tag;
    int param = 1;              // grid/size parameter N
    std::uint64_t seed = 0;     // wathen only
};

// Dimension of generate(kind): poisson2d N^2, poisson3d N^3,
// lehmer/minij/moler N, wathen 3N^2+4N+1.
int kind_dimension(const MatrixKind& kind);

MatrixTag parse_tag(const std::string& name); // InvalidParam on unknown

// Stencil and formula matrices are exact; wathen uses a seeded splitmix64
// stream for its per-element density factors.
SymMatrix generate(const MatrixKind& kind);

// Matrix Market coordinate real symmetric I/O. Reading expands the stored
// triangle; a "general" header is rejected as NotSymmetric.
SymMatrix mm_read(const std::string& path);
void mm_write(const SymMatrix& A, const std::string& path);

// splitmix64 PRNG; uniform01 maps the top 53 bits into [0,1).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace cosprec
