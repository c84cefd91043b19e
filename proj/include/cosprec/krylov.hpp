#pragma once

#include <vector>

#include "cosprec/sym_matrix.hpp"

namespace cosprec {

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history; // |b - Ax|_2 per iteration (entry 0 is the initial residual)
    bool converged = false;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

// Plain conjugate gradient; stops at |b - Ax| <= tol*|b|.
// Breakdown when p'Ap <= 0 (non-SPD input).
SolveResult cg(const SymMatrix& A, const std::vector<double>& b, double tol, int max_iter);

// Preconditioned CG with the approximate inverse applied as z = X*r.
// Breakdown when r'z <= 0 (X not positive definite).
SolveResult pcg(const SymMatrix& A, const SymMatrix& X, const std::vector<double>& b,
                double tol, int max_iter);

std::vector<double> random_rhs(int n, std::uint64_t seed); // uniform(-1,1)

} // namespace cosprec
