#pragma once

#include <optional>
#include <vector>

#include "cosprec/sym_matrix.hpp"

namespace cosprec {

struct SpectrumReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::optional<double> cond_ratio; // empty when XA is not positive definite
    double fill_percent = 0.0;
    bool spd = false;
};

inline constexpr int kDenseEigThreshold = 2000;

// Extreme eigenvalues of a symmetric M. Inputs that are only near-symmetric
// (|M - M'| <= 1e-2*|M|, the drift a dropped preconditioner's product with A
// legitimately carries) are symmetrized first; worse asymmetry is an error.
// n <= exact_threshold runs a full symmetric eigensolve; larger n runs
// Lanczos with full reorthogonalization (200 steps max, residual tolerance
// 1e-8*|M|_F), throwing NotConverged when the budget runs out.
std::pair<double, double> spectrum_interval(const SymMatrix& M,
                                            int exact_threshold = kDenseEigThreshold);

// All eigenvalues, dense path only (n <= exact_threshold required).
std::vector<double> full_spectrum(const SymMatrix& M,
                                  int exact_threshold = kDenseEigThreshold);

// kappa1(XA)/kappa1(A) where kappa1(M) = |M|_1 |M^-1|_1 is the 1-norm
// condition number. Both factors use an exact dense inverse, so this is
// O(n^3). Returns nullopt when the symmetrized XA is not positive definite.
std::optional<double> cond_ratio(const SymMatrix& X, const SymMatrix& A);

double fill_percent(const SymMatrix& X);

// Full report for a preconditioner: spectrum of sym(XA), SPD flag,
// 1-norm condition ratio, fill of X.
SpectrumReport analyze_preconditioner(const SymMatrix& X, const SymMatrix& A,
                                      int exact_threshold = kDenseEigThreshold);

// Dense symmetric eigensolve on a SymMatrix (used by tests and the CLI
// eigenvalue dump); values ascending.
std::vector<double> dense_eigenvalues(const SymMatrix& M);

double one_norm(const SymMatrix& M);
double inverse_one_norm(const SymMatrix& M); // via dense LU

} // namespace cosprec
