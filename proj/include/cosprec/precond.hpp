#pragma once

#include <string>
#include <vector>

#include "cosprec/matcore.hpp"
#include "cosprec/sym_matrix.hpp"

namespace cosprec {

enum class Method { cauchycos, mincos, cauchyfro, minres };

Method parse_method(const std::string& name); // InvalidParam on unknown
std::string method_name(Method m);

struct PrecondOptions {
    Method method = Method::mincos;
    double epsilon = 0.01;
    int max_iter = 1000;
    StorageMode mode = StorageMode::dense;
    double thr = 0.0;
    int lfil = 0;
    bool symmetrize_after_drop = true;
};

struct IterationRecord {
    int k = 0;
    double F = 0.0;
    double Phi = 0.0;
    double alpha = 0.0;
    double sign = 1.0;
    double elapsed = 0.0; // seconds since the start of the build
};

enum class Termination { converged, max_iter, stagnated };
std::string termination_name(Termination t);

struct PrecondResult {
    SymMatrix X;
    std::vector<IterationRecord> history; // record 0 is the initial state
    Termination termination = Termination::converged;
    int iterations = 0; // steps taken until the stopping rule fired
};

// F(X) = 1 - cos(XA, I), in [0, 2].
double F_value(const SymMatrix& X, const SymMatrix& A);

// Phi(X) = 0.5*|I - XA|_F^2 (unnormalized, as used by the stopping rule).
double phi_value(const SymMatrix& X, const SymMatrix& A);

// grad F(X) = (1/(|I| |XA|)) ((<XA,I>/|XA|^2) XA - I) A
SymMatrix grad_F(const SymMatrix& X, const SymMatrix& A);

// Exact minimizer of F(X + alpha D) in magnitude:
// alpha = |(<XA,I><XA,DA> - n<DA,I>) / (<DA,I><XA,DA> - <XA,I><DA,DA>)|.
// StepUndefined when the denominator underflows.
double optimal_step(const SymMatrix& X, const SymMatrix& A, const SymMatrix& D);

// Dhat = -(1/n)((<XA,I>/n) XA - I); satisfies Dhat*A = -grad F on S.
SymMatrix dhat_direction(const SymMatrix& X, const SymMatrix& A);

// One dense step of each method. These recompute products from scratch and
// exist for testing and exploration; build_preconditioner keeps running
// products instead.
std::pair<SymMatrix, IterationRecord> step_cauchycos(const SymMatrix& X, const SymMatrix& A);
std::pair<SymMatrix, IterationRecord> step_mincos(const SymMatrix& X, const SymMatrix& A);

struct ResidualStep {
    SymMatrix X;
    SymMatrix R;
    IterationRecord record;
};
ResidualStep step_cauchyfro(const SymMatrix& X, const SymMatrix& A, const SymMatrix& R);
ResidualStep step_minres(const SymMatrix& X, const SymMatrix& A, const SymMatrix& R);

// Numerical dropping for one column: the diagonal entry is always kept;
// among off-diagonal entries with |v| > thr*max|off-diagonal of the column|,
// at most lfil of largest magnitude survive (ties keep the smaller row).
struct SparseColumn {
    std::vector<int> rows;
    std::vector<double> vals;
};
SparseColumn drop_column(const SparseColumn& col, int diag_index, double thr, int lfil);

PrecondResult build_preconditioner(const SymMatrix& A, const PrecondOptions& opts);

} // namespace cosprec
