#pragma once

#include "glassfrac/sparse.hpp"

#include <string>

namespace glassfrac {

struct BoundSolveOptions {
    double kkt_tolerance = 1e-8;
    int max_active_set_iterations = 100;
    int max_newton_iterations = 200;
};

struct BoundSolveResult {
    int iterations = 0;
    bool converged = false;
    std::string method;
    double kkt_residual = 0.0;
    std::size_t active_lower = 0;
    std::size_t active_upper = 0;
};

/// Relative KKT residual of min 1/2 x'Ax - b'x subject to lower <= x <= upper.
double kkt_residual(const SparseMatrix& a, const Vector& b, const Vector& lower, const Vector& upper, const Vector& x);

/// Box-constrained convex quadratic solver. Primal-dual active set first; a projected Newton
/// iteration takes over if the active set cycles. Keeps its factorization between calls.
class BoundConstrainedSolver {
public:
    BoundSolveResult solve(const SparseMatrix& a, const Vector& b, const Vector& lower, const Vector& upper,
                           Vector& x, const BoundSolveOptions& options = {});

private:
    bool solve_reduced(const SparseMatrix& a, const Vector& b, const std::vector<char>& fixed,
                       const Vector& fixed_values, Vector& x);
    SparseMatrix work_;
    SymmetricFactorization factor_;
};

}  // namespace glassfrac
