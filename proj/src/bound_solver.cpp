#include "glassfrac/bound_solver.hpp"

#include "glassfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace glassfrac {

namespace {

bool same_pattern(const SparseMatrix& x, const SparseMatrix& y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.nonZeros() != y.nonZeros()) return false;
    if (!x.isCompressed() || !y.isCompressed()) return false;
    using Index = SparseMatrix::StorageIndex;
    return std::memcmp(x.outerIndexPtr(), y.outerIndexPtr(), sizeof(Index) * (x.cols() + 1)) == 0 &&
           std::memcmp(x.innerIndexPtr(), y.innerIndexPtr(), sizeof(Index) * x.nonZeros()) == 0;
}

double objective(const SparseMatrix& a, const Vector& b, const Vector& x)
{
    return 0.5 * x.dot(a * x) - b.dot(x);
}

Vector project(const Vector& x, const Vector& lower, const Vector& upper)
{
    return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

double kkt_residual(const SparseMatrix& a, const Vector& b, const Vector& lower, const Vector& upper, const Vector& x)
{
    const Vector ax = a * x;
    const Vector g = ax - b;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double r;
        if (x[i] < lower[i] || x[i] > upper[i]) r = std::numeric_limits<double>::infinity();
        else if (lower[i] == upper[i]) r = 0.0;
        else if (x[i] == lower[i]) r = std::max(0.0, -g[i]);
        else if (x[i] == upper[i]) r = std::max(0.0, g[i]);
        else r = std::abs(g[i]);
        worst = std::max(worst, r);
    }
    const double scale = std::max({b.lpNorm<Eigen::Infinity>(), ax.lpNorm<Eigen::Infinity>(), 1e-300});
    return worst / scale;
}

bool BoundConstrainedSolver::solve_reduced(const SparseMatrix& a, const Vector& b, const std::vector<char>& fixed,
                                           const Vector& fixed_values, Vector& x)
{
    if (same_pattern(work_, a))
        std::copy(a.valuePtr(), a.valuePtr() + a.nonZeros(), work_.valuePtr());
    else
        work_ = a;
    Vector rhs = b;
    eliminate_fixed(work_, rhs, fixed, fixed_values);
    if (!factor_.factorize(work_)) return false;
    x = factor_.solve(rhs);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (fixed[i]) x[i] = fixed_values[i];
    return x.allFinite();
}

BoundSolveResult BoundConstrainedSolver::solve(const SparseMatrix& a, const Vector& b, const Vector& lower,
                                               const Vector& upper, Vector& x, const BoundSolveOptions& options)
{
    const Eigen::Index n = b.size();
    if (a.rows() != n || lower.size() != n || upper.size() != n)
        throw DomainError("bound-constrained solve: inconsistent sizes");
    for (Eigen::Index i = 0; i < n; ++i)
        if (lower[i] > upper[i]) throw DomainError("bound-constrained solve: lower bound above upper bound");
    if (x.size() != n) x = lower;
    x = project(x, lower, upper);

    const Vector diag = a.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(diag[i] > 0.0)) throw SolverError("bound-constrained solve: non-positive diagonal at row " + std::to_string(i));

    BoundSolveResult result;
    std::vector<char> state(n, 0), previous(n, 0), fixed(n, 0);
    Vector values = Vector::Zero(n);
    Vector mu = a * x - b;
    bool pdas_ok = false;

    for (int it = 1; it <= options.max_active_set_iterations; ++it) {
        result.iterations = it;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = x[i] - mu[i] / diag[i];
            state[i] = w < lower[i] ? 1 : (w > upper[i] ? 2 : 0);
        }
        if (it > 1 && state == previous) {
            pdas_ok = true;
            break;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            fixed[i] = state[i] != 0;
            values[i] = state[i] == 1 ? lower[i] : (state[i] == 2 ? upper[i] : 0.0);
        }
        if (!solve_reduced(a, b, fixed, values, x)) break;
        const Vector g = a * x - b;
        for (Eigen::Index i = 0; i < n; ++i) mu[i] = fixed[i] ? g[i] : 0.0;
        previous = state;
    }

    x = project(x, lower, upper);
    result.method = "pdas";
    result.kkt_residual = kkt_residual(a, b, lower, upper, x);

    if (!pdas_ok || result.kkt_residual > options.kkt_tolerance) {
        result.method = "projected-newton";
        for (int it = 1; it <= options.max_newton_iterations; ++it) {
            ++result.iterations;
            const Vector g = a * x - b;
            result.kkt_residual = kkt_residual(a, b, lower, upper, x);
            if (result.kkt_residual <= options.kkt_tolerance) break;
            const Vector gap = x - project(x - g.cwiseQuotient(diag), lower, upper);
            const double eps = std::min(1e-3, gap.lpNorm<Eigen::Infinity>());
            for (Eigen::Index i = 0; i < n; ++i) {
                const bool at_lower = x[i] <= lower[i] + eps && g[i] > 0.0;
                const bool at_upper = x[i] >= upper[i] - eps && g[i] < 0.0;
                fixed[i] = at_lower || at_upper;
            }
            Vector p;
            if (!solve_reduced(a, -g, fixed, Vector::Zero(n), p))
                throw SolverError("bound-constrained solve: reduced matrix is not positive definite");
            for (Eigen::Index i = 0; i < n; ++i)
                if (fixed[i]) p[i] = -g[i] / diag[i];
            const double f0 = objective(a, b, x);
            double step = 1.0;
            Vector trial = x;
            for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
                trial = project(x + step * p, lower, upper);
                if (objective(a, b, trial) <= f0 + 1e-4 * g.dot(trial - x)) break;
            }
            if ((trial - x).lpNorm<Eigen::Infinity>() == 0.0) break;
            x = trial;
        }
        result.kkt_residual = kkt_residual(a, b, lower, upper, x);
    }

    result.converged = result.kkt_residual <= options.kkt_tolerance;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x[i] <= lower[i]) ++result.active_lower;
        else if (x[i] >= upper[i]) ++result.active_upper;
    }
    return result;
}

}  // namespace glassfrac
