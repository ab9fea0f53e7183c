#include "glassfrac/newton.hpp"

#include "glassfrac/errors.hpp"

#include <cmath>
#include <limits>

namespace glassfrac {

NewtonReport newton_solve(const NewtonProblem& problem, const std::vector<char>& fixed, PatternAssembler& tangent,
                          SymmetricFactorization& factor, double tolerance, int max_iterations, Vector& u)
{
    const std::size_t n = static_cast<std::size_t>(u.size());
    NewtonReport report;
    Vector f(n), r(n), magnitude(n);
    for (int it = 0;; ++it) {
        problem.assemble(u, tangent, f, magnitude);
        r = f;
        for (std::size_t i = 0; i < n; ++i)
            if (fixed[i]) r[i] = 0.0;
        const double reference = f.norm();
        // below this the residual is rounding noise of the assembly
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * magnitude.norm();
        const double rn = r.norm();
        report.history.push_back(rn);
        report.residual = reference > 0.0 ? rn / reference : rn;
        report.iterations = it;
        if (rn <= std::max(tolerance * reference, floor) || rn == 0.0) {
            report.converged = true;
            break;
        }
        if (it >= max_iterations) break;

        Vector rhs = -r;
        eliminate_fixed(tangent.matrix(), rhs, fixed, Vector::Zero(n));
        if (!factor.factorize(tangent.matrix()))
            throw SolverError("displacement system is not positive definite " +
                              problem.describe_pivot(factor.failed_pivot()));
        Vector du = factor.solve(rhs);
        for (std::size_t i = 0; i < n; ++i)
            if (fixed[i]) du[i] = 0.0;

        double step = 1.0;
        if (problem.line_search) {
            // The energy is convex along du: shrink the step until the directional derivative
            // has dropped to half its initial magnitude (regula falsi on its sign change).
            const double slope0 = r.dot(du);
            auto slope = [&](double a) { return problem.internal_force(u + a * du).dot(du); };
            double a_lo = 0.0, s_lo = slope0, a_hi = 1.0, s_hi = slope(1.0);
            if (slope0 < 0.0 && s_hi > 0.5 * std::abs(slope0)) {
                for (int ls = 0; ls < 12; ++ls) {
                    const double a = a_lo - s_lo * (a_hi - a_lo) / (s_hi - s_lo);
                    const double sa = slope(a);
                    step = a;
                    if (std::abs(sa) <= 0.5 * std::abs(slope0)) break;
                    if (sa < 0.0) {
                        a_lo = a;
                        s_lo = sa;
                    } else {
                        a_hi = a;
                        s_hi = sa;
                    }
                }
            }
        }
        u += step * du;
    }
    return report;
}

}  // namespace glassfrac
