#pragma once

#include "glassfrac/fracture_model.hpp"

#include <functional>
#include <string>

namespace glassfrac {

/// Callbacks of a convex displacement problem with prescribed dofs.
struct NewtonProblem {
    /// Fills the tangent, the internal force and |K_e| |u_e| summed per dof.
    std::function<void(const Vector& u, PatternAssembler& tangent, Vector& force, Vector& magnitude)> assemble;
    std::function<Vector(const Vector& u)> internal_force;
    /// Text naming the model entity behind a failed pivot.
    std::function<std::string(long pivot)> describe_pivot;
    bool line_search = true;
};

/// Newton iteration on r = f_int(u) over the free dofs; `u` carries the prescribed values on
/// entry. Converged when |r| <= max(tol |f_int|, assembly rounding floor).
NewtonReport newton_solve(const NewtonProblem& problem, const std::vector<char>& fixed, PatternAssembler& tangent,
                          SymmetricFactorization& factor, double tolerance, int max_iterations, Vector& u);

}  // namespace glassfrac
