#pragma once

#include "glassfrac/bound_solver.hpp"
#include "glassfrac/phasefield.hpp"
#include "glassfrac/sparse.hpp"

#include <vector>

namespace glassfrac {

struct NewtonOptions {
    double tolerance = 1e-11; // relative to the internal-force norm
    int max_iterations = 50;
};

struct NewtonReport {
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    std::vector<double> history; // residual norm before each correction
};

/// Stored energy parts; there are no applied tractions, so `external` stays zero under
/// displacement control and is kept for completeness of the balance.
struct EnergyBreakdown {
    double elastic = 0.0;
    double dissipated = 0.0;
    double external = 0.0;

    double total() const { return elastic + dissipated - external; }
};

struct ProbeReadings {
    double reaction = 0.0;          // N, full specimen
    double sigma_mid = 0.0;         // Pa, bottom fiber at midspan
    double sigma_quarter_top = 0.0; // Pa, top fiber at the quarter probe
    double deflection_mid = 0.0;    // m, positive downward
};

/// Location of a damage degree of freedom; `layer` is 0 for the bottom (or only) glass
/// layer and 1 for the top one.
struct DamageNode {
    double x = 0.0;
    double y = 0.0;
    int layer = 0;
};

/// Discrete phase-field fracture problem under a single prescribed load parameter w.
class FractureModel {
public:
    virtual ~FractureModel() = default;

    virtual std::size_t displacement_size() const = 0;
    virtual std::size_t damage_size() const = 0;
    virtual const Formulation& formulation() const = 0;

    /// Refreshes time-dependent material data for total elapsed load time `time`.
    virtual void update_time(double time) = 0;

    /// Minimizes the energy over u at fixed d with the load parameter w imposed.
    virtual NewtonReport solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options) = 0;

    /// Damage update for fixed u subject to lower <= d <= 1. `d` is the initial guess on entry.
    virtual BoundSolveResult solve_damage(const Vector& u, const Vector& lower, Vector& d) = 0;

    virtual std::vector<DamageNode> damage_nodes() const = 0;

    virtual EnergyBreakdown energy(const Vector& u, const Vector& d) const = 0;
    virtual ProbeReadings probe(const Vector& u, const Vector& d) const = 0;
};

}  // namespace glassfrac
