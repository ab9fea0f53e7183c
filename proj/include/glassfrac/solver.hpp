#pragma once

#include "glassfrac/fracture_model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace glassfrac {

/// Pseudo-time increment used until the given time.
struct TimeSegment {
    double until = 0.0;     // s
    double increment = 0.0; // s
};

struct StaggeredConfig {
    double energy_tolerance = 1e-6;  // xi_SA
    double newton_tolerance = 1e-11; // xi_NM
    int max_staggered_iterations = 500;
    int max_newton_iterations = 400;
    std::vector<TimeSegment> schedule;
    double loading_rate = 3e-5;      // m/s
    double localization_drop = 0.9;  // fraction of the peak reaction
    int max_cutbacks = 6;            // halvings of a failed increment

    void validate() const;
};

struct SimulationState {
    double time = 0.0;
    double w = 0.0;
    Vector u;
    Vector d;
    EnergyBreakdown energy;
};

struct StepOutcome {
    bool converged = false;
    int iterations = 0;
    double xi = 0.0;
    std::vector<double> energies; // total energy after each staggered iteration
    int newton_iterations = 0;    // summed over the staggered loop
    std::string failure;
};

struct StepRecord {
    int step = 0;
    double time = 0.0;
    double w = 0.0;
    int staggered_iterations = 0;
    double xi = 0.0;
    ProbeReadings probes;
    double max_d = 0.0;
    EnergyBreakdown energy;
    int cutbacks = 0;
};

struct SimulationResult {
    std::vector<StepRecord> steps;
    SimulationState final_state;
    std::string termination; // "schedule-complete", "localization" or "solver-failure"
    std::string failure_message;
    double peak_reaction = 0.0;
    double deflection_at_peak = 0.0;
    double failure_stress = 0.0; // largest midspan bottom-fiber stress reached
    double wall_time = 0.0;

    bool failed() const { return termination == "solver-failure"; }
};

/// Staggered loop at load w from `state` (the last converged state); on success `state` is
/// replaced by the new converged state. The model's scheme selects Newton or a linear solve.
StepOutcome staggered_step(FractureModel& model, SimulationState& state, double time, double w,
                           const StaggeredConfig& config);
StepOutcome staggered_step_anisotropic(FractureModel& model, SimulationState& state, double time, double w,
                                       const StaggeredConfig& config);
StepOutcome staggered_step_hybrid(FractureModel& model, SimulationState& state, double time, double w,
                                  const StaggeredConfig& config);

/// Relative change of successive staggered energies, absolute when |current| < 1e-20.
double staggered_change(double current, double previous);

using StepObserver = std::function<void(const StepRecord&, const SimulationState&)>;

/// Advances the prescribed displacement w = rate t along the schedule until it ends or the
/// reaction falls below (1 - localization_drop) of its peak.
SimulationResult run_quasistatic(FractureModel& model, const StaggeredConfig& config, SimulationState initial,
                                 const StepObserver& observer = {});

}  // namespace glassfrac
