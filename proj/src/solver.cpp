#include "glassfrac/solver.hpp"

#include "glassfrac/errors.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace glassfrac {

void StaggeredConfig::validate() const
{
    std::vector<std::string> bad;
    if (!(energy_tolerance > 0.0)) bad.emplace_back("energy_tolerance must be > 0");
    if (!(newton_tolerance > 0.0)) bad.emplace_back("newton_tolerance must be > 0");
    if (max_staggered_iterations < 1) bad.emplace_back("max_staggered_iterations must be >= 1");
    if (max_newton_iterations < 1) bad.emplace_back("max_newton_iterations must be >= 1");
    if (schedule.empty()) bad.emplace_back("schedule must contain at least one segment");
    double previous = 0.0;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i].increment > 0.0))
            bad.push_back("schedule segment " + std::to_string(i) + ": increment must be > 0");
        if (!(schedule[i].until > previous))
            bad.push_back("schedule segment " + std::to_string(i) + ": end time must increase");
        previous = schedule[i].until;
    }
    if (!(loading_rate > 0.0)) bad.emplace_back("loading_rate must be > 0");
    if (!(localization_drop > 0.0 && localization_drop < 1.0)) bad.emplace_back("localization_drop must lie in (0, 1)");
    if (max_cutbacks < 0) bad.emplace_back("max_cutbacks must be >= 0");
    if (!bad.empty()) throw ConfigError("invalid solver configuration", std::move(bad));
}

double staggered_change(double current, double previous)
{
    const double diff = std::abs(current - previous);
    return std::abs(current) < 1e-20 ? diff : diff / std::abs(current);
}

StepOutcome staggered_step(FractureModel& model, SimulationState& state, double time, double w,
                           const StaggeredConfig& config)
{
    StepOutcome out;
    Vector u = state.u;
    Vector d = state.d;
    const Vector& lower = state.d;
    double previous = state.energy.total();
    const NewtonOptions newton{config.newton_tolerance, config.max_newton_iterations};
    EnergyBreakdown energy;

    try {
        for (int i = 1; i <= config.max_staggered_iterations; ++i) {
            out.iterations = i;
            const auto nr = model.solve_displacement(w, d, u, newton);
            out.newton_iterations += nr.iterations;
            if (!nr.converged) {
                std::ostringstream msg;
                msg << "displacement solve did not converge after " << nr.iterations << " iterations (residual "
                    << nr.residual << ") in staggered iteration " << i;
                out.failure = msg.str();
                return out;
            }
            model.solve_damage(u, lower, d);
            energy = model.energy(u, d);
            const double current = energy.total();
            out.energies.push_back(current);
            out.xi = staggered_change(current, previous);
            previous = current;
            if (out.xi <= config.energy_tolerance) {
                out.converged = true;
                break;
            }
        }
    } catch (const SolverError& e) {
        out.failure = e.what();
        return out;
    }
    if (!out.converged) {
        std::ostringstream msg;
        msg << "staggered loop reached " << config.max_staggered_iterations << " iterations (last xi " << out.xi << ")";
        out.failure = msg.str();
        return out;
    }

    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] < lower[i] || d[i] < 0.0 || d[i] > 1.0)
            throw std::logic_error("damage update violated its bounds");
    state.time = time;
    state.w = w;
    state.u = std::move(u);
    state.d = std::move(d);
    state.energy = energy;
    return out;
}

StepOutcome staggered_step_anisotropic(FractureModel& model, SimulationState& state, double time, double w,
                                       const StaggeredConfig& config)
{
    if (model.formulation().scheme != StaggeredScheme::Anisotropic)
        throw ConfigError("model is not configured for the anisotropic scheme");
    return staggered_step(model, state, time, w, config);
}

StepOutcome staggered_step_hybrid(FractureModel& model, SimulationState& state, double time, double w,
                                  const StaggeredConfig& config)
{
    if (model.formulation().scheme != StaggeredScheme::Hybrid)
        throw ConfigError("model is not configured for the hybrid scheme");
    return staggered_step(model, state, time, w, config);
}

SimulationResult run_quasistatic(FractureModel& model, const StaggeredConfig& config, SimulationState initial,
                                 const StepObserver& observer)
{
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    SimulationResult result;
    SimulationState state = std::move(initial);
    if (static_cast<std::size_t>(state.u.size()) != model.displacement_size())
        state.u = Vector::Zero(model.displacement_size());
    if (static_cast<std::size_t>(state.d.size()) != model.damage_size()) state.d = Vector::Zero(model.damage_size());
    model.update_time(state.time);
    state.energy = model.energy(state.u, state.d);

    auto finish = [&](std::string reason) {
        result.termination = std::move(reason);
        result.final_state = state;
        result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return result;
    };

    int step = 0;
    std::size_t segment = 0;
    const double time_tol = 1e-9;
    while (segment < config.schedule.size()) {
        if (state.time >= config.schedule[segment].until - time_tol * config.schedule[segment].until) {
            ++segment;
            continue;
        }
        const double target =
            std::min(state.time + config.schedule[segment].increment, config.schedule[segment].until);

        // march to `target`, halving the increment after a failed attempt
        int cutbacks = 0;
        double dt = target - state.time;
        while (state.time < target - time_tol * target) {
            const double t_new = std::min(state.time + dt, target);
            const double w_new = config.loading_rate * t_new;
            model.update_time(t_new);
            SimulationState trial = state;
            const StepOutcome outcome = staggered_step(model, trial, t_new, w_new, config);
            if (!outcome.converged) {
                if (cutbacks >= config.max_cutbacks) {
                    result.failure_message = outcome.failure;
                    model.update_time(state.time);
                    return finish("solver-failure");
                }
                ++cutbacks;
                dt *= 0.5;
                continue;
            }
            state = std::move(trial);

            StepRecord rec;
            rec.step = ++step;
            rec.time = state.time;
            rec.w = state.w;
            rec.staggered_iterations = outcome.iterations;
            rec.xi = outcome.xi;
            rec.probes = model.probe(state.u, state.d);
            rec.max_d = state.d.size() ? state.d.maxCoeff() : 0.0;
            rec.energy = state.energy;
            rec.cutbacks = cutbacks;
            result.steps.push_back(rec);
            if (rec.probes.reaction > result.peak_reaction) {
                result.peak_reaction = rec.probes.reaction;
                result.deflection_at_peak = rec.probes.deflection_mid;
            }
            result.failure_stress = std::max(result.failure_stress, rec.probes.sigma_mid);
            if (observer) observer(rec, state);

            if (result.peak_reaction > 0.0 &&
                rec.probes.reaction < (1.0 - config.localization_drop) * result.peak_reaction)
                return finish("localization");
        }
    }
    return finish("schedule-complete");
}

}  // namespace glassfrac
