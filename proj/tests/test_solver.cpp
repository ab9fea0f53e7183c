#include "fixtures.hpp"

#include "glassfrac/errors.hpp"
#include "glassfrac/solver.hpp"

#include <doctest.h>
#include <Eigen/Dense>

#include <chrono>
#include <cmath>

using namespace glassfrac;
using namespace fixtures;

namespace {

/// Half monolith with a refined midspan band so a crack can localize on a small mesh.
PlaneStressSetup banded_setup(Formulation f, double lc = 4e-3)
{
    auto s = monolith_setup(f);
    RefinementSpec r;
    r.default_size = 10e-3;
    r.bands.push_back({0.45, 0.55, 2e-3});
    r.breakpoints = {0.05, 0.3, 0.45};
    const std::vector<SectionLayer> layers{{0.02, LayerTag::GlassMono}};
    s.mesh = build_section_mesh(1.1, layers, r, Symmetry::Half);
    s.glass.length_scale = lc;
    s.glass.fracture_energy =
        calibrate(f.kind, Reduction::PlaneStress, CalibrationInput::LengthScale, lc, 70e9, 45e6).fracture_energy;
    return s;
}

SimulationState fresh(const FractureModel& m)
{
    SimulationState s;
    s.u = Vector::Zero(m.displacement_size());
    s.d = Vector::Zero(m.damage_size());
    s.energy = m.energy(s.u, s.d);
    return s;
}

StaggeredConfig config_with(std::vector<TimeSegment> schedule)
{
    StaggeredConfig c;
    c.schedule = std::move(schedule);
    return c;
}

}  // namespace

TEST_CASE("staggered change guard")
{
    CHECK(staggered_change(2.0, 1.0) == doctest::Approx(0.5));
    CHECK(staggered_change(0.0, 1e-30) == doctest::Approx(1e-30));
    CHECK(staggered_change(1e-21, 3e-21) == doctest::Approx(2e-21));
}

TEST_CASE("config validation lists every violation")
{
    StaggeredConfig c;
    c.energy_tolerance = 0.0;
    c.max_newton_iterations = 0;
    c.schedule = {{1.0, 0.1}, {0.5, -1.0}};
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
    }
    CHECK_NOTHROW(config_with({{1.0, 0.1}}).validate());
}

TEST_CASE("zero load converges in one iteration")
{
    for (auto scheme : {StaggeredScheme::Anisotropic, StaggeredScheme::Hybrid}) {
        PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, scheme)));
        auto state = fresh(m);
        const auto out = staggered_step(m, state, 0.0, 0.0, config_with({{1.0, 0.1}}));
        CHECK(out.converged);
        CHECK(out.iterations == 1);
        CHECK(state.d.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("scheme guards")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    auto state = fresh(m);
    const auto c = config_with({{1.0, 0.1}});
    CHECK_THROWS_AS(staggered_step_anisotropic(m, state, 0.0, 0.0, c), ConfigError);
    CHECK(staggered_step_hybrid(m, state, 0.0, 0.0, c).converged);
}

TEST_CASE("elastic range reproduces the direct elastic solution")
{
    auto f = formulation(PhaseFieldKind::PfP, StaggeredScheme::Anisotropic);
    f.residual_stiffness = 0.0;
    PlaneStressModel m(monolith_setup(f));
    auto state = fresh(m);
    const double w = 1e-3; // bottom fiber well below the PF-P threshold
    const auto out = staggered_step_anisotropic(m, state, w / 3e-5, w, config_with({{100.0, 1.0}}));
    REQUIRE(out.converged);
    CHECK(state.d.cwiseAbs().maxCoeff() == 0.0);

    // dense elimination of the prescribed values
    auto pattern = m.make_displacement_pattern();
    Vector force;
    m.assemble_displacement(Vector::Zero(m.displacement_size()), state.d, pattern, force);
    const Eigen::MatrixXd k(pattern.matrix());
    const auto& plan = m.boundary();
    const Eigen::Index n = k.rows();
    Vector prescribed = Vector::Zero(n);
    std::vector<char> fixed(n, 0);
    for (std::size_t i = 0; i < plan.dofs.size(); ++i) {
        fixed[plan.dofs[i]] = 1;
        prescribed[plan.dofs[i]] = plan.scale[i] * w;
    }
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!fixed[i]) free.push_back(i);
    const Eigen::Index nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd kff(nf, nf);
    Vector rhs(nf);
    const Vector kp = k * prescribed;
    for (Eigen::Index a = 0; a < nf; ++a) {
        rhs[a] = -kp[free[a]];
        for (Eigen::Index b = 0; b < nf; ++b) kff(a, b) = k(free[a], free[b]);
    }
    const Vector uf = kff.ldlt().solve(rhs);
    Vector expected = prescribed;
    for (Eigen::Index a = 0; a < nf; ++a) expected[free[a]] = uf[a];
    CHECK((state.u - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("staggered energy, irreversibility and bounds through localization")
{
    for (auto kind : {PhaseFieldKind::PfP, PhaseFieldKind::PfB}) {
        CAPTURE(to_string(kind));
        PlaneStressModel m(banded_setup(formulation(kind, StaggeredScheme::Anisotropic)));
        auto state = fresh(m);
        auto config = config_with({{1.0, 1.0}});
        config.max_staggered_iterations = 500;
        double peak = 0.0;
        bool localized = false;
        int multi_iteration_steps = 0;
        for (int k = 1; k <= 400 && !localized; ++k) {
            const double w = 4e-5 * k;
            const Vector d_old = state.d;
            const auto out = staggered_step(m, state, w / 3e-5, w, config);
            REQUIRE_MESSAGE(out.converged, out.failure);
            multi_iteration_steps += out.iterations > 2;
            for (std::size_t i = 1; i < out.energies.size(); ++i)
                REQUIRE(out.energies[i] <= out.energies[i - 1] + 1e-12);
            for (Eigen::Index i = 0; i < state.d.size(); ++i) {
                REQUIRE(state.d[i] >= d_old[i]);
                REQUIRE(state.d[i] >= 0.0);
                REQUIRE(state.d[i] <= 1.0);
            }
            const double r = m.probe(state.u, state.d).reaction;
            peak = std::max(peak, r);
            localized = r < 0.1 * peak;
        }
        CHECK(localized);
        CHECK(multi_iteration_steps > 0);
    }
}

TEST_CASE("quasi-static run: ramp, schedule and pre-peak monotonicity")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    auto config = config_with({{1.0, 0.1}, {1.2, 0.01}, {1.25, 0.001}});
    const auto result = run_quasistatic(m, config, {});
    REQUIRE(result.termination == "schedule-complete");
    REQUIRE(result.steps.size() == 10 + 20 + 50);
    double t = 0.0;
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const auto& s = result.steps[i];
        const double expected_dt = i < 10 ? 0.1 : i < 30 ? 0.01 : 0.001;
        CHECK(s.time - t == doctest::Approx(expected_dt).epsilon(1e-9));
        CHECK(s.w == doctest::Approx(3e-5 * s.time).epsilon(1e-15));
        CHECK(s.step == static_cast<int>(i) + 1);
        if (i > 0) CHECK(s.probes.reaction >= result.steps[i - 1].probes.reaction);
        t = s.time;
    }
    CHECK(3e-5 * 10.0 == doctest::Approx(3e-4));
}

TEST_CASE("secant slope: PF-P linear before damage, PF-B softens from the start")
{
    auto slopes = [](PhaseFieldKind kind) {
        PlaneStressModel m(banded_setup(formulation(kind, StaggeredScheme::Hybrid)));
        std::vector<std::pair<double, double>> out; // (slope, max_d)
        run_quasistatic(m, config_with({{60.0, 4.0}}), {}, [&](const StepRecord& r, const SimulationState&) {
            out.emplace_back(r.probes.reaction / r.w, r.max_d);
        });
        return out;
    };
    const auto p = slopes(PhaseFieldKind::PfP);
    REQUIRE(p.size() > 3);
    for (const auto& [s, dmax] : p)
        if (dmax == 0.0) CHECK(std::abs(s / p.front().first - 1.0) <= 1e-6);
    const auto b = slopes(PhaseFieldKind::PfB);
    REQUIRE(b.front().second > 0.0);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].first < b.front().first);
}

TEST_CASE("failed steps are cut back and partial results kept")
{
    PlaneStressModel m(banded_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Anisotropic)));
    auto config = config_with({{400.0, 40.0}});
    config.max_staggered_iterations = 2;
    config.max_cutbacks = 1;
    const auto result = run_quasistatic(m, config, {});
    CHECK(result.failed());
    CHECK_FALSE(result.failure_message.empty());
    CHECK_FALSE(result.steps.empty());
    CHECK(result.final_state.time == doctest::Approx(result.steps.back().time));
}

TEST_CASE("hybrid iterations are cheaper than anisotropic ones")
{
    auto per_iteration = [](StaggeredScheme scheme) {
        PlaneStressModel m(banded_setup(formulation(PhaseFieldKind::PfP, scheme)));
        auto state = fresh(m);
        const auto config = config_with({{1.0, 1.0}});
        int iterations = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int k = 1; k <= 6; ++k) iterations += staggered_step(m, state, k, 5e-4 * k, config).iterations;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / iterations;
    };
    const double hybrid = per_iteration(StaggeredScheme::Hybrid);
    const double aniso = per_iteration(StaggeredScheme::Anisotropic);
    CHECK(hybrid < aniso);
}
