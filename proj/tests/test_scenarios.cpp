#include "glassfrac/errors.hpp"
#include "glassfrac/scenarios.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace glassfrac;

namespace {

FourPointScenario coarse(Layup layup)
{
    FourPointScenario s;
    s.layup = layup;
    s.element_size = 10e-3;
    s.band_size = 2e-3;
    s.length_scale = 4e-3;
    return s;
}

}  // namespace

TEST_CASE("monolith scenario is a single glass layer")
{
    const auto built = build_scenario(coarse(Layup::Monolith));
    REQUIRE(built.plane_stress != nullptr);
    const auto& tags = built.plane_stress->mesh().tags;
    CHECK(std::all_of(tags.begin(), tags.end(), [](LayerTag t) { return t == LayerTag::GlassMono; }));
    CHECK_FALSE(built.interlayer.has_value());
    CHECK(built.plane_stress->damage_size() == built.plane_stress->mesh().num_nodes());
}

TEST_CASE("laminate interlayer starts at the instantaneous Prony sum")
{
    for (auto kind : {InterlayerKind::Eva, InterlayerKind::Pvb}) {
        auto spec = coarse(Layup::Laminate);
        spec.interlayer = kind;
        const auto built = build_scenario(spec);
        const auto series = kind == InterlayerKind::Eva ? eva_interlayer().prony : pvb_interlayer().prony;
        double sum = series.long_term_modulus;
        for (const auto& t : series.terms) sum += t.shear_modulus;
        CHECK(built.interlayer_initial_modulus == doctest::Approx(sum).epsilon(1e-14));
        const auto& tags = built.plane_stress->mesh().tags;
        CHECK(std::count(tags.begin(), tags.end(), LayerTag::Interlayer) > 0);
        CHECK(std::count(tags.begin(), tags.end(), LayerTag::GlassMono) == 0);
    }
}

TEST_CASE("edge weakening patch lowers the local strength")
{
    const double lc = 3.2e-3;
    const auto patch = edge_weakening_patch(0.5, lc, 0.8);
    CHECK(patch.region.x_max - patch.region.x_min == doctest::Approx(1.5 * lc));
    CHECK(patch.region.y_max - patch.region.y_min == doctest::Approx(1.5 * lc));
    StrengthField field;
    field.patches.push_back(patch);
    CHECK(effective_strength(field, {0.5, 0.0}) == doctest::Approx(36e6));
    CHECK(effective_strength(field, {0.5, 0.01}) == doctest::Approx(45e6));

    auto spec = coarse(Layup::Monolith);
    spec.strength_patches.push_back(patch);
    CHECK_NOTHROW(build_scenario(spec));
}

TEST_CASE("calibration follows the model reduction")
{
    auto ps = coarse(Layup::Monolith);
    auto beam = ps;
    beam.model = ModelKind::Beam;
    const auto a = build_scenario(ps);
    const auto b = build_scenario(beam);
    REQUIRE(b.beam != nullptr);
    // same l_c, six times smaller G_f under the beam reduction
    CHECK(b.glass.fracture_energy * 6.0 == doctest::Approx(a.glass.fracture_energy).epsilon(1e-12));
    beam.driver = BeamDriver::Surface;
    CHECK(build_scenario(beam).glass.fracture_energy == doctest::Approx(a.glass.fracture_energy).epsilon(1e-14));

    auto defaulted = ps;
    defaulted.length_scale.reset();
    const auto c = build_scenario(defaulted);
    CHECK(c.glass.length_scale == doctest::Approx(2.0 * ps.band_size));
    CHECK(std::any_of(c.assumptions.begin(), c.assumptions.end(),
                      [](const std::string& s) { return s.find("length_scale") != std::string::npos; }));

    auto by_energy = ps;
    by_energy.length_scale.reset();
    by_energy.fracture_energy = 231.4;
    CHECK(build_scenario(by_energy).glass.length_scale == doctest::Approx(3e-3).epsilon(1e-3));
}

TEST_CASE("probes snap to grid lines and are reported")
{
    for (auto model : {ModelKind::PlaneStress, ModelKind::Beam}) {
        for (auto sym : {Symmetry::Half, Symmetry::Full}) {
            auto spec = coarse(Layup::Laminate);
            spec.model = model;
            spec.symmetry = sym;
            spec.quarter_probe_x = 0.2987;
            const auto built = build_scenario(spec);
            REQUIRE(built.probes.size() == 2);
            CHECK(built.probes[0].snapped_x == doctest::Approx(0.55).epsilon(1e-14));
            CHECK(built.probes[1].requested_x == 0.2987);
            CHECK(built.probes[1].snapped_x == doctest::Approx(0.2987).epsilon(1e-14));
            CHECK(built.probes[1].y == doctest::Approx(0.02076));
        }
    }
}

TEST_CASE("scenario construction is deterministic")
{
    const auto spec = coarse(Layup::Laminate);
    const auto a = build_scenario(spec);
    const auto b = build_scenario(spec);
    const auto& ma = a.plane_stress->mesh();
    const auto& mb = b.plane_stress->mesh();
    REQUIRE(ma.num_nodes() == mb.num_nodes());
    for (std::size_t i = 0; i < ma.num_nodes(); ++i) {
        CHECK(ma.nodes[i].x == mb.nodes[i].x);
        CHECK(ma.nodes[i].y == mb.nodes[i].y);
    }
    CHECK(a.glass.fracture_energy == b.glass.fracture_energy);
}

TEST_CASE("inconsistent scenarios list every violation")
{
    auto spec = coarse(Layup::Laminate);
    spec.fracture_energy = 100.0; // length_scale is also set
    spec.load_x = 0.6;            // beyond midspan
    spec.top_thickness = -1.0;
    spec.loading_rate = 0.0;
    try {
        build_scenario(spec);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
        CHECK(std::string(e.what()).find("length_scale") != std::string::npos);
        CHECK(std::string(e.what()).find("fracture_energy") != std::string::npos);
    }

    auto cracked = coarse(Layup::Monolith);
    cracked.cracks.layer = GlassLayer::Top;
    cracked.cracks.positions = {0.5, 0.7};
    try {
        build_scenario(cracked);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 2);
    }
}

TEST_CASE("initial cracks")
{
    auto spec = coarse(Layup::Laminate);
    const auto built = build_scenario(spec);
    const auto nodes = built.model->damage_nodes();
    const double lc = built.glass.length_scale;

    SUBCASE("empty spec leaves the state unchanged")
    {
        auto state = built.initial_state();
        apply_initial_cracks(state, *built.model, {}, lc);
        CHECK(state.d.isZero(0.0));
    }

    SUBCASE("one crack covers 2 l_c of the bottom layer")
    {
        auto state = built.initial_state();
        InitialCrackSpec c;
        c.positions = {0.5};
        apply_initial_cracks(state, *built.model, c, lc);
        std::set<double> xs;
        double y_max = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (state.d[static_cast<Eigen::Index>(i)] != 1.0) {
                CHECK(state.d[static_cast<Eigen::Index>(i)] == 0.0);
                continue;
            }
            CHECK(nodes[i].layer == 0);
            xs.insert(nodes[i].x);
            y_max = std::max(y_max, nodes[i].y);
        }
        REQUIRE(xs.size() >= 2);
        // nodal count oracle: damaged band measure within one element of 2 l_c times h1
        const double measure = (*xs.rbegin() - *xs.begin()) * y_max;
        CHECK(std::abs(measure - 2.0 * lc * spec.bottom_thickness) <= spec.band_size * spec.bottom_thickness + 1e-15);
        CHECK(y_max == doctest::Approx(spec.bottom_thickness));
    }

    SUBCASE("six cracks give six disjoint bands in the bottom layer only")
    {
        auto state = built.initial_state();
        InitialCrackSpec c;
        c.positions = evenly_spaced_cracks(6, 0.45, 0.55);
        apply_initial_cracks(state, *built.model, c, lc);
        std::set<double> xs;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (state.d[static_cast<Eigen::Index>(i)] == 1.0) {
                CHECK(nodes[i].layer == 0);
                xs.insert(nodes[i].x);
            }
        }
        // count runs of consecutive damaged grid lines
        const auto& grid = built.plane_stress->mesh().x_lines;
        int bands = 0;
        bool inside = false;
        for (double x : grid) {
            const bool hit = xs.count(x) > 0;
            if (hit && !inside) ++bands;
            inside = hit;
        }
        CHECK(bands == 6);
    }

    SUBCASE("positions off the mesh are rejected")
    {
        auto state = built.initial_state();
        InitialCrackSpec c;
        c.positions = {0.9};
        CHECK_THROWS_AS(apply_initial_cracks(state, *built.model, c, lc), ConfigError);
        c.positions = {0.5};
        c.layer = GlassLayer::Top;
        CHECK_NOTHROW(apply_initial_cracks(state, *built.model, c, lc));
    }

    SUBCASE("initial damage is an irreversibility bound")
    {
        auto state = built.initial_state();
        InitialCrackSpec c;
        c.positions = {0.5};
        apply_initial_cracks(state, *built.model, c, lc);
        const Vector before = state.d;
        StaggeredConfig cfg;
        cfg.schedule = {{2.0, 1.0}};
        const auto result = run_quasistatic(*built.model, cfg, state);
        REQUIRE_FALSE(result.failed());
        for (Eigen::Index i = 0; i < before.size(); ++i) CHECK(result.final_state.d[i] >= before[i]);
    }
}

TEST_CASE("expected failure windows")
{
    CHECK(expected_failure_window(SampleType::AngEva) == std::pair{32e6, 60e6});
    CHECK(expected_failure_window(SampleType::AngPvb) == std::pair{28e6, 69e6});
    CHECK(expected_failure_window(SampleType::Monolith) == std::pair{45e6, 45e6});
}
