#include "glassfrac/scenarios.hpp"

#include "glassfrac/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace glassfrac {

std::string_view to_string(Layup layup) { return layup == Layup::Monolith ? "monolith" : "laminate"; }
std::string_view to_string(InterlayerKind kind) { return kind == InterlayerKind::Eva ? "eva" : "pvb"; }
std::string_view to_string(ModelKind kind) { return kind == ModelKind::PlaneStress ? "plane-stress" : "beam"; }
std::string_view to_string(GlassLayer layer) { return layer == GlassLayer::Bottom ? "bottom" : "top"; }

std::vector<double> evenly_spaced_cracks(int count, double x0, double x1)
{
    if (count < 0) throw ConfigError("crack count must be >= 0");
    std::vector<double> x;
    for (int k = 0; k < count; ++k) x.push_back(x0 + (k + 0.5) * (x1 - x0) / count);
    return x;
}

double FourPointScenario::section_thickness() const
{
    return layup == Layup::Monolith ? monolith_thickness
                                    : bottom_thickness + interlayer_thickness + top_thickness;
}

std::vector<std::string> FourPointScenario::violations() const
{
    std::vector<std::string> bad;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    need(length > 0.0, "length must be > 0");
    need(width > 0.0, "width must be > 0");
    if (layup == Layup::Monolith) {
        need(monolith_thickness > 0.0, "monolith thickness must be > 0");
    } else {
        need(bottom_thickness > 0.0, "bottom glass thickness must be > 0");
        need(interlayer_thickness > 0.0, "interlayer thickness must be > 0");
        need(top_thickness > 0.0, "top glass thickness must be > 0");
        need(interlayer_poisson_ratio > -1.0 && interlayer_poisson_ratio < 0.5,
             "interlayer Poisson ratio must lie in (-1, 0.5)");
    }
    need(support_x > 0.0 && support_x < load_x && load_x < midspan(),
         "positions must satisfy 0 < support < load < midspan");
    need(loading_rate > 0.0, "loading rate must be > 0");
    need(young_modulus > 0.0, "glass Young's modulus must be > 0");
    need(poisson_ratio > -1.0 && poisson_ratio < 0.5, "glass Poisson ratio must lie in (-1, 0.5)");
    need(tensile_strength > 0.0, "tensile strength must be > 0");
    if (length_scale && fracture_energy) bad.push_back("length_scale and fracture_energy are both given; give one");
    if (length_scale) need(*length_scale > 0.0, "length_scale must be > 0");
    if (fracture_energy) need(*fracture_energy > 0.0, "fracture_energy must be > 0");
    need(element_size > 0.0, "element size must be > 0");
    need(band_size > 0.0 && band_size <= element_size, "band size must lie in (0, element size]");
    need(transition_width >= 0.0, "transition width must be >= 0");
    need(min_glass_elements >= 1, "min glass elements must be >= 1");
    need(min_interlayer_elements >= 1, "min interlayer elements must be >= 1");
    need(quarter_probe_x > 0.0 && quarter_probe_x < midspan(), "quarter probe must lie inside the half span");
    if (layup == Layup::Monolith && cracks.layer == GlassLayer::Top && !cracks.positions.empty())
        bad.emplace_back("a monolith has no top glass layer for initial cracks");
    for (double x : cracks.positions) {
        const double x_end = symmetry == Symmetry::Half ? midspan() : length;
        if (!(x >= 0.0 && x <= x_end)) {
            std::ostringstream msg;
            msg << "initial crack at x = " << x << " lies outside the modeled span";
            bad.push_back(msg.str());
        }
    }
    if (cracks.width) need(*cracks.width > 0.0, "crack width must be > 0");
    for (const auto& p : strength_patches) {
        need(p.factor > 0.0 && p.factor <= 1.0, "strength patch factor must lie in (0, 1]");
        need(p.region.x_min <= p.region.x_max && p.region.y_min <= p.region.y_max, "strength patch box is empty");
    }
    try {
        formulation.validate();
    } catch (const ConfigError& e) {
        bad.emplace_back(e.what());
    }
    return bad;
}

void FourPointScenario::validate() const
{
    auto bad = violations();
    if (bad.empty()) return;
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& b : bad) msg << "\n  " << b;
    throw ConfigError(msg.str(), std::move(bad));
}

SimulationState BuiltScenario::initial_state() const
{
    SimulationState s;
    s.u = Vector::Zero(static_cast<Eigen::Index>(model->displacement_size()));
    s.d = Vector::Zero(static_cast<Eigen::Index>(model->damage_size()));
    return s;
}

StrengthPatch edge_weakening_patch(double x, double length_scale, double factor)
{
    const double half = 0.75 * length_scale;
    StrengthPatch p;
    p.region = Box{x - half, x + half, 0.0, 2.0 * half};
    p.factor = factor;
    return p;
}

namespace {

std::string number(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double snap(const std::vector<double>& grid, double x, const std::string& name)
{
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == grid.size() || (i > 0 && x - grid[i - 1] < grid[i] - x)) i = i == 0 ? 0 : i - 1;
    const double left = i > 0 ? grid[i] - grid[i - 1] : grid[1] - grid[0];
    const double right = i + 1 < grid.size() ? grid[i + 1] - grid[i] : left;
    if (std::abs(grid[i] - x) > 0.5 * std::max(left, right) + 1e-12)
        throw QueryError(name + " probe at x = " + number(x) + " lies off the mesh");
    return grid[i];
}

}  // namespace

BuiltScenario build_scenario(const FourPointScenario& spec)
{
    spec.validate();
    BuiltScenario out;
    const double mid = spec.midspan();

    const Reduction reduction = spec.calibration_reduction.value_or(
        spec.model == ModelKind::Beam && spec.driver == BeamDriver::Integrated ? Reduction::Beam
                                                                               : Reduction::PlaneStress);
    GlassMaterial glass;
    glass.young_modulus = spec.young_modulus;
    glass.poisson_ratio = spec.poisson_ratio;
    glass.tensile_strength = spec.tensile_strength;
    if (spec.fracture_energy) {
        out.calibration = calibrate(spec.formulation.kind, reduction, CalibrationInput::FractureEnergy,
                                    *spec.fracture_energy, spec.young_modulus, spec.tensile_strength);
    } else {
        const double lc = spec.length_scale.value_or(2.0 * spec.band_size);
        if (!spec.length_scale) out.assumptions.push_back("length_scale = 2 x band element size = " + number(lc) + " m");
        out.calibration = calibrate(spec.formulation.kind, reduction, CalibrationInput::LengthScale, lc,
                                    spec.young_modulus, spec.tensile_strength);
    }
    glass.length_scale = out.calibration.length_scale;
    glass.fracture_energy = out.calibration.fracture_energy;
    out.glass = glass;

    StrengthField strength;
    strength.base_strength = spec.tensile_strength;
    strength.patches = spec.strength_patches;

    if (spec.layup == Layup::Laminate) {
        InterlayerModel il = spec.interlayer == InterlayerKind::Eva ? eva_interlayer() : pvb_interlayer();
        if (spec.interlayer_prony) il.prony = *spec.interlayer_prony;
        il.poisson_ratio = spec.interlayer_poisson_ratio;
        out.interlayer_initial_modulus = equivalent_shear_modulus(il, 0.0, spec.temperature);
        out.interlayer = il;
    }

    // Constant-moment region plus a transition zone on each side, clipped by the mesh builder.
    RefinementSpec refinement;
    refinement.default_size = spec.element_size;
    refinement.min_glass_elements = spec.min_glass_elements;
    refinement.min_interlayer_elements = spec.min_interlayer_elements;
    refinement.bands.push_back({spec.load_x - spec.transition_width,
                                spec.length - spec.load_x + spec.transition_width, spec.band_size});
    refinement.breakpoints = {spec.support_x, spec.load_x, spec.quarter_probe_x};
    if (spec.symmetry == Symmetry::Full) {
        for (double x : {spec.length - spec.support_x, spec.length - spec.load_x, mid,
                         spec.length - spec.quarter_probe_x})
            refinement.breakpoints.push_back(x);
    }
    std::sort(refinement.breakpoints.begin(), refinement.breakpoints.end());
    refinement.breakpoints.erase(std::unique(refinement.breakpoints.begin(), refinement.breakpoints.end()),
                                 refinement.breakpoints.end());

    FourPointGeometry geometry{spec.support_x, spec.load_x};
    const double height = spec.section_thickness();

    std::vector<double> grid;
    if (spec.model == ModelKind::PlaneStress) {
        std::vector<SectionLayer> layers;
        if (spec.layup == Layup::Monolith) {
            layers.push_back({spec.monolith_thickness, LayerTag::GlassMono});
        } else {
            layers.push_back({spec.bottom_thickness, LayerTag::GlassBottom});
            layers.push_back({spec.interlayer_thickness, LayerTag::Interlayer});
            layers.push_back({spec.top_thickness, LayerTag::GlassTop});
        }
        PlaneStressSetup setup;
        setup.mesh = build_section_mesh(spec.length, layers, refinement, spec.symmetry);
        grid = setup.mesh.x_lines;
        setup.glass = glass;
        setup.strength = strength;
        setup.interlayer = out.interlayer;
        setup.temperature = spec.temperature;
        setup.formulation = spec.formulation;
        setup.width = spec.width;
        setup.geometry = geometry;
        const double mid_x = snap(grid, mid, "midspan");
        const double quarter_x = snap(grid, spec.quarter_probe_x, "quarter-span");
        setup.mid_probe = {mid_x, 0.0};
        setup.quarter_probe = {quarter_x, height};
        out.probes.push_back({"sigma_mid", mid, mid_x, 0.0});
        out.probes.push_back({"sigma_quarter_top", spec.quarter_probe_x, quarter_x, height});
        auto model = std::make_unique<PlaneStressModel>(std::move(setup));
        out.plane_stress = model.get();
        out.model = std::move(model);
    } else {
        BeamSetup setup;
        setup.mesh = build_beam_mesh(spec.length, refinement, spec.symmetry);
        grid = setup.mesh.nodes;
        if (spec.layup == Layup::Monolith) {
            setup.section = {spec.monolith_thickness, 0.0, 0.0, spec.width};
        } else {
            setup.section = {spec.bottom_thickness, spec.interlayer_thickness, spec.top_thickness, spec.width};
        }
        setup.glass = glass;
        setup.strength = strength;
        setup.interlayer = out.interlayer;
        setup.temperature = spec.temperature;
        setup.formulation = spec.formulation;
        setup.driver = spec.driver;
        setup.geometry = geometry;
        setup.mid_probe_x = snap(grid, mid, "midspan");
        setup.quarter_probe_x = snap(grid, spec.quarter_probe_x, "quarter-span");
        out.probes.push_back({"sigma_mid", mid, setup.mid_probe_x, 0.0});
        out.probes.push_back({"sigma_quarter_top", spec.quarter_probe_x, setup.quarter_probe_x, height});
        auto model = std::make_unique<LayeredBeamModel>(std::move(setup));
        out.beam = model.get();
        out.model = std::move(model);
    }

    out.assumptions.push_back("support_x = " + number(spec.support_x) + " m from each end");
    out.assumptions.push_back("load_x = " + number(spec.load_x) + " m from each end");
    if (spec.layup == Layup::Laminate)
        out.assumptions.push_back("interlayer Poisson ratio = " + number(spec.interlayer_poisson_ratio));
    out.assumptions.push_back("support rubber pads not modeled");
    if (spec.formulation.kind == PhaseFieldKind::PfM)
        out.assumptions.push_back("PF-M calibrated with the PF-B relation");
    return out;
}

void apply_initial_cracks(SimulationState& state, const FractureModel& model, const InitialCrackSpec& cracks,
                          double length_scale)
{
    if (cracks.positions.empty()) return;
    const double width = cracks.width.value_or(2.0 * length_scale);
    if (!(width > 0.0)) throw ConfigError("crack width must be > 0");
    const int layer = cracks.layer == GlassLayer::Bottom ? 0 : 1;
    const auto nodes = model.damage_nodes();
    if (static_cast<std::size_t>(state.d.size()) != nodes.size())
        throw ConfigError("state damage size does not match the model");

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    bool has_layer = false;
    for (const auto& n : nodes) {
        x_min = std::min(x_min, n.x);
        x_max = std::max(x_max, n.x);
        has_layer = has_layer || n.layer == layer;
    }
    std::vector<std::string> bad;
    if (!has_layer) bad.push_back(std::string("the model has no ") + std::string(to_string(cracks.layer)) + " glass layer");
    for (double x : cracks.positions)
        if (x < x_min || x > x_max) bad.push_back("initial crack at x = " + number(x) + " lies outside the mesh");
    if (!bad.empty()) throw ConfigError("invalid initial cracks", std::move(bad));

    const double half = 0.5 * width;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].layer != layer) continue;
        for (double x : cracks.positions)
            if (std::abs(nodes[i].x - x) <= half * (1.0 + 1e-12)) state.d[static_cast<Eigen::Index>(i)] = 1.0;
    }
}

std::pair<double, double> expected_failure_window(SampleType type)
{
    switch (type) {
    case SampleType::AngEva: return {32e6, 60e6};
    case SampleType::AngPvb: return {28e6, 69e6};
    case SampleType::Monolith: return {45e6, 45e6};
    }
    throw ConfigError("unknown sample type");
}

}  // namespace glassfrac
