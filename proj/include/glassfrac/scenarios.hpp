#pragma once

#include "glassfrac/beam1d.hpp"
#include "glassfrac/fem2d.hpp"
#include "glassfrac/solver.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace glassfrac {

enum class Layup { Monolith, Laminate };
enum class InterlayerKind { Eva, Pvb };
enum class ModelKind { PlaneStress, Beam };
enum class GlassLayer { Bottom, Top };
enum class SampleType { Monolith, AngEva, AngPvb };

std::string_view to_string(Layup layup);
std::string_view to_string(InterlayerKind kind);
std::string_view to_string(ModelKind kind);
std::string_view to_string(GlassLayer layer);

struct InitialCrackSpec {
    GlassLayer layer = GlassLayer::Bottom;
    std::vector<double> positions;  // m from the left end
    std::optional<double> width;    // defaults to 2 l_c
};

/// `count` crack positions spread evenly over [x0, x1] at cell centers.
std::vector<double> evenly_spaced_cracks(int count, double x0, double x1);

/// Four-point bending specimen plus everything needed to discretize and run it.
struct FourPointScenario {
    double length = 1.1;
    double width = 0.36;
    Layup layup = Layup::Monolith;
    double monolith_thickness = 0.02;
    double bottom_thickness = 0.01;
    double interlayer_thickness = 0.00076;
    double top_thickness = 0.01;
    InterlayerKind interlayer = InterlayerKind::Eva;
    std::optional<PronySeries> interlayer_prony; // replaces the built-in series when set
    double interlayer_poisson_ratio = 0.49;

    double support_x = 0.05;
    double load_x = 0.45;
    double loading_rate = 3e-5; // m/s
    double temperature = 25.0;  // degC
    Symmetry symmetry = Symmetry::Half;

    ModelKind model = ModelKind::PlaneStress;
    BeamDriver driver = BeamDriver::Integrated;
    Formulation formulation;

    double young_modulus = 70e9;
    double poisson_ratio = 0.22;
    double tensile_strength = 45e6;
    std::optional<double> length_scale;    // exactly one of these two; l_c = 2 h_min when neither
    std::optional<double> fracture_energy;
    std::vector<StrengthPatch> strength_patches;
    /// Relation between l_c and G_f; by default BEAM for the integrated beam driver, else PLANE_STRESS.
    std::optional<Reduction> calibration_reduction;

    double element_size = 2e-3;  // outside the refinement band
    double band_size = 0.5e-3;   // inside the band
    double transition_width = 0.01; // band extension beyond the constant-moment region
    int min_glass_elements = 4;
    int min_interlayer_elements = 2;

    double quarter_probe_x = 0.3;

    InitialCrackSpec cracks;

    /// All violations at once, empty when consistent.
    std::vector<std::string> violations() const;
    void validate() const;
    double midspan() const { return 0.5 * length; }
    double section_thickness() const;
};

struct ProbeLocation {
    std::string name;
    double requested_x = 0.0;
    double snapped_x = 0.0;
    double y = 0.0;
};

/// Discretized scenario; owns the model.
struct BuiltScenario {
    std::unique_ptr<FractureModel> model;
    PlaneStressModel* plane_stress = nullptr; // set for PLANE_STRESS scenarios
    LayeredBeamModel* beam = nullptr;         // set for BEAM scenarios
    GlassMaterial glass;                      // with the calibrated pair (l_c, G_f)
    Calibration calibration;
    std::optional<InterlayerModel> interlayer;
    double interlayer_initial_modulus = 0.0;  // G at t = 0+, Pa
    std::vector<ProbeLocation> probes;
    std::vector<std::string> assumptions;     // defaults taken without explicit input

    /// Zero fields at t = 0.
    SimulationState initial_state() const;
};

BuiltScenario build_scenario(const FourPointScenario& spec);

/// Square reduced-strength patch of side 1.5 l_c on the bottom face, centered at x.
StrengthPatch edge_weakening_patch(double x, double length_scale, double factor);

/// Sets d = 1 on the named glass layer within |x - position| <= width / 2; the state's damage
/// is the irreversibility bound of every later step.
void apply_initial_cracks(SimulationState& state, const FractureModel& model, const InitialCrackSpec& cracks,
                          double length_scale);

/// Measured range of bottom-surface failure stresses, Pa.
std::pair<double, double> expected_failure_window(SampleType type);

}  // namespace glassfrac
