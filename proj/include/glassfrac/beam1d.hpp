#pragma once

#include "glassfrac/fem2d.hpp"

#include <optional>

namespace glassfrac {

/// Source of the per-layer crack driving energy.
enum class BeamDriver {
    Integrated, ///< positive energy integrated over the cross section
    Surface,    ///< EA/2 times the larger squared positive surface strain
};

std::string_view to_string(BeamDriver driver);

/// One glass layer, or two glass layers bonded by an interlayer, over a common width.
struct LayeredBeamSection {
    double bottom_thickness = 0.02;
    double interlayer_thickness = 0.0; // 0 for a monolith
    double top_thickness = 0.0;        // 0 for a monolith
    double width = 0.36;

    bool laminated() const { return top_thickness > 0.0; }
    int glass_layers() const { return laminated() ? 2 : 1; }
    double thickness(int layer) const { return layer == 0 ? bottom_thickness : top_thickness; }
    /// Centroid height of glass layer `layer` above the bottom face.
    double centroid(int layer) const;
    void validate() const;
};

/// Positive and negative parts of the axial energy of a linear strain profile a + c z over
/// z in [-h/2, h/2], per unit width, with resultants (N, M) and tangent d(N, M)/d(a, c).
struct ProfileSplit {
    double energy_plus = 0.0, energy_minus = 0.0;
    double n_plus = 0.0, n_minus = 0.0;
    double m_plus = 0.0, m_minus = 0.0;
    Eigen::Matrix2d tangent_plus = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d tangent_minus = Eigen::Matrix2d::Zero();
};

ProfileSplit split_profile(double a, double c, double thickness, double young_modulus);

/// Cross-section crack driving energy per unit length for a layer of area `area`.
double beam_driving_energy(BeamDriver driver, double a, double c, double thickness, double area,
                           double young_modulus);

struct BeamSetup {
    Mesh1D mesh;
    LayeredBeamSection section;
    GlassMaterial glass;
    StrengthField strength;
    std::optional<InterlayerModel> interlayer;
    double temperature = 25.0;
    Formulation formulation;
    BeamDriver driver = BeamDriver::Integrated;
    double shear_correction = 5.0 / 6.0;
    FourPointGeometry geometry;
    double mid_probe_x = 0.55;
    double quarter_probe_x = 0.3;
    /// Overrides the interlayer shear modulus (Pa) when set; used by stiffness-bound sweeps.
    std::optional<double> interlayer_shear_modulus;
};

/// Nodal beam output row.
struct BeamNodeFields {
    double x = 0.0, w = 0.0;
    double u_bot = 0.0, phi_bot = 0.0, u_top = 0.0, phi_top = 0.0;
    double d_bot = 0.0, d_top = 0.0;
    double sigma_bot_surface = 0.0, sigma_top_surface = 0.0;
};

/// Timoshenko layers sharing the deflection w; glass layers carry independent damage fields.
/// Node dofs: (u, w, phi) for a monolith, (u_bot, phi_bot, u_top, phi_top, w) for a laminate.
class LayeredBeamModel final : public FractureModel {
public:
    explicit LayeredBeamModel(BeamSetup setup);
    LayeredBeamModel(const LayeredBeamModel&) = delete;
    LayeredBeamModel& operator=(const LayeredBeamModel&) = delete;

    std::size_t displacement_size() const override { return dofs_per_node_ * num_nodes(); }
    std::size_t damage_size() const override { return layers_ * num_nodes(); }
    const Formulation& formulation() const override { return setup_.formulation; }

    void update_time(double time) override;
    NewtonReport solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options) override;
    BoundSolveResult solve_damage(const Vector& u, const Vector& lower, Vector& d) override;
    std::vector<DamageNode> damage_nodes() const override;
    EnergyBreakdown energy(const Vector& u, const Vector& d) const override;
    ProbeReadings probe(const Vector& u, const Vector& d) const override;

    void assemble_displacement(const Vector& u, const Vector& d, PatternAssembler& matrix, Vector& force) const;
    void assemble_damage(const Vector& u, PatternAssembler& matrix, Vector& rhs) const;
    Vector internal_force(const Vector& u, const Vector& d) const;
    double reaction_force(const Vector& u, const Vector& d) const;
    /// Surface sigma_xx of a glass layer at x (degraded per the scheme); `top` picks the face.
    double surface_stress(const Vector& u, const Vector& d, int layer, bool top, double x) const;
    std::vector<BeamNodeFields> node_fields(const Vector& u, const Vector& d) const;

    std::size_t num_nodes() const { return setup_.mesh.nodes.size(); }
    int dofs_per_node() const { return dofs_per_node_; }
    int u_dof(std::size_t node, int layer) const;
    int phi_dof(std::size_t node, int layer) const;
    int w_dof(std::size_t node) const;
    const BoundaryPlan& boundary() const { return plan_; }
    const Mesh1D& mesh() const { return setup_.mesh; }
    double interlayer_shear_modulus() const { return g_int_; }
    PatternAssembler make_displacement_pattern() const;
    PatternAssembler make_damage_pattern() const;

private:
    struct Kinematics {
        double a = 0.0, c = 0.0, gamma = 0.0; // axial strain, curvature, transverse shear
    };

    void assemble(const Vector& u, const Vector& d, PatternAssembler* matrix, Vector& force,
                  Vector* magnitude) const;
    Kinematics layer_kinematics(std::size_t e, int layer, const Vector& u) const;
    double interlayer_slip(std::size_t e, const Vector& u) const;
    double element_degradation(std::size_t e, int layer, const Vector& d) const;
    double layer_driver(std::size_t e, int layer, const Vector& u) const;
    std::size_t element_at(double x) const;
    std::array<int, 10> element_dofs(std::size_t e) const;

    BeamSetup setup_;
    int layers_ = 1;
    int dofs_per_node_ = 3;
    double g_int_ = 0.0;
    BoundaryPlan plan_;
    std::vector<std::array<double, 2>> strength_; // per element and layer
    PatternAssembler displacement_matrix_;
    PatternAssembler damage_matrix_;
    SymmetricFactorization displacement_factor_;
    BoundConstrainedSolver damage_solver_;
};

struct AxialBarSetup {
    double length = 0.1;     // m
    double area = 1e-4;      // m^2
    int elements = 50;
    GlassMaterial glass;
    Formulation formulation;
};

/// Uniform bar under axial displacement control: u(0) = 0, u(L) = w. The reaction is the
/// force at the loaded end and sigma_mid the stress of the middle element.
class AxialBarModel final : public FractureModel {
public:
    explicit AxialBarModel(AxialBarSetup setup);

    std::size_t displacement_size() const override { return static_cast<std::size_t>(setup_.elements) + 1; }
    std::size_t damage_size() const override { return displacement_size(); }
    const Formulation& formulation() const override { return setup_.formulation; }

    void update_time(double) override {}
    NewtonReport solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options) override;
    BoundSolveResult solve_damage(const Vector& u, const Vector& lower, Vector& d) override;
    std::vector<DamageNode> damage_nodes() const override;
    EnergyBreakdown energy(const Vector& u, const Vector& d) const override;
    ProbeReadings probe(const Vector& u, const Vector& d) const override;

    Vector internal_force(const Vector& u, const Vector& d) const;
    double element_stress(std::size_t e, const Vector& u, const Vector& d) const;

private:
    void assemble(const Vector& u, const Vector& d, PatternAssembler* matrix, Vector& force, Vector* magnitude) const;

    AxialBarSetup setup_;
    double h_ = 0.0;
    PatternAssembler displacement_matrix_;
    PatternAssembler damage_matrix_;
    SymmetricFactorization displacement_factor_;
    BoundConstrainedSolver damage_solver_;
};

}  // namespace glassfrac
