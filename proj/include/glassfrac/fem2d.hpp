#pragma once

#include "glassfrac/fracture_model.hpp"
#include "glassfrac/materials.hpp"
#include "glassfrac/mesh.hpp"

#include <optional>

namespace glassfrac {

/// Support and load lines measured from the left end of the specimen.
struct FourPointGeometry {
    double support_x = 0.05;
    double load_x = 0.45;
};

/// Dirichlet data proportional to the load parameter: u[dofs[i]] = scale[i] * w.
struct BoundaryPlan {
    std::vector<int> dofs;
    std::vector<double> scale;
    std::vector<int> load_dofs;
    std::vector<int> support_dofs;
    double reaction_factor = 1.0; // 2 for half models
};

/// Supports fixed vertically on the bottom face, loads prescribed as -w on the top face,
/// u_x = 0 on the symmetry line of half models or at one support of full models.
BoundaryPlan apply_fourpoint_bcs(const Mesh2D& mesh, const FourPointGeometry& geometry);

struct PlaneStressSetup {
    Mesh2D mesh;
    GlassMaterial glass;
    StrengthField strength;
    std::optional<InterlayerModel> interlayer;
    double temperature = 25.0;
    Formulation formulation;
    double width = 0.36;
    FourPointGeometry geometry;
    Point2 mid_probe;
    Point2 quarter_probe;
};

struct ElementFields {
    std::vector<double> sigma_xx;  // degraded, per element
    std::vector<double> psi_plus;  // undegraded, per element
    std::vector<double> nodal_damage; // parent-mesh nodes, 0 off the glass
};

class PlaneStressModel final : public FractureModel {
public:
    explicit PlaneStressModel(PlaneStressSetup setup);
    PlaneStressModel(const PlaneStressModel&) = delete;
    PlaneStressModel& operator=(const PlaneStressModel&) = delete;

    std::size_t displacement_size() const override { return 2 * mesh_.num_nodes(); }
    std::size_t damage_size() const override { return submesh_.num_nodes(); }
    const Formulation& formulation() const override { return setup_.formulation; }

    void update_time(double time) override;
    NewtonReport solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options) override;
    BoundSolveResult solve_damage(const Vector& u, const Vector& lower, Vector& d) override;
    std::vector<DamageNode> damage_nodes() const override;
    EnergyBreakdown energy(const Vector& u, const Vector& d) const override;
    ProbeReadings probe(const Vector& u, const Vector& d) const override;

    /// Tangent (ANISOTROPIC) or secant (HYBRID) stiffness and internal force, unconstrained.
    void assemble_displacement(const Vector& u, const Vector& d, PatternAssembler& matrix, Vector& internal_force) const;
    /// Damage system matrix and right-hand side for fixed u.
    void assemble_damage(const Vector& u, PatternAssembler& matrix, Vector& rhs) const;

    /// Element-constant sigma_xx at a point, degraded per the active scheme. Points on the
    /// bottom or top face use the element sharing that face at x.
    double probe_stress(const Vector& u, const Vector& d, Point2 point) const;
    double reaction_force(const Vector& u, const Vector& d) const;
    Vector internal_force(const Vector& u, const Vector& d) const;

    ElementFields element_fields(const Vector& u, const Vector& d) const;

    const Mesh2D& mesh() const { return mesh_; }
    const GlassSubmesh& submesh() const { return submesh_; }
    const BoundaryPlan& boundary() const { return plan_; }
    ElasticConstants interlayer_constants() const { return interlayer_; }
    PatternAssembler make_displacement_pattern() const;
    PatternAssembler make_damage_pattern() const;

private:
    struct Element {
        std::array<int, 3> nodes{};
        std::array<int, 3> damage{{-1, -1, -1}};
        double area = 0.0;
        std::array<double, 3> dndx{};
        std::array<double, 3> dndy{};
        bool glass = true;
        double fracture_energy = 0.0;
        double strength = 0.0;
    };

    void assemble(const Vector& u, const Vector& d, PatternAssembler& matrix, Vector& internal_force,
                  Vector* force_magnitude) const;
    StrainState2D strain(std::size_t e, const Vector& u) const;
    double element_degradation(std::size_t e, const Vector& d) const;
    StressState2D element_stress(std::size_t e, const Vector& u, const Vector& d) const;
    double crack_driver(std::size_t e, const StrainState2D& eps) const;
    std::size_t locate(Point2 p) const;
    std::size_t element_of_dof(int dof) const;

    PlaneStressSetup setup_;
    const Mesh2D& mesh_;
    GlassSubmesh submesh_;
    BoundaryPlan plan_;
    std::vector<Element> elements_;
    double glass_lambda_ = 0.0, glass_mu_ = 0.0;
    ElasticConstants interlayer_{};
    double inter_lambda_ = 0.0, inter_mu_ = 0.0;
    std::vector<int> bottom_faces_, top_faces_;
    std::vector<std::size_t> column_start_;

    PatternAssembler displacement_matrix_;
    PatternAssembler damage_matrix_;
    SymmetricFactorization displacement_factor_;
    BoundConstrainedSolver damage_solver_;
};

}  // namespace glassfrac
