#pragma once

#include "glassfrac/materials.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <string_view>

namespace glassfrac {

/// Crack-surface approximation and driving-force family.
enum class PhaseFieldKind {
    PfB, ///< alpha = d^2, energetic driving force
    PfM, ///< alpha = d^2, Rankine-type stress driving force
    PfP, ///< alpha = d, energetic driving force with an elastic threshold
};

enum class EnergySplit { VolumetricDeviatoric, Spectral };

/// Displacement operator used inside the staggered loop.
enum class StaggeredScheme {
    Anisotropic, ///< sigma = g dpsi+/deps + dpsi-/deps, nonlinear in u
    Hybrid,      ///< sigma = g dpsi/deps, linear in u
};

struct Formulation {
    PhaseFieldKind kind = PhaseFieldKind::PfP;
    EnergySplit split = EnergySplit::VolumetricDeviatoric;
    StaggeredScheme scheme = StaggeredScheme::Anisotropic;
    double residual_stiffness = 1e-6;

    void validate() const;
};

/// In-plane small strain; `xy` is the tensor (not engineering) shear component.
struct StrainState2D {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;

    double trace() const { return xx + yy; }
};

struct StressState2D {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

struct CrackFunction {
    double alpha = 0.0;
    double dalpha = 0.0;
};

struct Degradation {
    double g = 1.0;
    double dg = -2.0;
};

struct SplitEnergy {
    double plus = 0.0;
    double minus = 0.0;
};

struct SplitStress {
    StressState2D plus;
    StressState2D minus;
};

/// Voigt tangents d(sigma_xx, sigma_yy, sigma_xy) / d(eps_xx, eps_yy, gamma_xy).
struct SplitTangent {
    Eigen::Matrix3d plus = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d minus = Eigen::Matrix3d::Zero();
};

enum class Reduction { PlaneStress, Beam };
enum class CalibrationInput { LengthScale, FractureEnergy };

struct Calibration {
    double length_scale = 0.0;
    double fracture_energy = 0.0;
    /// Set for PF-M, which borrows the PF-B relation without a derivation of its own.
    bool heuristic = false;
};

inline double macaulay(double a) { return 0.5 * (a + std::abs(a)); }

/// Throws DomainError unless 0 <= d <= 1.
CrackFunction geometric_function(PhaseFieldKind kind, double d);

/// c_alpha = 4 int_0^1 sqrt(alpha(b)) db.
double scaling_constant(PhaseFieldKind kind);

/// g(d) = (1 - d)^2 + residual, dg = -2 (1 - d).
Degradation degradation(double d, double residual_stiffness = 0.0);

/// Exact cell average of g over a linear triangle with the given nodal damage.
double mean_degradation(const std::array<double, 3>& d, double residual_stiffness);
/// Exact cell average of g over a linear two-node interval.
double mean_degradation(double d0, double d1, double residual_stiffness);

SplitEnergy split_energy(EnergySplit split, const StrainState2D& strain, double lambda, double mu);
SplitStress split_stress(EnergySplit split, const StrainState2D& strain, double lambda, double mu);
SplitTangent split_tangent(EnergySplit split, const StrainState2D& strain, double lambda, double mu);

/// Undecomposed density lambda/2 tr^2 + mu eps:eps.
double elastic_energy(const StrainState2D& strain, double lambda, double mu);
StressState2D elastic_stress(const StrainState2D& strain, double lambda, double mu);

/// Eigenvalues of a symmetric 2x2 tensor, descending.
std::array<double, 2> principal_values(double xx, double yy, double xy);

/// Normalized crack driving force. `principal_stresses` are effective (undegraded) principal
/// stresses, only used by PF-M; `strength` is the local tensile strength sigma_c.
double driving_force(PhaseFieldKind kind, double psi_plus, std::span<const double> principal_stresses,
                     double fracture_energy, double length_scale, double strength);
double driving_force(PhaseFieldKind kind, double psi_plus, std::span<const double> principal_stresses,
                     const GlassMaterial& material);

/// Relates l_c and G_f through the homogeneous-solution strength; the member not given is solved.
Calibration calibrate(PhaseFieldKind kind, Reduction reduction, CalibrationInput known, double value,
                      double young_modulus, double tensile_strength);
Calibration calibrate(PhaseFieldKind kind, Reduction reduction, CalibrationInput known, double value,
                      const GlassMaterial& material);

/// Peak stress of the spatially homogeneous 1D tension solution.
double homogeneous_peak_stress(PhaseFieldKind kind, double young_modulus, double fracture_energy,
                               double length_scale);

std::string_view to_string(PhaseFieldKind kind);
std::string_view to_string(EnergySplit split);
std::string_view to_string(StaggeredScheme scheme);
std::string_view to_string(Reduction reduction);

}  // namespace glassfrac
