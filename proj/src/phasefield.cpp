#include "glassfrac/phasefield.hpp"

#include "glassfrac/errors.hpp"

#include <cmath>
#include <sstream>

namespace glassfrac {

void Formulation::validate() const
{
    if (!(residual_stiffness >= 0.0 && residual_stiffness <= 1e-3))
        throw ConfigError("residual_stiffness must lie in [0, 1e-3]");
}

CrackFunction geometric_function(PhaseFieldKind kind, double d)
{
    if (!(d >= 0.0 && d <= 1.0)) {
        std::ostringstream msg;
        msg << "damage " << d << " outside [0, 1]";
        throw DomainError(msg.str());
    }
    switch (kind) {
    case PhaseFieldKind::PfB:
    case PhaseFieldKind::PfM:
        return {d * d, 2.0 * d};
    case PhaseFieldKind::PfP:
        return {d, 1.0};
    }
    return {};
}

double scaling_constant(PhaseFieldKind kind)
{
    return kind == PhaseFieldKind::PfP ? 8.0 / 3.0 : 2.0;
}

Degradation degradation(double d, double residual_stiffness)
{
    const double e = 1.0 - d;
    return {e * e + residual_stiffness, -2.0 * e};
}

double mean_degradation(const std::array<double, 3>& d, double residual_stiffness)
{
    const double e0 = 1.0 - d[0], e1 = 1.0 - d[1], e2 = 1.0 - d[2];
    const double s = e0 + e1 + e2;
    return (e0 * e0 + e1 * e1 + e2 * e2 + s * s) / 12.0 + residual_stiffness;
}

double mean_degradation(double d0, double d1, double residual_stiffness)
{
    const double e0 = 1.0 - d0, e1 = 1.0 - d1;
    return (e0 * e0 + e0 * e1 + e1 * e1) / 3.0 + residual_stiffness;
}

std::array<double, 2> principal_values(double xx, double yy, double xy)
{
    const double m = 0.5 * (xx + yy);
    const double r = std::hypot(0.5 * (xx - yy), xy);
    return {m + r, m - r};
}

namespace {

struct Eigen2 {
    double e1 = 0.0, e2 = 0.0; // e1 >= e2
    double c = 1.0, s = 0.0;   // n1 = (c, s), n2 = (-s, c)
};

Eigen2 eigen_decompose(const StrainState2D& eps)
{
    Eigen2 out;
    const double m = 0.5 * (eps.xx + eps.yy);
    const double half_diff = 0.5 * (eps.xx - eps.yy);
    const double r = std::hypot(half_diff, eps.xy);
    const double norm = std::sqrt(eps.xx * eps.xx + eps.yy * eps.yy + 2.0 * eps.xy * eps.xy);
    out.e1 = m + r;
    out.e2 = m - r;
    if (r <= 1e-12 * norm || r == 0.0) {
        // umbilic: any orthonormal basis diagonalizes eps
        out.c = 1.0;
        out.s = 0.0;
        return out;
    }
    const double theta = 0.5 * std::atan2(eps.xy, half_diff);
    out.c = std::cos(theta);
    out.s = std::sin(theta);
    return out;
}

/// sum_a f(e_a) n_a (x) n_a for the two principal directions.
StressState2D spectral_recompose(const Eigen2& eg, double f1, double f2)
{
    const double c = eg.c, s = eg.s;
    return {f1 * c * c + f2 * s * s, f1 * s * s + f2 * c * c, (f1 - f2) * c * s};
}

}  // namespace

double elastic_energy(const StrainState2D& e, double lambda, double mu)
{
    const double tr = e.trace();
    return 0.5 * lambda * tr * tr + mu * (e.xx * e.xx + e.yy * e.yy + 2.0 * e.xy * e.xy);
}

StressState2D elastic_stress(const StrainState2D& e, double lambda, double mu)
{
    const double tr = e.trace();
    return {lambda * tr + 2.0 * mu * e.xx, lambda * tr + 2.0 * mu * e.yy, 2.0 * mu * e.xy};
}

SplitEnergy split_energy(EnergySplit split, const StrainState2D& e, double lambda, double mu)
{
    const double tr = e.trace();
    const double tp = macaulay(tr), tm = macaulay(-tr);
    if (split == EnergySplit::VolumetricDeviatoric) {
        const double bulk = lambda + mu;
        const double dxx = e.xx - 0.5 * tr, dyy = e.yy - 0.5 * tr;
        const double dev = dxx * dxx + dyy * dyy + 2.0 * e.xy * e.xy;
        return {0.5 * bulk * tp * tp + mu * dev, 0.5 * bulk * tm * tm};
    }
    const Eigen2 eg = eigen_decompose(e);
    const double p1 = macaulay(eg.e1), p2 = macaulay(eg.e2);
    const double m1 = macaulay(-eg.e1), m2 = macaulay(-eg.e2);
    return {0.5 * lambda * tp * tp + mu * (p1 * p1 + p2 * p2), 0.5 * lambda * tm * tm + mu * (m1 * m1 + m2 * m2)};
}

SplitStress split_stress(EnergySplit split, const StrainState2D& e, double lambda, double mu)
{
    const double tr = e.trace();
    const double tp = macaulay(tr), tm = macaulay(-tr);
    SplitStress out;
    if (split == EnergySplit::VolumetricDeviatoric) {
        const double bulk = lambda + mu;
        const double dxx = e.xx - 0.5 * tr, dyy = e.yy - 0.5 * tr;
        out.plus = {bulk * tp + 2.0 * mu * dxx, bulk * tp + 2.0 * mu * dyy, 2.0 * mu * e.xy};
        out.minus = {-bulk * tm, -bulk * tm, 0.0};
        return out;
    }
    const Eigen2 eg = eigen_decompose(e);
    const StressState2D ep = spectral_recompose(eg, macaulay(eg.e1), macaulay(eg.e2));
    const StressState2D em = spectral_recompose(eg, -macaulay(-eg.e1), -macaulay(-eg.e2));
    out.plus = {lambda * tp + 2.0 * mu * ep.xx, lambda * tp + 2.0 * mu * ep.yy, 2.0 * mu * ep.xy};
    out.minus = {-lambda * tm + 2.0 * mu * em.xx, -lambda * tm + 2.0 * mu * em.yy, 2.0 * mu * em.xy};
    return out;
}

SplitTangent split_tangent(EnergySplit split, const StrainState2D& e, double lambda, double mu)
{
    const double tr = e.trace();
    // Heaviside taken as 1/2 at zero so the parts still sum to the elastic tangent there.
    auto heaviside = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); };
    const double hp = heaviside(tr);
    const double hm = heaviside(-tr);
    Eigen::Matrix3d mm = Eigen::Matrix3d::Zero();
    mm.topLeftCorner<2, 2>().setOnes();
    SplitTangent out;
    if (split == EnergySplit::VolumetricDeviatoric) {
        const double bulk = lambda + mu;
        Eigen::Matrix3d dev;
        dev << 1.0, -1.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
        out.plus = bulk * hp * mm + mu * dev;
        out.minus = bulk * hm * mm;
        return out;
    }
    // Principal frame tangent of mu sum <+-e_a>^2, rotated back with the Voigt strain transform.
    const Eigen2 eg = eigen_decompose(e);
    auto frame_tangent = [&](double sign) {
        const double f1 = macaulay(sign * eg.e1), f2 = macaulay(sign * eg.e2);
        const double h1 = heaviside(sign * eg.e1);
        const double h2 = heaviside(sign * eg.e2);
        const double gap = eg.e1 - eg.e2;
        double shear;
        if (std::abs(gap) > 1e-12 * (std::abs(eg.e1) + std::abs(eg.e2)) && gap != 0.0)
            shear = sign * (f1 - f2) / gap;
        else
            shear = 0.5 * (h1 + h2);
        Eigen::Matrix3d dp = Eigen::Matrix3d::Zero();
        dp(0, 0) = 2.0 * mu * h1;
        dp(1, 1) = 2.0 * mu * h2;
        dp(2, 2) = mu * shear;
        return dp;
    };
    const double c = eg.c, s = eg.s;
    Eigen::Matrix3d t;
    t << c * c, s * s, c * s, s * s, c * c, -c * s, -2.0 * c * s, 2.0 * c * s, c * c - s * s;
    out.plus = lambda * hp * mm + t.transpose() * frame_tangent(1.0) * t;
    out.minus = lambda * hm * mm + t.transpose() * frame_tangent(-1.0) * t;
    return out;
}

double driving_force(PhaseFieldKind kind, double psi_plus, std::span<const double> principal_stresses,
                     double fracture_energy, double length_scale, double strength)
{
    if (kind == PhaseFieldKind::PfM) {
        double sum = 0.0;
        for (double s : principal_stresses) {
            const double p = macaulay(s);
            sum += p * p;
        }
        return macaulay(sum / (strength * strength) - 1.0);
    }
    return std::max(0.0, 2.0 * psi_plus / (fracture_energy / length_scale));
}

double driving_force(PhaseFieldKind kind, double psi_plus, std::span<const double> principal_stresses,
                     const GlassMaterial& material)
{
    return driving_force(kind, psi_plus, principal_stresses, material.fracture_energy, material.length_scale,
                         material.tensile_strength);
}

namespace {

double strength_coefficient(PhaseFieldKind kind)
{
    return kind == PhaseFieldKind::PfP ? 3.0 / 8.0 : 27.0 / 256.0;
}

}  // namespace

Calibration calibrate(PhaseFieldKind kind, Reduction reduction, CalibrationInput known, double value,
                      double young_modulus, double tensile_strength)
{
    if (!(value > 0.0)) throw DomainError("calibration input must be > 0");
    if (!(young_modulus > 0.0) || !(tensile_strength > 0.0))
        throw DomainError("calibration requires positive E and f_t");
    const double factor = (reduction == Reduction::Beam ? 6.0 : 1.0) * strength_coefficient(kind);
    const double ratio = young_modulus / (tensile_strength * tensile_strength);
    Calibration out;
    out.heuristic = kind == PhaseFieldKind::PfM;
    if (known == CalibrationInput::LengthScale) {
        out.length_scale = value;
        out.fracture_energy = value / (factor * ratio);
    } else {
        out.fracture_energy = value;
        out.length_scale = factor * ratio * value;
    }
    return out;
}

Calibration calibrate(PhaseFieldKind kind, Reduction reduction, CalibrationInput known, double value,
                      const GlassMaterial& material)
{
    return calibrate(kind, reduction, known, value, material.young_modulus, material.tensile_strength);
}

double homogeneous_peak_stress(PhaseFieldKind kind, double young_modulus, double fracture_energy,
                               double length_scale)
{
    return std::sqrt(strength_coefficient(kind) * young_modulus * fracture_energy / length_scale);
}

std::string_view to_string(PhaseFieldKind kind)
{
    switch (kind) {
    case PhaseFieldKind::PfB: return "pf-b";
    case PhaseFieldKind::PfM: return "pf-m";
    case PhaseFieldKind::PfP: return "pf-p";
    }
    return "?";
}

std::string_view to_string(EnergySplit split)
{
    return split == EnergySplit::Spectral ? "spectral" : "volumetric-deviatoric";
}

std::string_view to_string(StaggeredScheme scheme)
{
    return scheme == StaggeredScheme::Anisotropic ? "anisotropic" : "hybrid";
}

std::string_view to_string(Reduction reduction)
{
    return reduction == Reduction::Beam ? "beam" : "plane-stress";
}

}  // namespace glassfrac
