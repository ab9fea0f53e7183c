#pragma once

#include <filesystem>
#include <limits>
#include <vector>

namespace glassfrac {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Isotropic elastic glass with strength and phase-field regularization data.
struct GlassMaterial {
    double young_modulus = 70e9;    // Pa
    double poisson_ratio = 0.22;
    double tensile_strength = 45e6; // Pa
    double fracture_energy = 231.4; // J/m^2
    double length_scale = 3e-3;     // m

    /// Throws ConfigError if any invariant is violated.
    void validate() const;

    double shear_modulus() const { return young_modulus / (2.0 * (1.0 + poisson_ratio)); }
    /// Plane-stress reduced first Lame parameter E nu / (1 - nu^2).
    double plane_stress_lambda() const
    {
        return young_modulus * poisson_ratio / (1.0 - poisson_ratio * poisson_ratio);
    }
};

/// Axis-aligned box in model coordinates (closed).
struct Box {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    double y_min = -std::numeric_limits<double>::infinity();
    double y_max = std::numeric_limits<double>::infinity();

    bool contains(Point2 p) const
    {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

struct StrengthPatch {
    Box region;
    double factor = 1.0; // in (0, 1]
};

/// Tensile strength with locally reduced patches; overlapping patches compose by minimum.
struct StrengthField {
    double base_strength = 45e6;
    std::vector<StrengthPatch> patches;

    void validate() const;
};

double effective_strength(const StrengthField& field, Point2 point);

struct PronyTerm {
    double relaxation_time = 0.0; // s
    double shear_modulus = 0.0;   // Pa
};

/// Generalized Maxwell relaxation modulus G(t) = G_inf + sum G_p exp(-t / tau_p).
struct PronySeries {
    double long_term_modulus = 0.0; // Pa
    std::vector<PronyTerm> terms;

    void validate() const;
    double instantaneous_modulus() const;
};

/// Williams-Landel-Ferry time-temperature shift, base-10 form.
struct WlfShift {
    double reference_temperature = 20.0; // degC
    double c1 = 0.0;
    double c2 = 0.0; // degC
};

struct InterlayerModel {
    PronySeries prony;
    WlfShift wlf;
    double poisson_ratio = 0.49;

    void validate() const;
};

struct ElasticConstants {
    double young_modulus = 0.0;
    double poisson_ratio = 0.0;
};

/// a_T = 10^(-C1 (T - T0) / (C2 + T - T0)); throws DomainError at the pole.
double wlf_shift_factor(const WlfShift& wlf, double temperature);

/// Equivalent elastic shear modulus for a load of total `duration` seconds,
/// evaluated at mid-interval: G_inf + sum G_p exp(-(t/2) / (a_T tau_p)).
/// `duration` may be +infinity (long-term limit).
double equivalent_shear_modulus(const InterlayerModel& model, double duration, double temperature);

/// E = 2 G (1 + nu) with the interlayer Poisson ratio passed through.
ElasticConstants equivalent_elastic_constants(const InterlayerModel& model, double duration,
                                              double temperature);

/// Built-in interlayer data at T0 = 20 degC.
InterlayerModel eva_interlayer();
InterlayerModel pvb_interlayer();

/// Reads a `tau_s,G_Pa` CSV. A row with tau_s = inf carries the long-term modulus.
PronySeries read_prony_csv(const std::filesystem::path& path);

}  // namespace glassfrac
