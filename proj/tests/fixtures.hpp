#pragma once

#include "glassfrac/fem2d.hpp"

#include <vector>

namespace fixtures {

using namespace glassfrac;

/// Coarse half monolith, 4 rows through the thickness.
inline Mesh2D coarse_monolith(double size = 10e-3, Symmetry symmetry = Symmetry::Half)
{
    RefinementSpec r;
    r.default_size = size;
    r.breakpoints = {0.05, 0.3, 0.45};
    const std::vector<SectionLayer> layers{{0.02, LayerTag::GlassMono}};
    return build_section_mesh(1.1, layers, r, symmetry);
}

inline PlaneStressSetup monolith_setup(Formulation formulation, double size = 10e-3,
                                       Symmetry symmetry = Symmetry::Half)
{
    PlaneStressSetup s;
    s.mesh = coarse_monolith(size, symmetry);
    s.formulation = formulation;
    s.glass.length_scale = 3e-3;
    s.glass.fracture_energy =
        calibrate(formulation.kind, Reduction::PlaneStress, CalibrationInput::LengthScale, 3e-3, 70e9, 45e6)
            .fracture_energy;
    s.mid_probe = {0.55, 0.0};
    s.quarter_probe = {0.3, 0.02};
    return s;
}

inline Formulation formulation(PhaseFieldKind kind, StaggeredScheme scheme,
                               EnergySplit split = EnergySplit::VolumetricDeviatoric)
{
    Formulation f;
    f.kind = kind;
    f.scheme = scheme;
    f.split = split;
    return f;
}

/// Uniaxial plane-stress field u = (e x, -nu e y).
inline Vector uniaxial_field(const Mesh2D& mesh, double e, double nu)
{
    Vector u(2 * mesh.num_nodes());
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
        u[2 * n] = e * mesh.nodes[n].x;
        u[2 * n + 1] = -nu * e * mesh.nodes[n].y;
    }
    return u;
}

}  // namespace fixtures
