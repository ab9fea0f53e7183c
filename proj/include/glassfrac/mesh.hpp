#pragma once

#include "glassfrac/materials.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace glassfrac {

enum class LayerTag : std::uint8_t { GlassBottom = 0, Interlayer = 1, GlassTop = 2, GlassMono = 3 };

inline bool is_glass(LayerTag tag) { return tag != LayerTag::Interlayer; }
std::string_view to_string(LayerTag tag);

struct SectionLayer {
    double thickness = 0.0;
    LayerTag tag = LayerTag::GlassMono;
};

struct RefinementBand {
    double x_min = 0.0;
    double x_max = 0.0;
    double size = 0.0; // target element size inside the band
};

struct RefinementSpec {
    std::vector<RefinementBand> bands;
    double default_size = 2e-3;
    /// Upper bound on the size ratio of adjacent elements.
    double grading_ratio = 1.3;
    /// x positions that must coincide with grid lines (supports, loads, probes).
    std::vector<double> breakpoints;
    int min_glass_elements = 4;
    int min_interlayer_elements = 2;
};

enum class Symmetry { Half, Full };

/// Structured triangulation of a layered longitudinal section; y = 0 is the bottom face.
struct Mesh2D {
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<LayerTag> tags;                // one per triangle
    std::vector<SectionLayer> layers;          // bottom to top
    std::vector<double> interfaces;            // y of every layer boundary, bottom to top
    std::vector<double> x_lines;               // vertical grid lines
    std::vector<std::vector<int>> line_nodes;  // node ids on each grid line, bottom to top
    Symmetry symmetry = Symmetry::Half;
    double length = 0.0;                       // full specimen length

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_elements() const { return triangles.size(); }
    double area(std::size_t e) const;
    Point2 centroid(std::size_t e) const;
    double height() const { return interfaces.back(); }
    /// Grid line closest to x; throws QueryError when x is off the mesh.
    std::size_t line_at(double x) const;
};

struct Mesh1D {
    std::vector<double> nodes; // strictly increasing
    Symmetry symmetry = Symmetry::Half;
    double length = 0.0;       // full specimen length

    std::size_t num_elements() const { return nodes.size() - 1; }
    double size(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
    std::size_t node_at(double x) const;
};

/// Node set and element set of the glass-only damage subdomain.
struct GlassSubmesh {
    std::vector<int> parent_to_sub; // -1 for nodes outside the glass
    std::vector<int> sub_to_parent;
    std::vector<int> elements;      // parent element ids
    std::vector<std::array<int, 3>> triangles; // in submesh node numbering

    std::size_t num_nodes() const { return sub_to_parent.size(); }
};

/// Graded 1D node positions on [x0, x1] honoring bands, grading and breakpoints.
std::vector<double> graded_grid(double x0, double x1, const RefinementSpec& spec);

Mesh2D build_section_mesh(double length, std::span<const SectionLayer> layers, const RefinementSpec& refinement,
                          Symmetry symmetry);

Mesh1D build_beam_mesh(double length, const RefinementSpec& refinement, Symmetry symmetry);

GlassSubmesh glass_submesh(const Mesh2D& mesh);

/// Smallest interior angle of triangle e, degrees.
double min_angle_deg(const Mesh2D& mesh, std::size_t e);

}  // namespace glassfrac
