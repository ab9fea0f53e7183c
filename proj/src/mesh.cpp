#include "glassfrac/mesh.hpp"

#include "glassfrac/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

namespace glassfrac {

std::string_view to_string(LayerTag tag)
{
    switch (tag) {
    case LayerTag::GlassBottom: return "glass_bottom";
    case LayerTag::Interlayer: return "interlayer";
    case LayerTag::GlassTop: return "glass_top";
    case LayerTag::GlassMono: return "glass_mono";
    }
    return "?";
}

double Mesh2D::area(std::size_t e) const
{
    const auto& t = triangles[e];
    const Point2 a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point2 Mesh2D::centroid(std::size_t e) const
{
    const auto& t = triangles[e];
    return {(nodes[t[0]].x + nodes[t[1]].x + nodes[t[2]].x) / 3.0,
            (nodes[t[0]].y + nodes[t[1]].y + nodes[t[2]].y) / 3.0};
}

std::size_t Mesh2D::line_at(double x) const
{
    const auto it = std::lower_bound(x_lines.begin(), x_lines.end(), x);
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == x_lines.begin() ? it : std::prev(it)}) {
        if (cand == x_lines.end()) continue;
        const double d = std::abs(*cand - x);
        if (d < dist) {
            dist = d;
            best = static_cast<std::size_t>(cand - x_lines.begin());
        }
    }
    // half the local element size
    const std::size_t nb = best + 1 < x_lines.size() ? best + 1 : best - 1;
    if (dist > 0.5 * std::abs(x_lines[nb] - x_lines[best]) + 1e-12) {
        std::ostringstream msg;
        msg << "x = " << x << " is not on the mesh";
        throw QueryError(msg.str());
    }
    return best;
}

std::size_t Mesh1D::node_at(double x) const
{
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == nodes.begin() ? it : std::prev(it)}) {
        if (cand == nodes.end()) continue;
        const double d = std::abs(*cand - x);
        if (d < dist) {
            dist = d;
            best = static_cast<std::size_t>(cand - nodes.begin());
        }
    }
    const std::size_t nb = best + 1 < nodes.size() ? best + 1 : best - 1;
    if (dist > 0.5 * std::abs(nodes[nb] - nodes[best]) + 1e-12) {
        std::ostringstream msg;
        msg << "x = " << x << " is not on the beam mesh";
        throw QueryError(msg.str());
    }
    return best;
}

namespace {

constexpr double kPointTol = 1e-12;

void validate_refinement(double x0, double x1, const RefinementSpec& spec)
{
    std::vector<std::string> bad;
    if (!(x1 > x0)) bad.emplace_back("mesh domain is empty");
    if (!(spec.default_size > 0.0)) bad.emplace_back("default_size must be > 0");
    if (!(spec.grading_ratio >= 1.0)) bad.emplace_back("grading_ratio must be >= 1");
    for (std::size_t i = 0; i < spec.bands.size(); ++i) {
        const auto& b = spec.bands[i];
        const std::string tag = "refinement band " + std::to_string(i);
        if (!(b.size > 0.0)) bad.push_back(tag + ": size must be > 0");
        if (b.size > spec.default_size) bad.push_back(tag + ": size exceeds default_size");
        if (!(b.x_max > b.x_min)) bad.push_back(tag + ": x_max must exceed x_min");
        if (b.x_max <= x0 || b.x_min >= x1) bad.push_back(tag + ": lies outside the mesh domain");
    }
    for (double p : spec.breakpoints)
        if (p < x0 - kPointTol || p > x1 + kPointTol) {
            std::ostringstream msg;
            msg << "breakpoint x = " << p << " lies outside the mesh domain";
            bad.push_back(msg.str());
        }
    if (!bad.empty()) throw ConfigError("invalid refinement specification", std::move(bad));
}

}  // namespace

std::vector<double> graded_grid(double x0, double x1, const RefinementSpec& spec)
{
    validate_refinement(x0, x1, spec);

    // Target size grows linearly away from each band; with slope q the equidistributed
    // elements grow geometrically by about exp(q) per element.
    const double slope = 0.9 * std::log(spec.grading_ratio);
    auto target = [&](double x) {
        double h = spec.default_size;
        for (const auto& b : spec.bands) {
            const double dist = x < b.x_min ? b.x_min - x : (x > b.x_max ? x - b.x_max : 0.0);
            h = std::min(h, b.size + slope * dist);
        }
        return h;
    };

    double h_min = spec.default_size;
    for (const auto& b : spec.bands) h_min = std::min(h_min, b.size);
    const std::size_t samples =
        std::min<std::size_t>(4'000'000, static_cast<std::size_t>(std::ceil((x1 - x0) / (h_min / 40.0))) + 1);
    std::vector<double> xs(samples + 1), phi(samples + 1, 0.0);
    for (std::size_t k = 0; k <= samples; ++k) xs[k] = x0 + (x1 - x0) * static_cast<double>(k) / samples;
    double prev = 1.0 / target(xs[0]);
    for (std::size_t k = 1; k <= samples; ++k) {
        const double cur = 1.0 / target(xs[k]);
        phi[k] = phi[k - 1] + 0.5 * (prev + cur) * (xs[k] - xs[k - 1]);
        prev = cur;
    }
    auto phi_at = [&](double x) {
        const double pos = (x - x0) / (x1 - x0) * samples;
        const std::size_t k = std::min<std::size_t>(samples - 1, static_cast<std::size_t>(std::max(0.0, pos)));
        const double w = pos - static_cast<double>(k);
        return phi[k] + w * (phi[k + 1] - phi[k]);
    };
    auto x_at = [&](double p) {
        const auto it = std::upper_bound(phi.begin(), phi.end(), p);
        std::size_t k = static_cast<std::size_t>(it - phi.begin());
        k = std::clamp<std::size_t>(k, 1, samples);
        const double span = phi[k] - phi[k - 1];
        const double w = span > 0.0 ? (p - phi[k - 1]) / span : 0.0;
        return xs[k - 1] + w * (xs[k] - xs[k - 1]);
    };

    std::vector<double> hard{x0, x1};
    for (const auto& b : spec.bands) {
        if (b.x_min > x0 && b.x_min < x1) hard.push_back(b.x_min);
        if (b.x_max > x0 && b.x_max < x1) hard.push_back(b.x_max);
    }
    for (double p : spec.breakpoints) hard.push_back(std::clamp(p, x0, x1));
    std::sort(hard.begin(), hard.end());
    std::vector<double> uniq;
    for (double p : hard)
        if (uniq.empty() || p - uniq.back() > kPointTol) uniq.push_back(p);

    std::vector<double> grid{uniq.front()};
    for (std::size_t s = 0; s + 1 < uniq.size(); ++s) {
        const double pa = phi_at(uniq[s]), pb = phi_at(uniq[s + 1]);
        const int n = std::max(1, static_cast<int>(std::ceil(pb - pa - 1e-9)));
        for (int k = 1; k < n; ++k) grid.push_back(x_at(pa + (pb - pa) * k / n));
        grid.push_back(uniq[s + 1]);
    }
    return grid;
}

namespace {

double local_size(const std::vector<double>& xs, std::size_t i)
{
    if (i == 0) return xs[1] - xs[0];
    if (i + 1 == xs.size()) return xs[i] - xs[i - 1];
    return 0.5 * (xs[i + 1] - xs[i - 1]);
}

}  // namespace

Mesh2D build_section_mesh(double length, std::span<const SectionLayer> layers, const RefinementSpec& refinement,
                          Symmetry symmetry)
{
    {
        std::vector<std::string> bad;
        if (layers.empty()) bad.emplace_back("at least one layer is required");
        for (std::size_t k = 0; k < layers.size(); ++k)
            if (!(layers[k].thickness > 0.0)) bad.push_back("layer " + std::to_string(k) + ": thickness must be > 0");
        if (!(length > 0.0)) bad.emplace_back("length must be > 0");
        if (!bad.empty()) throw ConfigError("invalid section", std::move(bad));
    }

    Mesh2D mesh;
    mesh.symmetry = symmetry;
    mesh.length = length;
    mesh.layers.assign(layers.begin(), layers.end());
    mesh.interfaces.push_back(0.0);
    for (const auto& l : layers) mesh.interfaces.push_back(mesh.interfaces.back() + l.thickness);

    const double x_end = symmetry == Symmetry::Half ? 0.5 * length : length;
    validate_refinement(0.0, x_end, refinement);
    // Columns wider than ~2.7x the thinnest row would push angles below 20 degrees.
    RefinementSpec capped = refinement;
    double thinnest_row = std::numeric_limits<double>::infinity();
    for (const auto& l : layers)
        thinnest_row = std::min(
            thinnest_row, l.thickness / (is_glass(l.tag) ? refinement.min_glass_elements : refinement.min_interlayer_elements));
    const double cap = 2.7 * thinnest_row;
    capped.default_size = std::min(capped.default_size, cap);
    for (auto& b : capped.bands) b.size = std::min(b.size, cap);
    mesh.x_lines = graded_grid(0.0, x_end, capped);
    const std::size_t nx = mesh.x_lines.size();

    // per line, per layer subdivision counts
    std::vector<std::vector<int>> counts(nx, std::vector<int>(layers.size()));
    for (std::size_t i = 0; i < nx; ++i) {
        const double s = local_size(mesh.x_lines, i);
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const int min_count =
                is_glass(layers[k].tag) ? refinement.min_glass_elements : refinement.min_interlayer_elements;
            counts[i][k] = std::max(min_count, static_cast<int>(std::ceil(layers[k].thickness / s - 1e-9)));
        }
    }

    // nodes, line by line; layer_offset[i][k] = index within line of layer k's bottom node
    std::vector<std::vector<int>> layer_offset(nx, std::vector<int>(layers.size() + 1));
    mesh.line_nodes.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = mesh.x_lines[i];
        auto& line = mesh.line_nodes[i];
        for (std::size_t k = 0; k < layers.size(); ++k) {
            layer_offset[i][k] = static_cast<int>(line.size());
            const int n = counts[i][k];
            const double y0 = mesh.interfaces[k], t = layers[k].thickness;
            for (int j = (k == 0 ? 0 : 1); j <= n; ++j) {
                // exact interface coordinates
                const double y = j == n ? mesh.interfaces[k + 1] : y0 + t * j / n;
                line.push_back(static_cast<int>(mesh.nodes.size()));
                mesh.nodes.push_back({x, y});
            }
            if (k == 0) layer_offset[i][0] = 0;
        }
        layer_offset[i][layers.size()] = static_cast<int>(line.size()) - 1;
    }
    // layer k on line i spans line indices [bottom_index(k), bottom_index(k) + counts]
    auto layer_nodes = [&](std::size_t i, std::size_t k) {
        const int first = k == 0 ? 0 : layer_offset[i][k] - 1;
        const int n = counts[i][k];
        return std::span<const int>(mesh.line_nodes[i].data() + first, static_cast<std::size_t>(n + 1));
    };

    auto push = [&](int a, int b, int c, LayerTag tag) {
        std::array<int, 3> t{a, b, c};
        const Point2 pa = mesh.nodes[a], pb = mesh.nodes[b], pc = mesh.nodes[c];
        const double twice_area = (pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y);
        if (twice_area < 0.0) std::swap(t[1], t[2]);
        mesh.triangles.push_back(t);
        mesh.tags.push_back(tag);
    };

    for (std::size_t i = 0; i + 1 < nx; ++i) {
        int row_base = 0;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto left = layer_nodes(i, k);
            const auto right = layer_nodes(i + 1, k);
            const LayerTag tag = layers[k].tag;
            const int nl = static_cast<int>(left.size()) - 1;
            const int nr = static_cast<int>(right.size()) - 1;
            if (nl == nr) {
                for (int j = 0; j < nl; ++j) {
                    const int bl = left[j], br = right[j], tr = right[j + 1], tl = left[j + 1];
                    if ((static_cast<int>(i) + row_base + j) % 2 == 0) {
                        push(bl, br, tr, tag);
                        push(bl, tr, tl, tag);
                    } else {
                        push(bl, br, tl, tag);
                        push(br, tr, tl, tag);
                    }
                }
            } else {
                int a = 0, b = 0;
                while (a < nl || b < nr) {
                    bool advance_left;
                    if (a == nl)
                        advance_left = false;
                    else if (b == nr)
                        advance_left = true;
                    else {
                        const double tl = static_cast<double>(a + 1) / nl;
                        const double tr = static_cast<double>(b + 1) / nr;
                        advance_left = tl < tr || (tl == tr && (a + b) % 2 == 0);
                    }
                    if (advance_left) {
                        push(left[a], right[b], left[a + 1], tag);
                        ++a;
                    } else {
                        push(left[a], right[b], right[b + 1], tag);
                        ++b;
                    }
                }
            }
            row_base += nl;
        }
    }
    return mesh;
}

Mesh1D build_beam_mesh(double length, const RefinementSpec& refinement, Symmetry symmetry)
{
    if (!(length > 0.0)) throw ConfigError("beam length must be > 0");
    Mesh1D mesh;
    mesh.symmetry = symmetry;
    mesh.length = length;
    mesh.nodes = graded_grid(0.0, symmetry == Symmetry::Half ? 0.5 * length : length, refinement);
    return mesh;
}

GlassSubmesh glass_submesh(const Mesh2D& mesh)
{
    GlassSubmesh sub;
    sub.parent_to_sub.assign(mesh.num_nodes(), -1);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        if (!is_glass(mesh.tags[e])) continue;
        sub.elements.push_back(static_cast<int>(e));
        for (int n : mesh.triangles[e]) sub.parent_to_sub[n] = 0;
    }
    if (sub.elements.empty()) throw ConfigError("mesh has no glass elements");
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
        if (sub.parent_to_sub[n] < 0) continue;
        sub.parent_to_sub[n] = static_cast<int>(sub.sub_to_parent.size());
        sub.sub_to_parent.push_back(static_cast<int>(n));
    }
    sub.triangles.reserve(sub.elements.size());
    for (int e : sub.elements) {
        const auto& t = mesh.triangles[e];
        sub.triangles.push_back({sub.parent_to_sub[t[0]], sub.parent_to_sub[t[1]], sub.parent_to_sub[t[2]]});
    }
    return sub;
}

double min_angle_deg(const Mesh2D& mesh, std::size_t e)
{
    const auto& t = mesh.triangles[e];
    double best = 180.0;
    for (int k = 0; k < 3; ++k) {
        const Point2 p = mesh.nodes[t[k]], a = mesh.nodes[t[(k + 1) % 3]], b = mesh.nodes[t[(k + 2) % 3]];
        const double ux = a.x - p.x, uy = a.y - p.y, vx = b.x - p.x, vy = b.y - p.y;
        const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
        best = std::min(best, ang * 180.0 / std::numbers::pi);
    }
    return best;
}

}  // namespace glassfrac
