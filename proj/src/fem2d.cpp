#include "glassfrac/fem2d.hpp"

#include "glassfrac/errors.hpp"
#include "glassfrac/newton.hpp"
#include "glassfrac/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace glassfrac {

namespace {

using Mat3 = Eigen::Matrix3d;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

Mat3 elastic_tangent(double lambda, double mu)
{
    Mat3 c;
    c << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, mu;
    return c;
}

Eigen::Vector3d voigt(const StressState2D& s) { return {s.xx, s.yy, s.xy}; }

StressState2D add(const StressState2D& a, double ga, const StressState2D& b)
{
    return {ga * a.xx + b.xx, ga * a.yy + b.yy, ga * a.xy + b.xy};
}

int snapped_line(const Mesh2D& mesh, double x, const char* what)
{
    std::size_t i = 0;
    try {
        i = mesh.line_at(x);
    } catch (const QueryError&) {
        throw ConfigError(std::string(what) + " position lies outside the mesh");
    }
    if (std::abs(mesh.x_lines[i] - x) > 1e-9) {
        std::ostringstream msg;
        msg << what << " position x = " << x << " does not coincide with a mesh line";
        throw ConfigError(msg.str());
    }
    return static_cast<int>(i);
}

}  // namespace

BoundaryPlan apply_fourpoint_bcs(const Mesh2D& mesh, const FourPointGeometry& geometry)
{
    BoundaryPlan plan;
    auto fix = [&](int dof, double scale) {
        plan.dofs.push_back(dof);
        plan.scale.push_back(scale);
    };
    std::vector<double> supports{geometry.support_x}, loads{geometry.load_x};
    if (mesh.symmetry == Symmetry::Full) {
        supports.push_back(mesh.length - geometry.support_x);
        loads.push_back(mesh.length - geometry.load_x);
    }
    for (double x : supports) {
        const int node = mesh.line_nodes[snapped_line(mesh, x, "support")].front();
        fix(2 * node + 1, 0.0);
        plan.support_dofs.push_back(2 * node + 1);
    }
    for (double x : loads) {
        const int node = mesh.line_nodes[snapped_line(mesh, x, "load")].back();
        fix(2 * node + 1, -1.0);
        plan.load_dofs.push_back(2 * node + 1);
    }
    if (mesh.symmetry == Symmetry::Half) {
        for (int node : mesh.line_nodes.back()) fix(2 * node, 0.0);
        plan.reaction_factor = 2.0;
    } else {
        fix(2 * mesh.line_nodes[snapped_line(mesh, geometry.support_x, "support")].front(), 0.0);
        plan.reaction_factor = 1.0;
    }
    return plan;
}

PlaneStressModel::PlaneStressModel(PlaneStressSetup setup) : setup_(std::move(setup)), mesh_(setup_.mesh)
{
    setup_.glass.validate();
    setup_.strength.validate();
    setup_.formulation.validate();
    if (setup_.interlayer) setup_.interlayer->validate();
    if (!(setup_.width > 0.0)) throw ConfigError("specimen width must be > 0");

    submesh_ = glass_submesh(mesh_);
    plan_ = apply_fourpoint_bcs(mesh_, setup_.geometry);
    glass_lambda_ = setup_.glass.plane_stress_lambda();
    glass_mu_ = setup_.glass.shear_modulus();

    const bool has_interlayer =
        std::any_of(mesh_.tags.begin(), mesh_.tags.end(), [](LayerTag t) { return !is_glass(t); });
    if (has_interlayer && !setup_.interlayer) throw ConfigError("laminated section requires interlayer data");

    elements_.resize(mesh_.num_elements());
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
        auto& el = elements_[e];
        el.nodes = mesh_.triangles[e];
        const Point2 p0 = mesh_.nodes[el.nodes[0]], p1 = mesh_.nodes[el.nodes[1]], p2 = mesh_.nodes[el.nodes[2]];
        const double twice = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        el.area = 0.5 * twice;
        el.dndx = {(p1.y - p2.y) / twice, (p2.y - p0.y) / twice, (p0.y - p1.y) / twice};
        el.dndy = {(p2.x - p1.x) / twice, (p0.x - p2.x) / twice, (p1.x - p0.x) / twice};
        el.glass = is_glass(mesh_.tags[e]);
        if (el.glass) {
            for (int k = 0; k < 3; ++k) el.damage[k] = submesh_.parent_to_sub[el.nodes[k]];
            el.strength = effective_strength(setup_.strength, mesh_.centroid(e));
            const double ratio = el.strength / setup_.strength.base_strength;
            el.fracture_energy = setup_.glass.fracture_energy * ratio * ratio;
        }
    }

    const double height = mesh_.height();
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
        int on_bottom = 0, on_top = 0;
        for (int n : elements_[e].nodes) {
            on_bottom += std::abs(mesh_.nodes[n].y) <= 1e-12 * height;
            on_top += std::abs(mesh_.nodes[n].y - height) <= 1e-12 * height;
        }
        if (on_bottom == 2) bottom_faces_.push_back(static_cast<int>(e));
        if (on_top == 2) top_faces_.push_back(static_cast<int>(e));
    }

    // Triangles are generated column by column.
    column_start_.assign(mesh_.x_lines.size(), mesh_.num_elements());
    for (std::size_t e = mesh_.num_elements(); e-- > 0;) {
        const double cx = mesh_.centroid(e).x;
        const auto it = std::upper_bound(mesh_.x_lines.begin(), mesh_.x_lines.end(), cx);
        const std::size_t col = static_cast<std::size_t>(it - mesh_.x_lines.begin()) - 1;
        column_start_[col] = e;
    }
    for (std::size_t c = column_start_.size() - 1; c-- > 0;)
        column_start_[c] = std::min(column_start_[c], column_start_[c + 1]);

    displacement_matrix_ = make_displacement_pattern();
    damage_matrix_ = make_damage_pattern();
    update_time(0.0);
}

PatternAssembler PlaneStressModel::make_displacement_pattern() const
{
    std::vector<std::vector<int>> dofs(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e)
        for (int n : elements_[e].nodes) {
            dofs[e].push_back(2 * n);
            dofs[e].push_back(2 * n + 1);
        }
    return PatternAssembler(displacement_size(), dofs);
}

PatternAssembler PlaneStressModel::make_damage_pattern() const
{
    std::vector<std::vector<int>> dofs;
    dofs.reserve(submesh_.elements.size());
    for (int e : submesh_.elements) dofs.push_back({elements_[e].damage.begin(), elements_[e].damage.end()});
    return PatternAssembler(damage_size(), dofs);
}

void PlaneStressModel::update_time(double time)
{
    if (!setup_.interlayer) return;
    interlayer_ = equivalent_elastic_constants(*setup_.interlayer, time, setup_.temperature);
    const double e = interlayer_.young_modulus, nu = interlayer_.poisson_ratio;
    inter_lambda_ = e * nu / (1.0 - nu * nu);
    inter_mu_ = e / (2.0 * (1.0 + nu));
}

StrainState2D PlaneStressModel::strain(std::size_t e, const Vector& u) const
{
    const auto& el = elements_[e];
    StrainState2D s;
    for (int k = 0; k < 3; ++k) {
        const double ux = u[2 * el.nodes[k]], uy = u[2 * el.nodes[k] + 1];
        s.xx += el.dndx[k] * ux;
        s.yy += el.dndy[k] * uy;
        s.xy += 0.5 * (el.dndy[k] * ux + el.dndx[k] * uy);
    }
    return s;
}

double PlaneStressModel::element_degradation(std::size_t e, const Vector& d) const
{
    const auto& el = elements_[e];
    return mean_degradation({d[el.damage[0]], d[el.damage[1]], d[el.damage[2]]},
                            setup_.formulation.residual_stiffness);
}

StressState2D PlaneStressModel::element_stress(std::size_t e, const Vector& u, const Vector& d) const
{
    const auto eps = strain(e, u);
    if (!elements_[e].glass) return elastic_stress(eps, inter_lambda_, inter_mu_);
    const double g = element_degradation(e, d);
    if (setup_.formulation.scheme == StaggeredScheme::Hybrid) {
        const auto s = elastic_stress(eps, glass_lambda_, glass_mu_);
        return {g * s.xx, g * s.yy, g * s.xy};
    }
    const auto sp = split_stress(setup_.formulation.split, eps, glass_lambda_, glass_mu_);
    return add(sp.plus, g, sp.minus);
}

double PlaneStressModel::crack_driver(std::size_t e, const StrainState2D& eps) const
{
    const auto& f = setup_.formulation;
    const auto& el = elements_[e];
    if (f.kind != PhaseFieldKind::PfM) return split_energy(f.split, eps, glass_lambda_, glass_mu_).plus;
    const auto s = elastic_stress(eps, glass_lambda_, glass_mu_);
    const auto p = principal_values(s.xx, s.yy, s.xy);
    const std::array<double, 3> principal{p[0], p[1], 0.0};
    const double lc = setup_.glass.length_scale;
    const double drive = driving_force(PhaseFieldKind::PfM, 0.0, principal, el.fracture_energy, lc, el.strength);
    return drive * el.fracture_energy / (2.0 * lc);
}

void PlaneStressModel::assemble_displacement(const Vector& u, const Vector& d, PatternAssembler& matrix,
                                             Vector& internal_force) const
{
    assemble(u, d, matrix, internal_force, nullptr);
}

void PlaneStressModel::assemble(const Vector& u, const Vector& d, PatternAssembler& matrix, Vector& internal_force,
                                Vector* force_magnitude) const
{
    const std::size_t ne = elements_.size();
    std::vector<Mat6> ke(ne);
    std::vector<Vec6> fe(ne), fa(ne);
    const bool hybrid = setup_.formulation.scheme == StaggeredScheme::Hybrid;
    const double b = setup_.width;
    parallel_for(ne, [&](std::size_t e) {
        const auto& el = elements_[e];
        Mat36 bm = Mat36::Zero();
        for (int k = 0; k < 3; ++k) {
            bm(0, 2 * k) = el.dndx[k];
            bm(1, 2 * k + 1) = el.dndy[k];
            bm(2, 2 * k) = el.dndy[k];
            bm(2, 2 * k + 1) = el.dndx[k];
        }
        const auto eps = strain(e, u);
        Mat3 tangent;
        Eigen::Vector3d sigma;
        if (!el.glass) {
            tangent = elastic_tangent(inter_lambda_, inter_mu_);
            sigma = voigt(elastic_stress(eps, inter_lambda_, inter_mu_));
        } else {
            const double g = element_degradation(e, d);
            if (hybrid) {
                tangent = g * elastic_tangent(glass_lambda_, glass_mu_);
                sigma = g * voigt(elastic_stress(eps, glass_lambda_, glass_mu_));
            } else {
                const auto t = split_tangent(setup_.formulation.split, eps, glass_lambda_, glass_mu_);
                const auto s = split_stress(setup_.formulation.split, eps, glass_lambda_, glass_mu_);
                tangent = g * t.plus + t.minus;
                sigma = g * voigt(s.plus) + voigt(s.minus);
            }
        }
        const double w = b * el.area;
        ke[e] = w * bm.transpose() * tangent * bm;
        fe[e] = w * bm.transpose() * sigma;
        if (force_magnitude) {
            Vec6 ue;
            for (int k = 0; k < 3; ++k) {
                ue[2 * k] = std::abs(u[2 * el.nodes[k]]);
                ue[2 * k + 1] = std::abs(u[2 * el.nodes[k] + 1]);
            }
            fa[e] = ke[e].cwiseAbs() * ue;
        }
    });

    matrix.zero();
    internal_force.setZero(displacement_size());
    if (force_magnitude) force_magnitude->setZero(displacement_size());
    for (std::size_t e = 0; e < ne; ++e) {
        // row-major copy for the scatter map
        Eigen::Matrix<double, 6, 6, Eigen::RowMajor> rm = ke[e];
        matrix.add(e, {rm.data(), 36});
        const auto& nodes = elements_[e].nodes;
        for (int k = 0; k < 3; ++k) {
            internal_force[2 * nodes[k]] += fe[e][2 * k];
            internal_force[2 * nodes[k] + 1] += fe[e][2 * k + 1];
            if (force_magnitude) {
                (*force_magnitude)[2 * nodes[k]] += fa[e][2 * k];
                (*force_magnitude)[2 * nodes[k] + 1] += fa[e][2 * k + 1];
            }
        }
    }
}

Vector PlaneStressModel::internal_force(const Vector& u, const Vector& d) const
{
    Vector f = Vector::Zero(displacement_size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        const auto s = element_stress(e, u, d);
        const double w = setup_.width * el.area;
        for (int k = 0; k < 3; ++k) {
            f[2 * el.nodes[k]] += w * (el.dndx[k] * s.xx + el.dndy[k] * s.xy);
            f[2 * el.nodes[k] + 1] += w * (el.dndy[k] * s.yy + el.dndx[k] * s.xy);
        }
    }
    return f;
}

std::size_t PlaneStressModel::element_of_dof(int dof) const
{
    const int node = dof / 2;
    for (std::size_t e = 0; e < elements_.size(); ++e)
        for (int n : elements_[e].nodes)
            if (n == node) return e;
    return 0;
}

NewtonReport PlaneStressModel::solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options)
{
    const std::size_t n = displacement_size();
    if (static_cast<std::size_t>(u.size()) != n) u = Vector::Zero(n);
    std::vector<char> fixed(n, 0);
    for (std::size_t i = 0; i < plan_.dofs.size(); ++i) {
        fixed[plan_.dofs[i]] = 1;
        u[plan_.dofs[i]] = plan_.scale[i] * w;
    }
    const bool hybrid = setup_.formulation.scheme == StaggeredScheme::Hybrid;
    NewtonProblem problem;
    problem.assemble = [&](const Vector& v, PatternAssembler& k, Vector& f, Vector& magnitude) {
        assemble(v, d, k, f, &magnitude);
    };
    problem.internal_force = [&](const Vector& v) { return internal_force(v, d); };
    problem.describe_pivot = [&](long pivot) {
        return "near element " + std::to_string(element_of_dof(static_cast<int>(std::max(0L, pivot))));
    };
    problem.line_search = !hybrid;
    const double tolerance = hybrid ? std::max(options.tolerance, 1e-10) : options.tolerance;
    return newton_solve(problem, fixed, displacement_matrix_, displacement_factor_, tolerance, options.max_iterations,
                        u);
}

void PlaneStressModel::assemble_damage(const Vector& u, PatternAssembler& matrix, Vector& rhs) const
{
    const auto& f = setup_.formulation;
    const double lc = setup_.glass.length_scale;
    const double c = scaling_constant(f.kind);
    const double b = setup_.width;
    const bool linear_alpha = f.kind == PhaseFieldKind::PfP;
    const std::size_t ng = submesh_.elements.size();
    std::vector<Eigen::Matrix3d> ae(ng);
    std::vector<Eigen::Vector3d> be(ng);
    parallel_for(ng, [&](std::size_t k) {
        const std::size_t e = static_cast<std::size_t>(submesh_.elements[k]);
        const auto& el = elements_[e];
        const double h = crack_driver(e, strain(e, u));
        const double gf = el.fracture_energy;
        Eigen::Matrix3d mass;
        mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
        mass *= el.area / 12.0;
        Eigen::Matrix3d lap;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) lap(i, j) = el.area * (el.dndx[i] * el.dndx[j] + el.dndy[i] * el.dndy[j]);
        const Eigen::Vector3d load = Eigen::Vector3d::Constant(el.area / 3.0);
        if (linear_alpha) {
            ae[k] = b * (2.0 * h * mass + (2.0 * gf * lc / c) * lap);
            be[k] = b * (2.0 * h - gf / (c * lc)) * load;
        } else {
            ae[k] = b * ((2.0 * h + gf / lc) * mass + gf * lc * lap);
            be[k] = b * 2.0 * h * load;
        }
    });
    matrix.zero();
    rhs.setZero(damage_size());
    for (std::size_t k = 0; k < ng; ++k) {
        matrix.add(k, {ae[k].data(), 9}); // symmetric, storage order irrelevant
        const auto& el = elements_[submesh_.elements[k]];
        for (int i = 0; i < 3; ++i) rhs[el.damage[i]] += be[k][i];
    }
}

BoundSolveResult PlaneStressModel::solve_damage(const Vector& u, const Vector& lower, Vector& d)
{
    Vector rhs;
    assemble_damage(u, damage_matrix_, rhs);
    const Vector upper = Vector::Ones(damage_size());
    const auto result = damage_solver_.solve(damage_matrix_.matrix(), rhs, lower, upper, d);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "damage solve did not converge (" << result.method << ", " << result.iterations
            << " iterations, KKT residual " << result.kkt_residual << ", active lower " << result.active_lower
            << ", active upper " << result.active_upper << ")";
        throw SolverError(msg.str());
    }
    return result;
}

std::vector<DamageNode> PlaneStressModel::damage_nodes() const
{
    double split = std::numeric_limits<double>::infinity(); // bottom face of the top glass layer
    for (std::size_t i = 0; i < mesh_.layers.size(); ++i)
        if (mesh_.layers[i].tag == LayerTag::GlassTop) split = mesh_.interfaces[i];
    std::vector<DamageNode> out(submesh_.num_nodes());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Point2 p = mesh_.nodes[submesh_.sub_to_parent[k]];
        out[k] = {p.x, p.y, p.y >= split - 1e-12 ? 1 : 0};
    }
    return out;
}

EnergyBreakdown PlaneStressModel::energy(const Vector& u, const Vector& d) const
{
    const auto& f = setup_.formulation;
    const double lc = setup_.glass.length_scale;
    const double c = scaling_constant(f.kind);
    const double b = setup_.width;
    EnergyBreakdown out;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        const auto eps = strain(e, u);
        const double w = b * el.area;
        if (!el.glass) {
            out.elastic += w * elastic_energy(eps, inter_lambda_, inter_mu_);
            continue;
        }
        const auto psi = split_energy(f.split, eps, glass_lambda_, glass_mu_);
        out.elastic += w * (element_degradation(e, d) * psi.plus + psi.minus);

        const std::array<double, 3> dn{d[el.damage[0]], d[el.damage[1]], d[el.damage[2]]};
        double gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            gx += el.dndx[k] * dn[k];
            gy += el.dndy[k] * dn[k];
        }
        double alpha_integral;
        if (f.kind == PhaseFieldKind::PfP) {
            alpha_integral = el.area * (dn[0] + dn[1] + dn[2]) / 3.0;
        } else {
            const double s = dn[0] + dn[1] + dn[2];
            alpha_integral = el.area * (dn[0] * dn[0] + dn[1] * dn[1] + dn[2] * dn[2] + s * s) / 12.0;
        }
        out.dissipated += b * el.fracture_energy / c * (alpha_integral / lc + lc * el.area * (gx * gx + gy * gy));
    }
    return out;
}

std::size_t PlaneStressModel::locate(Point2 p) const
{
    const auto& xl = mesh_.x_lines;
    const double tol = 1e-9 * (xl.back() - xl.front());
    if (p.x < xl.front() - tol || p.x > xl.back() + tol || p.y < -tol || p.y > mesh_.height() + tol) {
        std::ostringstream msg;
        msg << "point (" << p.x << ", " << p.y << ") lies outside the mesh";
        throw QueryError(msg.str());
    }
    const auto it = std::upper_bound(xl.begin(), xl.end(), p.x);
    std::size_t col = it == xl.begin() ? 0 : static_cast<std::size_t>(it - xl.begin()) - 1;
    col = std::min(col, xl.size() - 2);
    const std::size_t first = col > 0 ? column_start_[col - 1] : 0;
    const std::size_t last = col + 2 < xl.size() ? column_start_[col + 1] : elements_.size();
    std::size_t best = elements_.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t e = first; e < last; ++e) {
        const auto& el = elements_[e];
        const Point2 p0 = mesh_.nodes[el.nodes[0]];
        // barycentric coordinates from the shape-function gradients
        const double l1 = el.dndx[1] * (p.x - p0.x) + el.dndy[1] * (p.y - p0.y);
        const double l2 = el.dndx[2] * (p.x - p0.x) + el.dndy[2] * (p.y - p0.y);
        const double l0 = 1.0 - l1 - l2;
        if (std::min({l0, l1, l2}) < -1e-9) continue;
        const Point2 c = mesh_.centroid(e);
        const double dist = std::hypot(c.x - p.x, c.y - p.y);
        if (dist < best_dist) {
            best_dist = dist;
            best = e;
        }
    }
    if (best == elements_.size()) throw QueryError("no element contains the probe point");
    return best;
}

double PlaneStressModel::probe_stress(const Vector& u, const Vector& d, Point2 point) const
{
    const double height = mesh_.height();
    const std::vector<int>* faces = nullptr;
    if (std::abs(point.y) <= 1e-12 * height) faces = &bottom_faces_;
    else if (std::abs(point.y - height) <= 1e-12 * height) faces = &top_faces_;
    if (!faces) return element_stress(locate(point), u, d).xx;

    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    const double tol = 1e-12 * mesh_.length;
    for (int e : *faces) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int n : elements_[e].nodes)
            if (std::abs(mesh_.nodes[n].y - point.y) <= 1e-12 * height) {
                lo = std::min(lo, mesh_.nodes[n].x);
                hi = std::max(hi, mesh_.nodes[n].x);
            }
        if (point.x < lo - tol || point.x > hi + tol) continue;
        const double dist = std::abs(mesh_.centroid(e).x - point.x);
        if (dist < best_dist) {
            best_dist = dist;
            best = e;
        }
    }
    if (best < 0) {
        std::ostringstream msg;
        msg << "surface probe at x = " << point.x << " lies outside the mesh";
        throw QueryError(msg.str());
    }
    return element_stress(static_cast<std::size_t>(best), u, d).xx;
}

double PlaneStressModel::reaction_force(const Vector& u, const Vector& d) const
{
    const Vector f = internal_force(u, d);
    double r = 0.0;
    for (int dof : plan_.load_dofs) r -= f[dof];
    return plan_.reaction_factor * r;
}

ProbeReadings PlaneStressModel::probe(const Vector& u, const Vector& d) const
{
    ProbeReadings p;
    p.reaction = reaction_force(u, d);
    p.sigma_mid = probe_stress(u, d, setup_.mid_probe);
    p.sigma_quarter_top = probe_stress(u, d, setup_.quarter_probe);
    const int node = mesh_.line_nodes[mesh_.line_at(setup_.mid_probe.x)].front();
    p.deflection_mid = -u[2 * node + 1];
    return p;
}

ElementFields PlaneStressModel::element_fields(const Vector& u, const Vector& d) const
{
    ElementFields out;
    out.sigma_xx.resize(elements_.size());
    out.psi_plus.resize(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        out.sigma_xx[e] = element_stress(e, u, d).xx;
        const auto eps = strain(e, u);
        out.psi_plus[e] = elements_[e].glass
                              ? split_energy(setup_.formulation.split, eps, glass_lambda_, glass_mu_).plus
                              : elastic_energy(eps, inter_lambda_, inter_mu_);
    }
    out.nodal_damage.assign(mesh_.num_nodes(), 0.0);
    for (std::size_t k = 0; k < submesh_.num_nodes(); ++k) out.nodal_damage[submesh_.sub_to_parent[k]] = d[k];
    return out;
}

}  // namespace glassfrac
