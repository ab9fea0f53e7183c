#include "glassfrac/beam1d.hpp"

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

constexpr int kMaxDofs = 10;
using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDofs, kMaxDofs>;
using ElementVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDofs, 1>;
using Row = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxDofs>;

struct Interval {
    double lo = 0.0, hi = 0.0;
    double length() const { return std::max(0.0, hi - lo); }
};

// Resultants and energy of E (a + c z) restricted to [lo, hi] where the strain has one sign.
void accumulate(double a, double c, Interval iv, double young, double weight, double& energy, double& n, double& m,
                Eigen::Matrix2d& tangent)
{
    const double len = iv.length();
    if (len <= 0.0) return;
    const double p = a + c * iv.hi, q = a + c * iv.lo;
    const double m0 = len;
    const double m1 = 0.5 * (iv.hi * iv.hi - iv.lo * iv.lo);
    const double m2 = (iv.hi * iv.hi * iv.hi - iv.lo * iv.lo * iv.lo) / 3.0;
    energy += weight * 0.5 * young * len * (p * p + p * q + q * q) / 3.0;
    n += weight * young * 0.5 * len * (p + q);
    m += weight * young * (a * m1 + c * m2);
    tangent += weight * young * (Eigen::Matrix2d() << m0, m1, m1, m2).finished();
}

}  // namespace

std::string_view to_string(BeamDriver driver)
{
    return driver == BeamDriver::Integrated ? "integrated" : "surface";
}

double LayeredBeamSection::centroid(int layer) const
{
    return layer == 0 ? 0.5 * bottom_thickness : bottom_thickness + interlayer_thickness + 0.5 * top_thickness;
}

void LayeredBeamSection::validate() const
{
    std::vector<std::string> bad;
    if (!(bottom_thickness > 0.0)) bad.emplace_back("bottom glass thickness must be > 0");
    if (!(width > 0.0)) bad.emplace_back("section width must be > 0");
    if (top_thickness < 0.0) bad.emplace_back("top glass thickness must be >= 0");
    if (interlayer_thickness < 0.0) bad.emplace_back("interlayer thickness must be >= 0");
    if (top_thickness > 0.0 && !(interlayer_thickness > 0.0))
        bad.emplace_back("a laminated section needs an interlayer thickness > 0");
    if (top_thickness == 0.0 && interlayer_thickness != 0.0)
        bad.emplace_back("a monolithic section cannot have an interlayer");
    if (!bad.empty()) throw ConfigError("invalid beam section", std::move(bad));
}

ProfileSplit split_profile(double a, double c, double thickness, double young_modulus)
{
    ProfileSplit out;
    const double h2 = 0.5 * thickness;
    Interval plus{-h2, -h2}, minus{-h2, -h2};
    double wp = 1.0, wm = 1.0;
    if (c == 0.0) {
        if (a > 0.0) plus = {-h2, h2};
        else if (a < 0.0) minus = {-h2, h2};
        else {
            // zero strain: split the tangent evenly so plus + minus is the elastic one
            plus = minus = {-h2, h2};
            wp = wm = 0.5;
        }
    } else {
        const double z0 = std::clamp(-a / c, -h2, h2);
        if (c > 0.0) {
            plus = {z0, h2};
            minus = {-h2, z0};
        } else {
            plus = {-h2, z0};
            minus = {z0, h2};
        }
    }
    accumulate(a, c, plus, young_modulus, wp, out.energy_plus, out.n_plus, out.m_plus, out.tangent_plus);
    accumulate(a, c, minus, young_modulus, wm, out.energy_minus, out.n_minus, out.m_minus, out.tangent_minus);
    return out;
}

double beam_driving_energy(BeamDriver driver, double a, double c, double thickness, double area,
                           double young_modulus)
{
    if (driver == BeamDriver::Integrated)
        return area / thickness * split_profile(a, c, thickness, young_modulus).energy_plus;
    const double top = macaulay(a + 0.5 * c * thickness), bottom = macaulay(a - 0.5 * c * thickness);
    return 0.5 * young_modulus * area * std::max(top * top, bottom * bottom);
}

LayeredBeamModel::LayeredBeamModel(BeamSetup setup) : setup_(std::move(setup))
{
    setup_.section.validate();
    setup_.glass.validate();
    setup_.strength.validate();
    setup_.formulation.validate();
    if (setup_.interlayer) setup_.interlayer->validate();
    if (!(setup_.shear_correction > 0.0)) throw ConfigError("shear correction factor must be > 0");
    if (setup_.mesh.nodes.size() < 2) throw ConfigError("beam mesh needs at least one element");
    layers_ = setup_.section.glass_layers();
    dofs_per_node_ = layers_ == 1 ? 3 : 5;
    if (layers_ == 2 && !setup_.interlayer && !setup_.interlayer_shear_modulus)
        throw ConfigError("laminated beam requires interlayer data");
    if (setup_.interlayer_shear_modulus && *setup_.interlayer_shear_modulus < 0.0)
        throw ConfigError("interlayer shear modulus must be >= 0");

    const auto& mesh = setup_.mesh;
    auto node = [&](double x, const char* what) {
        const std::size_t n = mesh.node_at(x);
        if (std::abs(mesh.nodes[n] - x) > 1e-9) {
            std::ostringstream msg;
            msg << what << " position x = " << x << " does not coincide with a beam node";
            throw ConfigError(msg.str());
        }
        return n;
    };
    auto fix = [&](int dof, double scale) {
        plan_.dofs.push_back(dof);
        plan_.scale.push_back(scale);
    };
    std::vector<double> supports{setup_.geometry.support_x}, loads{setup_.geometry.load_x};
    if (mesh.symmetry == Symmetry::Full) {
        supports.push_back(mesh.length - setup_.geometry.support_x);
        loads.push_back(mesh.length - setup_.geometry.load_x);
    }
    for (double x : supports) {
        const int dof = w_dof(node(x, "support"));
        fix(dof, 0.0);
        plan_.support_dofs.push_back(dof);
    }
    for (double x : loads) {
        const int dof = w_dof(node(x, "load"));
        fix(dof, -1.0);
        plan_.load_dofs.push_back(dof);
    }
    if (mesh.symmetry == Symmetry::Half) {
        const std::size_t last = num_nodes() - 1;
        for (int l = 0; l < layers_; ++l) {
            fix(u_dof(last, l), 0.0);
            fix(phi_dof(last, l), 0.0);
        }
        plan_.reaction_factor = 2.0;
    } else {
        const std::size_t anchor = node(setup_.geometry.support_x, "support");
        for (int l = 0; l < layers_; ++l) fix(u_dof(anchor, l), 0.0);
        plan_.reaction_factor = 1.0;
    }

    const std::size_t ne = mesh.num_elements();
    strength_.resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
        for (int l = 0; l < layers_; ++l) {
            const Point2 p{0.5 * (mesh.nodes[e] + mesh.nodes[e + 1]), setup_.section.centroid(l)};
            strength_[e][l] = effective_strength(setup_.strength, p);
        }

    displacement_matrix_ = make_displacement_pattern();
    damage_matrix_ = make_damage_pattern();
    update_time(0.0);
}

int LayeredBeamModel::u_dof(std::size_t node, int layer) const
{
    return layers_ == 1 ? static_cast<int>(3 * node) : static_cast<int>(5 * node + 2 * layer);
}

int LayeredBeamModel::phi_dof(std::size_t node, int layer) const
{
    return layers_ == 1 ? static_cast<int>(3 * node + 2) : static_cast<int>(5 * node + 2 * layer + 1);
}

int LayeredBeamModel::w_dof(std::size_t node) const
{
    return layers_ == 1 ? static_cast<int>(3 * node + 1) : static_cast<int>(5 * node + 4);
}

std::array<int, 10> LayeredBeamModel::element_dofs(std::size_t e) const
{
    std::array<int, 10> dofs{};
    for (int k = 0; k < 2 * dofs_per_node_; ++k) dofs[k] = static_cast<int>(dofs_per_node_ * e) + k;
    return dofs;
}

PatternAssembler LayeredBeamModel::make_displacement_pattern() const
{
    std::vector<std::vector<int>> dofs(setup_.mesh.num_elements());
    for (std::size_t e = 0; e < dofs.size(); ++e) {
        const auto all = element_dofs(e);
        dofs[e].assign(all.begin(), all.begin() + 2 * dofs_per_node_);
    }
    return PatternAssembler(displacement_size(), dofs);
}

PatternAssembler LayeredBeamModel::make_damage_pattern() const
{
    const std::size_t ne = setup_.mesh.num_elements(), n = num_nodes();
    std::vector<std::vector<int>> dofs;
    for (int l = 0; l < layers_; ++l)
        for (std::size_t e = 0; e < ne; ++e)
            dofs.push_back({static_cast<int>(l * n + e), static_cast<int>(l * n + e + 1)});
    return PatternAssembler(damage_size(), dofs);
}

void LayeredBeamModel::update_time(double time)
{
    if (setup_.interlayer_shear_modulus) g_int_ = *setup_.interlayer_shear_modulus;
    else if (setup_.interlayer) g_int_ = equivalent_shear_modulus(*setup_.interlayer, time, setup_.temperature);
}

LayeredBeamModel::Kinematics LayeredBeamModel::layer_kinematics(std::size_t e, int layer, const Vector& u) const
{
    const double len = setup_.mesh.size(e);
    Kinematics k;
    k.a = (u[u_dof(e + 1, layer)] - u[u_dof(e, layer)]) / len;
    k.c = (u[phi_dof(e + 1, layer)] - u[phi_dof(e, layer)]) / len;
    k.gamma = (u[w_dof(e + 1)] - u[w_dof(e)]) / len + 0.5 * (u[phi_dof(e, layer)] + u[phi_dof(e + 1, layer)]);
    return k;
}

double LayeredBeamModel::interlayer_slip(std::size_t e, const Vector& u) const
{
    const auto& s = setup_.section;
    const double len = setup_.mesh.size(e);
    auto mid = [&](int dof_e, int dof_e1) { return 0.5 * (u[dof_e] + u[dof_e1]); };
    const double ub = mid(u_dof(e, 0), u_dof(e + 1, 0)), pb = mid(phi_dof(e, 0), phi_dof(e + 1, 0));
    const double ut = mid(u_dof(e, 1), u_dof(e + 1, 1)), pt = mid(phi_dof(e, 1), phi_dof(e + 1, 1));
    const double top_face_of_bottom = ub + 0.5 * s.bottom_thickness * pb;
    const double bottom_face_of_top = ut - 0.5 * s.top_thickness * pt;
    return (bottom_face_of_top - top_face_of_bottom) / s.interlayer_thickness +
           (u[w_dof(e + 1)] - u[w_dof(e)]) / len;
}

double LayeredBeamModel::element_degradation(std::size_t e, int layer, const Vector& d) const
{
    const std::size_t n = num_nodes();
    return mean_degradation(d[layer * n + e], d[layer * n + e + 1], setup_.formulation.residual_stiffness);
}

void LayeredBeamModel::assemble(const Vector& u, const Vector& d, PatternAssembler* matrix, Vector& force,
                                Vector* magnitude) const
{
    const auto& mesh = setup_.mesh;
    const auto& sec = setup_.section;
    const std::size_t ne = mesh.num_elements();
    const int nd = 2 * dofs_per_node_;
    const bool hybrid = setup_.formulation.scheme == StaggeredScheme::Hybrid;
    const double young = setup_.glass.young_modulus, shear = setup_.glass.shear_modulus();
    std::vector<ElementMatrix> ke(ne);
    std::vector<ElementVector> fe(ne), fa(ne);

    parallel_for(ne, [&](std::size_t e) {
        const double len = mesh.size(e);
        const int base = static_cast<int>(dofs_per_node_ * e);
        auto local = [&](int dof) { return dof - base; };
        ElementMatrix k = ElementMatrix::Zero(nd, nd);
        ElementVector f = ElementVector::Zero(nd);
        for (int l = 0; l < layers_; ++l) {
            const double h = sec.thickness(l), b = sec.width;
            const auto kin = layer_kinematics(e, l, u);
            const double g = element_degradation(e, l, d);
            Row ba = Row::Zero(nd), bc = Row::Zero(nd), bs = Row::Zero(nd);
            ba[local(u_dof(e, l))] = -1.0 / len;
            ba[local(u_dof(e + 1, l))] = 1.0 / len;
            bc[local(phi_dof(e, l))] = -1.0 / len;
            bc[local(phi_dof(e + 1, l))] = 1.0 / len;
            bs[local(w_dof(e))] = -1.0 / len;
            bs[local(w_dof(e + 1))] = 1.0 / len;
            bs[local(phi_dof(e, l))] = 0.5;
            bs[local(phi_dof(e + 1, l))] = 0.5;

            Eigen::Matrix2d t;
            Eigen::Vector2d nm;
            if (hybrid) {
                t << young * h, 0.0, 0.0, young * h * h * h / 12.0;
                nm = t * Eigen::Vector2d(kin.a, kin.c);
                t *= g;
                nm *= g;
            } else {
                const auto sp = split_profile(kin.a, kin.c, h, young);
                t = g * sp.tangent_plus + sp.tangent_minus;
                nm << g * sp.n_plus + sp.n_minus, g * sp.m_plus + sp.m_minus;
            }
            t *= b * len;
            nm *= b * len;
            k += t(0, 0) * ba.transpose() * ba + t(0, 1) * (ba.transpose() * bc + bc.transpose() * ba) +
                 t(1, 1) * bc.transpose() * bc;
            f += nm[0] * ba.transpose() + nm[1] * bc.transpose();

            const double ks = g * setup_.shear_correction * shear * b * h * len;
            k += ks * bs.transpose() * bs;
            f += ks * kin.gamma * bs.transpose();
        }
        if (layers_ == 2) {
            Row bi = Row::Zero(nd);
            const double hi = sec.interlayer_thickness;
            for (std::size_t node : {e, e + 1}) {
                bi[local(u_dof(node, 1))] += 0.5 / hi;
                bi[local(phi_dof(node, 1))] -= 0.25 * sec.top_thickness / hi;
                bi[local(u_dof(node, 0))] -= 0.5 / hi;
                bi[local(phi_dof(node, 0))] -= 0.25 * sec.bottom_thickness / hi;
            }
            bi[local(w_dof(e))] -= 1.0 / len;
            bi[local(w_dof(e + 1))] += 1.0 / len;
            const double ki = g_int_ * sec.width * hi * len;
            k += ki * bi.transpose() * bi;
            f += ki * interlayer_slip(e, u) * bi.transpose();
        }
        ke[e] = k;
        fe[e] = f;
        if (magnitude) {
            ElementVector ue(nd);
            for (int i = 0; i < nd; ++i) ue[i] = std::abs(u[base + i]);
            fa[e] = k.cwiseAbs() * ue;
        }
    });

    if (matrix) matrix->zero();
    force.setZero(displacement_size());
    if (magnitude) magnitude->setZero(displacement_size());
    for (std::size_t e = 0; e < ne; ++e) {
        const int base = static_cast<int>(dofs_per_node_ * e);
        if (matrix) {
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDofs, kMaxDofs> rm = ke[e];
            matrix->add(e, {rm.data(), static_cast<std::size_t>(nd * nd)});
        }
        force.segment(base, nd) += fe[e];
        if (magnitude) magnitude->segment(base, nd) += fa[e];
    }
}

void LayeredBeamModel::assemble_displacement(const Vector& u, const Vector& d, PatternAssembler& matrix,
                                             Vector& force) const
{
    assemble(u, d, &matrix, force, nullptr);
}

Vector LayeredBeamModel::internal_force(const Vector& u, const Vector& d) const
{
    Vector f;
    assemble(u, d, nullptr, f, nullptr);
    return f;
}

NewtonReport LayeredBeamModel::solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options)
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
        assemble(v, d, &k, f, &magnitude);
    };
    problem.internal_force = [&](const Vector& v) { return internal_force(v, d); };
    problem.describe_pivot = [&](long pivot) {
        return "near beam node " + std::to_string(std::max(0L, pivot) / dofs_per_node_);
    };
    problem.line_search = !hybrid;
    const double tolerance = hybrid ? std::max(options.tolerance, 1e-10) : options.tolerance;
    return newton_solve(problem, fixed, displacement_matrix_, displacement_factor_, tolerance, options.max_iterations,
                        u);
}

double LayeredBeamModel::layer_driver(std::size_t e, int layer, const Vector& u) const
{
    const auto& sec = setup_.section;
    const auto kin = layer_kinematics(e, layer, u);
    const double h = sec.thickness(layer), area = sec.width * h;
    const double young = setup_.glass.young_modulus;
    if (setup_.formulation.kind != PhaseFieldKind::PfM)
        return beam_driving_energy(setup_.driver, kin.a, kin.c, h, area, young);
    // Rankine driver on the larger surface stress
    const double s = young * std::max(kin.a + 0.5 * kin.c * h, kin.a - 0.5 * kin.c * h);
    const double strength = strength_[e][layer];
    const double ratio = strength / setup_.strength.base_strength;
    const double gf = setup_.glass.fracture_energy * ratio * ratio, lc = setup_.glass.length_scale;
    const std::array<double, 1> principal{s};
    return driving_force(PhaseFieldKind::PfM, 0.0, principal, gf, lc, strength) * gf * area / (2.0 * lc);
}

void LayeredBeamModel::assemble_damage(const Vector& u, PatternAssembler& matrix, Vector& rhs) const
{
    const auto& mesh = setup_.mesh;
    const auto& f = setup_.formulation;
    const std::size_t ne = mesh.num_elements(), n = num_nodes();
    const double lc = setup_.glass.length_scale, c = scaling_constant(f.kind);
    const bool linear_alpha = f.kind == PhaseFieldKind::PfP;
    matrix.zero();
    rhs.setZero(damage_size());
    for (int l = 0; l < layers_; ++l)
        for (std::size_t e = 0; e < ne; ++e) {
            const double len = mesh.size(e);
            const double area = setup_.section.width * setup_.section.thickness(l);
            const double ratio = strength_[e][l] / setup_.strength.base_strength;
            const double ga = setup_.glass.fracture_energy * ratio * ratio * area;
            const double h = layer_driver(e, l, u);
            Eigen::Matrix2d mass, lap;
            mass << 2, 1, 1, 2;
            mass *= len / 6.0;
            lap << 1, -1, -1, 1;
            lap /= len;
            Eigen::Matrix2d a;
            double load;
            if (linear_alpha) {
                a = 2.0 * h * mass + (2.0 * ga * lc / c) * lap;
                load = 2.0 * h - ga / (c * lc);
            } else {
                a = (2.0 * h + 2.0 * ga / (c * lc)) * mass + (2.0 * ga * lc / c) * lap;
                load = 2.0 * h;
            }
            matrix.add(l * ne + e, {a.data(), 4});
            rhs[l * n + e] += 0.5 * len * load;
            rhs[l * n + e + 1] += 0.5 * len * load;
        }
}

BoundSolveResult LayeredBeamModel::solve_damage(const Vector& u, const Vector& lower, Vector& d)
{
    Vector rhs;
    assemble_damage(u, damage_matrix_, rhs);
    const Vector upper = Vector::Ones(damage_size());
    const auto result = damage_solver_.solve(damage_matrix_.matrix(), rhs, lower, upper, d);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "beam damage solve did not converge (" << result.method << ", " << result.iterations
            << " iterations, KKT residual " << result.kkt_residual << ")";
        throw SolverError(msg.str());
    }
    return result;
}

std::vector<DamageNode> LayeredBeamModel::damage_nodes() const
{
    std::vector<DamageNode> out;
    out.reserve(damage_size());
    for (int l = 0; l < layers_; ++l)
        for (double x : setup_.mesh.nodes) out.push_back({x, setup_.section.centroid(l), l});
    return out;
}

EnergyBreakdown LayeredBeamModel::energy(const Vector& u, const Vector& d) const
{
    const auto& mesh = setup_.mesh;
    const auto& sec = setup_.section;
    const auto& f = setup_.formulation;
    const std::size_t n = num_nodes();
    const double lc = setup_.glass.length_scale, c = scaling_constant(f.kind);
    const double young = setup_.glass.young_modulus, shear = setup_.glass.shear_modulus();
    const bool hybrid = f.scheme == StaggeredScheme::Hybrid;
    EnergyBreakdown out;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double len = mesh.size(e);
        for (int l = 0; l < layers_; ++l) {
            const double h = sec.thickness(l), b = sec.width;
            const auto kin = layer_kinematics(e, l, u);
            const double g = element_degradation(e, l, d);
            const auto sp = split_profile(kin.a, kin.c, h, young);
            const double axial =
                hybrid ? g * (sp.energy_plus + sp.energy_minus) : g * sp.energy_plus + sp.energy_minus;
            out.elastic += b * len * axial;
            out.elastic += 0.5 * g * setup_.shear_correction * shear * b * h * len * kin.gamma * kin.gamma;

            const double d0 = d[l * n + e], d1 = d[l * n + e + 1];
            const double alpha = f.kind == PhaseFieldKind::PfP ? 0.5 * len * (d0 + d1)
                                                               : len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
            const double ratio = strength_[e][l] / setup_.strength.base_strength;
            const double ga = setup_.glass.fracture_energy * ratio * ratio * b * h;
            out.dissipated += ga / c * (alpha / lc + lc * (d1 - d0) * (d1 - d0) / len);
        }
        if (layers_ == 2) {
            const double s = interlayer_slip(e, u);
            out.elastic += 0.5 * g_int_ * sec.width * sec.interlayer_thickness * len * s * s;
        }
    }
    return out;
}

std::size_t LayeredBeamModel::element_at(double x) const
{
    const auto& nodes = setup_.mesh.nodes;
    const double tol = 1e-9 * (nodes.back() - nodes.front());
    if (x < nodes.front() - tol || x > nodes.back() + tol) {
        std::ostringstream msg;
        msg << "beam probe at x = " << x << " lies outside the mesh";
        throw QueryError(msg.str());
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t e = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    e = std::min(e, nodes.size() - 2);
    // on a node, prefer the element whose midpoint is closer (the left one on ties)
    if (e > 0 && std::abs(nodes[e] - x) <= tol) {
        const double left = std::abs(0.5 * (nodes[e - 1] + nodes[e]) - x);
        const double right = std::abs(0.5 * (nodes[e] + nodes[e + 1]) - x);
        if (left <= right) --e;
    }
    return e;
}

double LayeredBeamModel::surface_stress(const Vector& u, const Vector& d, int layer, bool top, double x) const
{
    if (layer < 0 || layer >= layers_) throw QueryError("beam layer index out of range");
    const std::size_t e = element_at(x);
    const auto kin = layer_kinematics(e, layer, u);
    const double h = setup_.section.thickness(layer), young = setup_.glass.young_modulus;
    const double eps = kin.a + (top ? 0.5 : -0.5) * kin.c * h;
    const double g = element_degradation(e, layer, d);
    if (setup_.formulation.scheme == StaggeredScheme::Hybrid) return g * young * eps;
    return g * young * macaulay(eps) - young * macaulay(-eps);
}

double LayeredBeamModel::reaction_force(const Vector& u, const Vector& d) const
{
    const Vector f = internal_force(u, d);
    double r = 0.0;
    for (int dof : plan_.load_dofs) r -= f[dof];
    return plan_.reaction_factor * r;
}

ProbeReadings LayeredBeamModel::probe(const Vector& u, const Vector& d) const
{
    ProbeReadings p;
    p.reaction = reaction_force(u, d);
    p.sigma_mid = surface_stress(u, d, 0, false, setup_.mid_probe_x);
    p.sigma_quarter_top = surface_stress(u, d, layers_ - 1, true, setup_.quarter_probe_x);
    p.deflection_mid = -u[w_dof(setup_.mesh.node_at(setup_.mid_probe_x))];
    return p;
}

std::vector<BeamNodeFields> LayeredBeamModel::node_fields(const Vector& u, const Vector& d) const
{
    const auto& nodes = setup_.mesh.nodes;
    const std::size_t n = num_nodes(), ne = setup_.mesh.num_elements();
    const int top = layers_ - 1;
    std::vector<double> bot_el(ne), top_el(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const double xm = 0.5 * (nodes[e] + nodes[e + 1]);
        bot_el[e] = surface_stress(u, d, 0, false, xm);
        top_el[e] = surface_stress(u, d, top, true, xm);
    }
    std::vector<BeamNodeFields> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = out[i];
        r.x = nodes[i];
        r.w = u[w_dof(i)];
        r.u_bot = u[u_dof(i, 0)];
        r.phi_bot = u[phi_dof(i, 0)];
        r.u_top = u[u_dof(i, top)];
        r.phi_top = u[phi_dof(i, top)];
        r.d_bot = d[i];
        r.d_top = d[top * n + i];
        // nodal surface stress: mean of the adjacent elements
        const std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min(i, ne - 1);
        r.sigma_bot_surface = 0.5 * (bot_el[lo] + bot_el[hi]);
        r.sigma_top_surface = 0.5 * (top_el[lo] + top_el[hi]);
    }
    return out;
}

}  // namespace glassfrac

namespace glassfrac {

namespace {

std::vector<std::vector<int>> chain(int elements)
{
    std::vector<std::vector<int>> dofs(static_cast<std::size_t>(elements));
    for (int e = 0; e < elements; ++e) dofs[e] = {e, e + 1};
    return dofs;
}

}  // namespace

AxialBarModel::AxialBarModel(AxialBarSetup setup) : setup_(std::move(setup))
{
    setup_.glass.validate();
    setup_.formulation.validate();
    if (!(setup_.length > 0.0) || !(setup_.area > 0.0)) throw ConfigError("bar length and area must be > 0");
    if (setup_.elements < 1) throw ConfigError("bar needs at least one element");
    h_ = setup_.length / setup_.elements;
    displacement_matrix_ = PatternAssembler(displacement_size(), chain(setup_.elements));
    damage_matrix_ = PatternAssembler(damage_size(), chain(setup_.elements));
}

double AxialBarModel::element_stress(std::size_t e, const Vector& u, const Vector& d) const
{
    const double eps = (u[e + 1] - u[e]) / h_, young = setup_.glass.young_modulus;
    const double g = mean_degradation(d[e], d[e + 1], setup_.formulation.residual_stiffness);
    if (setup_.formulation.scheme == StaggeredScheme::Hybrid) return g * young * eps;
    return g * young * macaulay(eps) - young * macaulay(-eps);
}

void AxialBarModel::assemble(const Vector& u, const Vector& d, PatternAssembler* matrix, Vector& force,
                             Vector* magnitude) const
{
    const bool hybrid = setup_.formulation.scheme == StaggeredScheme::Hybrid;
    const double young = setup_.glass.young_modulus, a = setup_.area;
    if (matrix) matrix->zero();
    force.setZero(displacement_size());
    if (magnitude) magnitude->setZero(displacement_size());
    for (int e = 0; e < setup_.elements; ++e) {
        const double eps = (u[e + 1] - u[e]) / h_;
        const double g = mean_degradation(d[e], d[e + 1], setup_.formulation.residual_stiffness);
        // tangent modulus with the Heaviside taken as 1/2 at zero strain
        const double hp = eps > 0.0 ? 1.0 : eps < 0.0 ? 0.0 : 0.5;
        const double modulus = hybrid ? g * young : young * (g * hp + (1.0 - hp));
        const double k = modulus * a / h_;
        const double n = element_stress(e, u, d) * a;
        if (matrix) {
            const std::array<double, 4> ke{k, -k, -k, k};
            matrix->add(e, ke);
        }
        force[e] -= n;
        force[e + 1] += n;
        if (magnitude) {
            const double m = k * (std::abs(u[e]) + std::abs(u[e + 1]));
            (*magnitude)[e] += m;
            (*magnitude)[e + 1] += m;
        }
    }
}

Vector AxialBarModel::internal_force(const Vector& u, const Vector& d) const
{
    Vector f;
    assemble(u, d, nullptr, f, nullptr);
    return f;
}

NewtonReport AxialBarModel::solve_displacement(double w, const Vector& d, Vector& u, const NewtonOptions& options)
{
    const std::size_t n = displacement_size();
    if (static_cast<std::size_t>(u.size()) != n) u = Vector::Zero(n);
    std::vector<char> fixed(n, 0);
    fixed.front() = fixed.back() = 1;
    u[0] = 0.0;
    u[n - 1] = w;
    const bool hybrid = setup_.formulation.scheme == StaggeredScheme::Hybrid;
    NewtonProblem problem;
    problem.assemble = [&](const Vector& v, PatternAssembler& k, Vector& f, Vector& magnitude) {
        assemble(v, d, &k, f, &magnitude);
    };
    problem.internal_force = [&](const Vector& v) { return internal_force(v, d); };
    problem.describe_pivot = [](long pivot) { return "at bar node " + std::to_string(pivot); };
    problem.line_search = !hybrid;
    const double tolerance = hybrid ? std::max(options.tolerance, 1e-10) : options.tolerance;
    return newton_solve(problem, fixed, displacement_matrix_, displacement_factor_, tolerance, options.max_iterations,
                        u);
}

BoundSolveResult AxialBarModel::solve_damage(const Vector& u, const Vector& lower, Vector& d)
{
    const auto& f = setup_.formulation;
    const auto& glass = setup_.glass;
    const double lc = glass.length_scale, c = scaling_constant(f.kind);
    const double ga = glass.fracture_energy * setup_.area;
    damage_matrix_.zero();
    Vector rhs = Vector::Zero(damage_size());
    for (int e = 0; e < setup_.elements; ++e) {
        const double eps = (u[e + 1] - u[e]) / h_;
        double h = 0.5 * glass.young_modulus * setup_.area * macaulay(eps) * macaulay(eps);
        if (f.kind == PhaseFieldKind::PfM) {
            const std::array<double, 1> principal{glass.young_modulus * eps};
            h = driving_force(f.kind, 0.0, principal, glass) * ga / (2.0 * lc);
        }
        Eigen::Matrix2d mass, lap;
        mass << 2, 1, 1, 2;
        mass *= h_ / 6.0;
        lap << 1, -1, -1, 1;
        lap /= h_;
        Eigen::Matrix2d a;
        double load;
        if (f.kind == PhaseFieldKind::PfP) {
            a = 2.0 * h * mass + (2.0 * ga * lc / c) * lap;
            load = 2.0 * h - ga / (c * lc);
        } else {
            a = (2.0 * h + 2.0 * ga / (c * lc)) * mass + (2.0 * ga * lc / c) * lap;
            load = 2.0 * h;
        }
        damage_matrix_.add(static_cast<std::size_t>(e), {a.data(), 4});
        rhs[e] += 0.5 * h_ * load;
        rhs[e + 1] += 0.5 * h_ * load;
    }
    const Vector upper = Vector::Ones(damage_size());
    const auto result = damage_solver_.solve(damage_matrix_.matrix(), rhs, lower, upper, d);
    if (!result.converged) throw SolverError("bar damage solve did not converge");
    return result;
}

std::vector<DamageNode> AxialBarModel::damage_nodes() const
{
    std::vector<DamageNode> out(damage_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {static_cast<double>(i) * h_, 0.0, 0};
    return out;
}

EnergyBreakdown AxialBarModel::energy(const Vector& u, const Vector& d) const
{
    const auto& f = setup_.formulation;
    const double young = setup_.glass.young_modulus, a = setup_.area;
    const double lc = setup_.glass.length_scale, c = scaling_constant(f.kind);
    const double ga = setup_.glass.fracture_energy * a;
    const bool hybrid = f.scheme == StaggeredScheme::Hybrid;
    EnergyBreakdown out;
    for (int e = 0; e < setup_.elements; ++e) {
        const double eps = (u[e + 1] - u[e]) / h_;
        const double g = mean_degradation(d[e], d[e + 1], f.residual_stiffness);
        const double plus = 0.5 * young * macaulay(eps) * macaulay(eps);
        const double minus = 0.5 * young * macaulay(-eps) * macaulay(-eps);
        out.elastic += a * h_ * (hybrid ? g * (plus + minus) : g * plus + minus);
        const double d0 = d[e], d1 = d[e + 1];
        const double alpha =
            f.kind == PhaseFieldKind::PfP ? 0.5 * h_ * (d0 + d1) : h_ * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        out.dissipated += ga / c * (alpha / lc + lc * (d1 - d0) * (d1 - d0) / h_);
    }
    return out;
}

ProbeReadings AxialBarModel::probe(const Vector& u, const Vector& d) const
{
    ProbeReadings p;
    p.reaction = internal_force(u, d)[displacement_size() - 1];
    p.sigma_mid = element_stress(static_cast<std::size_t>(setup_.elements / 2), u, d);
    p.sigma_quarter_top = element_stress(static_cast<std::size_t>(setup_.elements / 4), u, d);
    p.deflection_mid = u[displacement_size() / 2];
    return p;
}

}  // namespace glassfrac
