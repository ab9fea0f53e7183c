#include "fixtures.hpp"

#include "glassfrac/errors.hpp"

#include <doctest.h>
#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace glassfrac;
using namespace fixtures;

namespace {

// Hand-built CST stiffness from the inverse of the [1 x y] interpolation matrix.
Eigen::MatrixXd cst_oracle(const Mesh2D& mesh, double young, double nu, double width,
                           const std::vector<double>& factors)
{
    const Eigen::Index n = static_cast<Eigen::Index>(2 * mesh.num_nodes());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    Eigen::Matrix3d dmat;
    dmat << 1, nu, 0, nu, 1, 0, 0, 0, (1 - nu) / 2;
    dmat *= young / (1 - nu * nu);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        Eigen::Matrix3d p;
        for (int i = 0; i < 3; ++i) {
            const auto q = mesh.nodes[mesh.triangles[e][i]];
            p.row(i) << 1, q.x, q.y;
        }
        const Eigen::Matrix3d coef = p.inverse(); // column i: coefficients of N_i
        const double area = 0.5 * std::abs(p.determinant());
        Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
        for (int i = 0; i < 3; ++i) {
            b(0, 2 * i) = coef(1, i);
            b(1, 2 * i + 1) = coef(2, i);
            b(2, 2 * i) = coef(2, i);
            b(2, 2 * i + 1) = coef(1, i);
        }
        const Eigen::Matrix<double, 6, 6> ke = factors[e] * width * area * b.transpose() * dmat * b;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                k(2 * mesh.triangles[e][i / 2] + i % 2, 2 * mesh.triangles[e][j / 2] + j % 2) += ke(i, j);
    }
    return k;
}

double mean_g_oracle(const std::array<double, 3>& d, double k)
{
    // mean of a product of linear fields on a triangle: (sum a_i b_i + sum a_i sum b_j) / 12
    double sq = 0.0, s = 0.0;
    for (double di : d) {
        sq += (1 - di) * (1 - di);
        s += 1 - di;
    }
    return (sq + s * s) / 12.0 + k;
}

Eigen::MatrixXd dense_displacement(PlaneStressModel& m, const Vector& u, const Vector& d, Vector* f = nullptr)
{
    auto pattern = m.make_displacement_pattern();
    Vector force;
    m.assemble_displacement(u, d, pattern, force);
    if (f) *f = force;
    return Eigen::MatrixXd(pattern.matrix());
}

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hybrid matrix at zero damage equals linear elasticity")
{
    auto f = formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid);
    f.residual_stiffness = 0.0;
    PlaneStressModel m(monolith_setup(f));
    const Vector u = Vector::Zero(m.displacement_size());
    const Vector d = Vector::Zero(m.damage_size());
    const auto k = dense_displacement(m, u, d);
    const auto oracle = cst_oracle(m.mesh(), 70e9, 0.22, 0.36, std::vector<double>(m.mesh().num_elements(), 1.0));
    CHECK(max_abs(k - oracle) <= 1e-12 * max_abs(oracle));
}

TEST_CASE("fully damaged element contributes the residual stiffness")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    const auto& mesh = m.mesh();
    const std::size_t target = mesh.num_elements() / 2;
    Vector d = Vector::Zero(m.damage_size());
    for (int n : mesh.triangles[target]) d[m.submesh().parent_to_sub[n]] = 1.0;
    std::vector<double> factors(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        std::array<double, 3> de{};
        for (int i = 0; i < 3; ++i) de[i] = d[m.submesh().parent_to_sub[mesh.triangles[e][i]]];
        factors[e] = mean_g_oracle(de, 1e-6);
    }
    CHECK(factors[target] == doctest::Approx(1e-6).epsilon(1e-12));
    const auto k = dense_displacement(m, Vector::Zero(m.displacement_size()), d);
    const auto oracle = cst_oracle(mesh, 70e9, 0.22, 0.36, factors);
    CHECK(max_abs(k - oracle) <= 1e-12 * max_abs(oracle));
}

TEST_CASE("anisotropic internal force at zero damage matches the linear oracle")
{
    for (auto split : {EnergySplit::VolumetricDeviatoric, EnergySplit::Spectral}) {
        auto f0 = formulation(PhaseFieldKind::PfP, StaggeredScheme::Anisotropic, split);
        f0.residual_stiffness = 0.0;
        PlaneStressModel m(monolith_setup(f0));
        const Vector u = uniaxial_field(m.mesh(), 4e-4, 0.22);
        const Vector d = Vector::Zero(m.damage_size());
        Vector f;
        dense_displacement(m, u, d, &f);
        const auto oracle =
            cst_oracle(m.mesh(), 70e9, 0.22, 0.36, std::vector<double>(m.mesh().num_elements(), 1.0));
        const Vector expected = oracle * u;
        CHECK((f - expected).norm() <= 1e-10 * expected.norm());
        CHECK((m.internal_force(u, d) - expected).norm() <= 1e-10 * expected.norm());
    }
}

TEST_CASE("patch test reproduces the uniaxial stress state")
{
    for (auto scheme : {StaggeredScheme::Hybrid, StaggeredScheme::Anisotropic}) {
        auto f0 = formulation(PhaseFieldKind::PfB, scheme);
        f0.residual_stiffness = 0.0;
        PlaneStressModel m(monolith_setup(f0));
        const double e = 3e-4;
        const Vector u = uniaxial_field(m.mesh(), e, 0.22);
        const Vector d = Vector::Zero(m.damage_size());
        const auto fields = m.element_fields(u, d);
        for (double s : fields.sigma_xx) REQUIRE(std::abs(s - 70e9 * e) <= 1e-12 * 70e9 * e);
        CHECK(m.probe_stress(u, d, {0.55, 0.0}) == doctest::Approx(70e9 * e).epsilon(1e-12));
        CHECK(m.probe_stress(u, d, {0.3, 0.02}) == doctest::Approx(70e9 * e).epsilon(1e-12));
        CHECK(m.probe_stress(u, d, {0.2, 0.011}) == doctest::Approx(70e9 * e).epsilon(1e-12));
        // interior nodes are in equilibrium under a constant stress
        const Vector f = m.internal_force(u, d);
        const auto& mesh = m.mesh();
        const double h = mesh.height();
        for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
            const auto p = mesh.nodes[n];
            const bool boundary = p.x < 1e-12 || p.x > 0.55 - 1e-12 || p.y < 1e-12 || p.y > h - 1e-12;
            if (!boundary) {
                REQUIRE(std::abs(f[2 * n]) <= 1e-6);
                REQUIRE(std::abs(f[2 * n + 1]) <= 1e-6);
            }
        }
    }
}

TEST_CASE("assembled matrices are symmetric")
{
    for (auto kind : {PhaseFieldKind::PfB, PhaseFieldKind::PfM, PhaseFieldKind::PfP})
        for (auto split : {EnergySplit::VolumetricDeviatoric, EnergySplit::Spectral}) {
            PlaneStressModel m(monolith_setup(formulation(kind, StaggeredScheme::Anisotropic, split)));
            std::mt19937 rng(7);
            std::uniform_real_distribution<double> du(-1e-5, 1e-5), dd(0.0, 1.0);
            Vector u(m.displacement_size()), d(m.damage_size());
            for (auto& v : u) v = du(rng);
            for (auto& v : d) v = dd(rng);
            const auto k = dense_displacement(m, u, d);
            CHECK(max_abs(k - k.transpose()) <= 1e-14 * max_abs(k));
            auto pattern = m.make_damage_pattern();
            Vector rhs;
            m.assemble_damage(u, pattern, rhs);
            const Eigen::MatrixXd a(pattern.matrix());
            CHECK(max_abs(a - a.transpose()) <= 1e-14 * max_abs(a));
        }
}

TEST_CASE("damage stays zero without driving force")
{
    for (auto kind : {PhaseFieldKind::PfB, PhaseFieldKind::PfM, PhaseFieldKind::PfP}) {
        PlaneStressModel m(monolith_setup(formulation(kind, StaggeredScheme::Anisotropic)));
        const Vector u = Vector::Zero(m.displacement_size());
        const Vector lower = Vector::Zero(m.damage_size());
        Vector d = Vector::Constant(m.damage_size(), 0.3);
        m.solve_damage(u, lower, d);
        CHECK(d.cwiseAbs().maxCoeff() == 0.0);
        if (kind != PhaseFieldKind::PfP) {
            auto pattern = m.make_damage_pattern();
            Vector rhs;
            m.assemble_damage(u, pattern, rhs);
            CHECK(rhs.cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("uniform driving force gives the homogeneous damage level")
{
    const double e = 1e-3, nu = 0.22, young = 70e9;
    // plane-stress volumetric-deviatoric positive energy of the uniaxial state
    const double lam = young * nu / (1 - nu * nu), mu = young / (2 * (1 + nu));
    const double tr = e * (1 - nu);
    const double dev = 0.5 * e * (1 + nu);
    const double psi = 0.5 * (lam + mu) * tr * tr + mu * 2 * dev * dev;
    for (auto kind : {PhaseFieldKind::PfP, PhaseFieldKind::PfB}) {
        const double gf = kind == PhaseFieldKind::PfP ? 231.4 : 823.0;
        auto setup = monolith_setup(formulation(kind, StaggeredScheme::Anisotropic));
        setup.glass.fracture_energy = gf;
        PlaneStressModel model(std::move(setup));
        const double lc = 3e-3;
        // stationarity of (1-d)^2 psi + G/(c l) alpha(d) for a spatially constant d
        const double expected = kind == PhaseFieldKind::PfP ? 1.0 - 3.0 * gf / (16.0 * lc * psi)
                                                            : 2.0 * psi / (2.0 * psi + gf / lc);
        REQUIRE(expected > 0.0);
        REQUIRE(expected < 1.0);
        const Vector u = uniaxial_field(model.mesh(), e, nu);
        Vector d = Vector::Zero(model.damage_size());
        model.solve_damage(u, Vector::Zero(model.damage_size()), d);
        CHECK(d.minCoeff() == doctest::Approx(expected).epsilon(1e-10));
        CHECK(d.maxCoeff() == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("zero load gives the zero solution")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Anisotropic)));
    Vector u = Vector::Zero(m.displacement_size());
    const Vector d = Vector::Zero(m.damage_size());
    const auto report = m.solve_displacement(0.0, d, u, {});
    CHECK(report.converged);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    const auto p = m.probe(u, d);
    CHECK(p.reaction == 0.0);
    CHECK(p.sigma_mid == 0.0);
    CHECK(p.sigma_quarter_top == 0.0);
}

TEST_CASE("elastic solve: symmetry, equilibrium and linearity")
{
    for (auto scheme : {StaggeredScheme::Hybrid, StaggeredScheme::Anisotropic}) {
        PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, scheme)));
        const Vector d = Vector::Zero(m.damage_size());
        Vector u1, u2;
        REQUIRE(m.solve_displacement(1e-3, d, u1, {}).converged);
        REQUIRE(m.solve_displacement(2e-3, d, u2, {}).converged);

        for (int n : m.mesh().line_nodes.back()) CHECK(u1[2 * n] == 0.0);

        const Vector f = m.internal_force(u1, d);
        double fy = 0.0, scale = 0.0;
        for (Eigen::Index i = 1; i < f.size(); i += 2) {
            fy += f[i];
            scale += std::abs(f[i]);
        }
        CHECK(std::abs(fy) <= 1e-8 * scale);

        const double r1 = m.reaction_force(u1, d), r2 = m.reaction_force(u2, d);
        CHECK(r1 > 0.0);
        CHECK(std::abs(r2 / r1 - 2.0) <= 2e-6);
    }
}

TEST_CASE("hybrid solve minimizes the energy for fixed damage")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfB, StaggeredScheme::Hybrid)));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dd(0.0, 0.8);
    Vector d(m.damage_size());
    for (auto& v : d) v = dd(rng);
    Vector u;
    REQUIRE(m.solve_displacement(1e-3, d, u, {}).converged);
    // the hybrid energy is g psi; evaluate it from the secant system
    auto energy = [&](const Vector& v) {
        auto pattern = m.make_displacement_pattern();
        Vector f;
        m.assemble_displacement(v, d, pattern, f);
        return 0.5 * v.dot(f);
    };
    const double e0 = energy(u);
    std::vector<char> fixed(m.displacement_size(), 0);
    for (int dof : m.boundary().dofs) fixed[dof] = 1;
    std::normal_distribution<double> pert(0.0, 1e-7);
    for (int trial = 0; trial < 20; ++trial) {
        Vector v = u;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (!fixed[i]) v[i] += pert(rng);
        CHECK(energy(v) > e0);
    }
}

TEST_CASE("anisotropic Newton converges quadratically")
{
    PlaneStressModel m(
        monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Anisotropic, EnergySplit::Spectral)));
    const Vector d = Vector::Zero(m.damage_size());
    Vector u;
    NewtonOptions opts;
    opts.tolerance = 1e-14;
    // start from a perturbed elastic state so the tangent changes between iterates
    REQUIRE(m.solve_displacement(1e-3, d, u, {}).converged);
    std::mt19937 rng(11);
    std::normal_distribution<double> pert(0.0, 2e-6);
    for (auto& v : u) v += pert(rng);
    Vector smooth_d(m.damage_size());
    for (std::size_t k = 0; k < m.damage_size(); ++k) {
        const auto p = m.mesh().nodes[m.submesh().sub_to_parent[k]];
        smooth_d[k] = 0.5 * std::exp(-std::pow((p.x - 0.5) / 0.05, 2));
    }
    const auto report = m.solve_displacement(1e-3, smooth_d, u, opts);
    REQUIRE(report.converged);
    const auto& h = report.history;
    REQUIRE(h.size() >= 4);
    const std::size_t n = h.size() - 1;
    const double order = std::log(h[n] / h[n - 1]) / std::log(h[n - 1] / h[n - 2]);
    INFO("residuals: " << h[n - 2] << " " << h[n - 1] << " " << h[n]);
    CHECK(order >= 1.8);
}

TEST_CASE("fully damaged glass carries only the residual stress")
{
    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    const double e = 3e-4;
    const Vector u = uniaxial_field(m.mesh(), e, 0.22);
    const Vector d = Vector::Ones(m.damage_size());
    CHECK(std::abs(m.probe_stress(u, d, {0.55, 0.0})) <= 1e-6 * 70e9 * e * (1 + 1e-12));
}

TEST_CASE("full model matches the half model")
{
    PlaneStressModel half(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    PlaneStressModel full(
        monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid), 10e-3, Symmetry::Full));
    Vector uh, uf;
    REQUIRE(half.solve_displacement(1e-3, Vector::Zero(half.damage_size()), uh, {}).converged);
    REQUIRE(full.solve_displacement(1e-3, Vector::Zero(full.damage_size()), uf, {}).converged);
    const auto ph = half.probe(uh, Vector::Zero(half.damage_size()));
    const auto pf = full.probe(uf, Vector::Zero(full.damage_size()));
    CHECK(pf.reaction == doctest::Approx(ph.reaction).epsilon(1e-6));
    CHECK(pf.sigma_mid == doctest::Approx(ph.sigma_mid).epsilon(1e-3));
}

TEST_CASE("boundary and probe errors")
{
    auto setup = monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid));
    setup.geometry.load_x = 0.4537;
    CHECK_THROWS_AS(PlaneStressModel(std::move(setup)), ConfigError);

    PlaneStressModel m(monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid)));
    const Vector u = Vector::Zero(m.displacement_size());
    const Vector d = Vector::Zero(m.damage_size());
    CHECK_THROWS_AS(m.probe_stress(u, d, {0.8, 0.01}), QueryError);
    CHECK_THROWS_AS(m.probe_stress(u, d, {0.3, 0.05}), QueryError);

    auto laminate = monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid));
    RefinementSpec r;
    r.default_size = 10e-3;
    r.breakpoints = {0.05, 0.3, 0.45};
    const std::vector<SectionLayer> layers{
        {0.01, LayerTag::GlassBottom}, {0.00076, LayerTag::Interlayer}, {0.01, LayerTag::GlassTop}};
    laminate.mesh = build_section_mesh(1.1, layers, r, Symmetry::Half);
    CHECK_THROWS_AS(PlaneStressModel(std::move(laminate)), ConfigError);
}

TEST_CASE("interlayer stays undegraded")
{
    auto setup = monolith_setup(formulation(PhaseFieldKind::PfP, StaggeredScheme::Hybrid));
    RefinementSpec r;
    r.default_size = 10e-3;
    r.breakpoints = {0.05, 0.3, 0.45};
    const std::vector<SectionLayer> layers{
        {0.01, LayerTag::GlassBottom}, {0.00076, LayerTag::Interlayer}, {0.01, LayerTag::GlassTop}};
    setup.mesh = build_section_mesh(1.1, layers, r, Symmetry::Half);
    setup.interlayer = eva_interlayer();
    setup.quarter_probe = {0.3, 0.02076};
    PlaneStressModel m(std::move(setup));
    m.update_time(10.0);
    const auto c = equivalent_elastic_constants(eva_interlayer(), 10.0, 25.0);
    CHECK(m.interlayer_constants().young_modulus == doctest::Approx(c.young_modulus).epsilon(1e-14));

    Vector u(m.displacement_size());
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> du(-1e-5, 1e-5);
    for (auto& v : u) v = du(rng);
    const Vector d = Vector::Ones(m.damage_size());
    const auto fields = m.element_fields(u, d);
    const auto intact = m.element_fields(u, Vector::Zero(m.damage_size()));
    int interlayer = 0;
    for (std::size_t e = 0; e < m.mesh().num_elements(); ++e) {
        if (is_glass(m.mesh().tags[e])) {
            REQUIRE(std::abs(fields.sigma_xx[e]) <= 1.0001e-6 * std::abs(intact.sigma_xx[e]) + 1e-300);
        } else {
            ++interlayer;
            REQUIRE(fields.sigma_xx[e] == intact.sigma_xx[e]);
        }
    }
    CHECK(interlayer > 0);
    CHECK(m.damage_size() == m.submesh().num_nodes());
}
