#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "tpns/assembly.hpp"
#include "tpns/error.hpp"
#include "tpns/mms.hpp"

using namespace tpns;

namespace {

Mesh reference_triangle() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  m.cell_region = {Region::Porous};
  m.h = 1.0;
  return m;
}

Mesh porous_square(double h) {
  return build_structured_mesh({0, 0, 1, 1}, h, [](const Vec2&) { return std::optional<Region>(Region::Porous); });
}

Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

double form(const SparseMatrix& a, const Vector& u, const Vector& v) { return v.dot(a * u); }

} // namespace

TEST_SUITE("assembly") {
  TEST_CASE("P1 mass and stiffness on the reference triangle") {
    const Mesh m = reference_triangle();
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    Eigen::Matrix3d mass, stiff;
    mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    mass /= 24.0;
    stiff << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    stiff /= 2.0;
    CHECK((dense(assemble_mass(m, d, 1.0)) - mass).norm() < 1e-15);
    CHECK((dense(assemble_stiffness(m, d, 1.0)) - stiff).norm() < 1e-15);
    CHECK(dense(assemble_mass(m, d, 0.0)).norm() == 0.0);
  }

  TEST_CASE("global mass and stiffness identities") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.125);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    const SparseMatrix mass = assemble_mass(m, d, 3.0);
    CHECK((mass * Vector::Ones(d.n_dofs())).sum() == doctest::Approx(3.0));
    const SparseMatrix k = assemble_stiffness(m, d, 1.0);
    CHECK((k * Vector::Ones(d.n_dofs())).lpNorm<Eigen::Infinity>() < 1e-13);
    for (double h : {0.5, 0.25, 0.125}) {
      const Mesh sq = porous_square(h);
      const DofMap ds = DofMap::build(sq, SpaceKind::P1Scalar);
      const auto ux = interpolate(sq, ds, [](const Vec2& x, double) { return x.x(); }, 0.0);
      CHECK(form(assemble_stiffness(sq, ds, 1.0), ux.values, ux.values) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  TEST_CASE("exchange terms") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    ModelParams p;
    p.sigma_star = 2.0;
    p.k_f = 3.0;
    p.mu_tilde = 1.5;
    const auto e = assemble_exchange(m, d, p);
    const Vector ones = Vector::Ones(d.n_dofs());
    const Vector q = interpolate(m, d, [](const Vec2& x, double) { return std::sin(x.x()) + x.y(); }, 0.0).values;
    CHECK(e.F_f.apply(q, q).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(e.m_f.apply(q, q).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(ones.dot(e.F_f.self * ones) == doctest::Approx(p.transfer_Ff() * 1.0));
    p.sigma_star = 0.0;
    const auto z = assemble_exchange(m, d, p);
    CHECK(z.F_f.self.norm() == 0.0);
    CHECK(z.f_F.other.norm() == 0.0);
    CHECK(z.f_m.self.norm() > 0.0);
  }

  TEST_CASE("conduit viscous form on linear fields") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    ModelParams p;
    p.nu = 0.7;
    p.eta = 1.3;
    p.alpha = 2.0;
    p.k_F = 0.25;
    const SparseMatrix a = assemble_conduit_viscous(m, v, p);
    // Translation: no deformation, friction eta nu alpha sqrt(2)/sqrt(2 k_F) c^2 |Gamma|.
    const double c = 1.7;
    const auto t = interpolate(m, v, [&](const Vec2&, double) { return Vec2(c, 0.0); }, 0.0);
    CHECK(form(a, t.values, t.values) == doctest::Approx(p.eta * p.nu * p.alpha / std::sqrt(p.k_F) * c * c));
    // Shear (y, 0): |D u|^2 = 1/2, so 2 nu eta int D:D = nu eta |Omega_c|; u.tau = 1 on Gamma.
    const auto s = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.y(), 0.0); }, 0.0);
    CHECK(form(a, s.values, s.values) == doctest::Approx(p.nu * p.eta + p.bj_friction()));

    ModelParams no_bj = p;
    no_bj.alpha = 0.0;
    const SparseMatrix d =
        assemble_deformation(m, v, 2.0 * p.nu * p.eta, m.cells_in(Region::Conduit));
    CHECK((dense(assemble_conduit_viscous(m, v, no_bj)) - dense(d)).norm() < 1e-14);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
      Vector x(v.n_dofs());
      for (int i = 0; i < x.size(); ++i) x[i] = g(rng);
      CHECK(form(a, x, x) >= -1e-12 * x.squaredNorm());
    }
  }

  TEST_CASE("missing interface tags") {
    Mesh m = build_rect_mesh(example1_domain(), 0.25);
    for (auto& e : m.edges)
      if (e.tag == EdgeTag::Interface) e.tag = EdgeTag::OuterC;
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    CHECK_THROWS_AS(assemble_conduit_viscous(m, v, {}), MissingInterfaceTags);
  }

  TEST_CASE("interface coupling") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap pd = DofMap::build(m, SpaceKind::P1Scalar);
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    ModelParams p;
    p.eta = 2.0;
    const auto c = assemble_interface_coupling(m, pd, v, p);
    const Vector ones = Vector::Ones(pd.n_dofs());
    CHECK((c.tangential_load * (3.0 * ones)).lpNorm<Eigen::Infinity>() < 1e-14);
    // n_c = (0, -1) on Gamma: -int v_F u.n with u = (0, w) and v_F = 1 gives w |Gamma|.
    const double w = 0.8;
    const auto u = interpolate(m, v, [&](const Vec2&, double) { return Vec2(0.0, w); }, 0.0);
    CHECK(ones.dot(c.normal_flux * u.values) == doctest::Approx(w));
    // (eta/rho) int p_F v.n with p_F = 1, v = (0, 1): -eta |Gamma|.
    const auto ey = interpolate(m, v, [](const Vec2&, double) { return Vec2(0.0, 1.0); }, 0.0);
    CHECK(ey.values.dot(c.pressure_load * ones) == doctest::Approx(-p.eta / p.rho));

    p.eta = 0.0;
    const auto z = assemble_interface_coupling(m, pd, v, p);
    CHECK(z.pressure_load.norm() == 0.0);
    CHECK(z.tangential_load.norm() == 0.0);
    CHECK((dense(z.normal_flux) - dense(c.normal_flux)).norm() == 0.0);

    const auto iface = edges_with_tag(m, EdgeTag::Interface);
    for (int e : iface) {
      const auto f = edge_frame(m, m.edges[e]);
      CHECK(f.normal.y() == doctest::Approx(-1.0));
      CHECK(f.length == doctest::Approx(0.25));
    }
  }

  TEST_CASE("divergence") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    const DofMap q = DofMap::build(m, SpaceKind::P1ScalarConduit);
    const SparseMatrix b = assemble_divergence(m, v, q, 1.0);
    CHECK(b.rows() == q.n_dofs());
    CHECK(b.cols() == v.n_dofs());
    const auto sol = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.y(), x.x()); }, 0.0);
    CHECK((b * sol.values).lpNorm<Eigen::Infinity>() < 1e-14);
    const SparseMatrix b2 = assemble_divergence(m, v, q, 2.0);
    CHECK((dense(b2) - 2.0 * dense(b)).norm() < 1e-14);
    const auto ux = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.x(), 0.0); }, 0.0);
    const double eta = 1.5;
    CHECK(Vector::Ones(q.n_dofs()).dot(assemble_divergence(m, v, q, eta) * ux.values) == doctest::Approx(-eta));
  }

  TEST_CASE("convection") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    const auto zero = FieldVector::zero(v);
    CHECK(assemble_convection(m, v, zero, 1.0, true).norm() == 0.0);
    CHECK(assemble_convection(m, v, zero, 1.0, false).norm() == 0.0);
    const auto w = interpolate(m, v, [](const Vec2&, double) { return Vec2(1.0, 0.0); }, 0.0);
    const auto u = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.x(), 0.0); }, 0.0);
    // ((w.grad) u, u) = int x over (0,1) x (1,2) = 1/2.
    const double eta = 2.0;
    CHECK(form(assemble_convection(m, v, w, eta, false), u.values, u.values) == doctest::Approx(eta * 0.5));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> g(-1, 1);
    for (int k = 0; k < 100; ++k) {
      FieldVector wr = FieldVector::zero(v);
      Vector x(v.n_dofs());
      for (int i = 0; i < x.size(); ++i) {
        wr.values[i] = g(rng);
        x[i] = g(rng);
      }
      const SparseMatrix n = assemble_convection(m, v, wr, 1.0, true);
      CHECK(std::abs(form(n, x, x)) < 1e-12 * x.squaredNorm() * wr.values.lpNorm<Eigen::Infinity>());
    }
  }

  TEST_CASE("skew form plus boundary term reproduces the plain form for fixed-boundary fields") {
    // With u vanishing on the Dirichlet part, ((w.grad)u, v) = skew + (1/2) int (w.n) u.v on open edges
    // minus (1/2) int (div w) u.v, which is zero for a divergence-free wind.
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const DofMap v = DofMap::build(m, SpaceKind::MiniVector);
    const auto w = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.y(), x.x()); }, 0.0);
    const auto u = interpolate(m, v, [](const Vec2& x, double) { return Vec2(x.x() * x.y(), 1.0 - x.x()); }, 0.0);
    Vector uv = u.values;
    for (int d : v.dirichlet_set()) uv[d] = 0.0;
    const auto natural = conduit_natural_edges(m);
    const SparseMatrix plain = assemble_convection(m, v, w, 1.0, false);
    const SparseMatrix skew = assemble_convection(m, v, w, 1.0, true);
    const SparseMatrix bdry = assemble_convection_boundary(m, v, w, 1.0, natural);
    CHECK(form(plain, uv, uv) == doctest::Approx(form(skew, uv, uv) + form(bdry, uv, uv)).epsilon(1e-12));
  }

  TEST_CASE("loads") {
    const Mesh m = porous_square(0.25);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    CHECK(assemble_load(m, d, ScalarFunction([](const Vec2&, double) { return 0.0; }), 0.0).norm() == 0.0);
    CHECK(assemble_load(m, d, ScalarFunction([](const Vec2&, double) { return 1.0; }), 0.0).sum() ==
          doctest::Approx(1.0));
    CHECK(assemble_load(m, d, ScalarFunction([](const Vec2& x, double) { return x.x(); }), 0.0).sum() ==
          doctest::Approx(0.5));
    const Mesh two = build_rect_mesh(example1_domain(), 0.25);
    const DofMap v = DofMap::build(two, SpaceKind::MiniVector);
    const Vector f = assemble_load(two, v, VectorFunction([](const Vec2&, double) { return Vec2(1.0, 0.0); }), 0.0, 2.0);
    const auto ex = interpolate(two, v, [](const Vec2&, double) { return Vec2(1.0, 0.0); }, 0.0);
    CHECK(f.dot(ex.values) == doctest::Approx(2.0));
  }

  TEST_CASE("dirichlet data through the dofmap") {
    const Mesh m = porous_square(0.25);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    SparseMatrix k = assemble_stiffness(m, d, 1.0);
    Vector b = Vector::Zero(d.n_dofs());
    const ScalarFunction lin = [](const Vec2& x, double) { return 1.0 + 2.0 * x.x() - x.y(); };
    apply_dirichlet(k, b, d, dirichlet_values(m, d, lin, 0.0));
    const Vector x = lu_solve(k, b);
    const auto exact = interpolate(m, d, lin, 0.0);
    CHECK((x - exact.values).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}
