#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tpns/error.hpp"
#include "tpns/mms.hpp"

using namespace tpns;

namespace {

Mesh porous_square(double h) {
  return build_structured_mesh({0, 0, 1, 1}, h, [](const Vec2&) { return std::optional<Region>(Region::Porous); });
}

ScalarExact constant(double c) {
  return {[=](const Vec2&, double) { return c; }, [](const Vec2&, double) { return Vec2(0, 0); }};
}

void check_forcing(const ModelParams& p, std::uint64_t seed) {
  const auto mc = example1_case(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    const auto rp = oracle::forcing_residual(mc, p, Vec2(u(rng), u(rng)), t);
    const auto rc = oracle::forcing_residual(mc, p, Vec2(u(rng), 1.0 + u(rng)), t);
    worst = std::max({worst, std::abs(rp.F), std::abs(rp.f), std::abs(rp.m), std::abs(rc.momentum[0]),
                      std::abs(rc.momentum[1]), std::abs(rc.continuity)});
  }
  CHECK(worst < 1e-5L);
}

} // namespace

TEST_SUITE("mms") {
  TEST_CASE("exact fields at probe points") {
    const auto mc = example1_case();
    CHECK(mc.p_F.value(Vec2(0, 1), 0.0) == doctest::Approx(2.0));
    for (double t : {0.0, 0.4, 1.0}) CHECK(mc.u_c.value(Vec2(0, 1.5), t).y() == doctest::Approx(2.0 * std::cos(t)));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng), y = u(rng), t = u(rng);
      const auto p = oracle::exact_pressures(x, y, t);
      const auto pc = oracle::exact_pressures(x, 1 + y, t);
      const auto v = oracle::exact_velocity(x, 1 + y, t);
      CHECK(mc.p_F.value(Vec2(x, y), t) == doctest::Approx(static_cast<double>(p[0])).epsilon(1e-13));
      CHECK(mc.p_f.value(Vec2(x, y), t) == doctest::Approx(static_cast<double>(p[1])).epsilon(1e-13));
      CHECK(mc.p_m.value(Vec2(x, y), t) == doctest::Approx(static_cast<double>(p[2])).epsilon(1e-13));
      CHECK(mc.p.value(Vec2(x, 1 + y), t) == doctest::Approx(static_cast<double>(pc[3])).epsilon(1e-13));
      CHECK(mc.u_c.value(Vec2(x, 1 + y), t).x() == doctest::Approx(static_cast<double>(v[0])).epsilon(1e-13));
      CHECK(mc.u_c.value(Vec2(x, 1 + y), t).y() == doctest::Approx(static_cast<double>(v[1])).epsilon(1e-13));
    }
  }

  TEST_CASE("exact velocity is divergence free") {
    const auto mc = example1_case();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Mat2 j = mc.u_c.grad(Vec2(u(rng), 1 + u(rng)), u(rng));
      CHECK(std::abs(j.trace()) < 1e-13);
    }
  }

  TEST_CASE("forcing matches a finite-difference residual") {
    check_forcing(ModelParams{}, 3);
    ModelParams p;
    p.phi_F = 0.3;
    p.C_m = 2.0;
    p.k_F = 0.5;
    p.k_f = 4.0;
    p.k_m = 0.1;
    p.sigma = 3.0;
    p.sigma_star = 0.2;
    p.mu_tilde = 2.5;
    p.nu = 0.4;
    check_forcing(p, 4);
  }

  TEST_CASE("norm elementary values") {
    const Mesh m = porous_square(0.25);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    const auto zero = FieldVector::zero(d);
    CHECK(compute_norm(zero, m, constant(1.0), 0.0, NormKind::L2) == doctest::Approx(1.0));
    const ScalarExact x{[](const Vec2& p, double) { return p.x(); }, [](const Vec2&, double) { return Vec2(1, 0); }};
    CHECK(compute_norm(zero, m, x, 0.0, NormKind::H1Semi) == doctest::Approx(1.0));
    const ScalarExact lin{[](const Vec2& p, double t) { return 2 * p.x() - p.y() + t; },
                          [](const Vec2&, double) { return Vec2(2, -1); }};
    const auto li = interpolate(m, d, lin.value, 0.5);
    CHECK(compute_norm(li, m, lin, 0.5, NormKind::L2) < 1e-12);
    CHECK(compute_norm(li, m, lin, 0.5, NormKind::H1Semi) < 1e-12);
  }

  TEST_CASE("piecewise norms") {
    const auto mc = example1_case();
    const Mesh c = build_rect_mesh(example1_domain(), 0.5);
    const Mesh f = nested_fine_mesh(c, 0.5, 0.25);
    const Discretization dc(c, {}), df(f, {});
    const auto pr = Prolongation::build(dc, df);
    const State sc = State::initial(dc, mc.data(), 0.5);

    // One subdomain per region: the piecewise norm is the global norm.
    const auto one = partition_subdomains(f, {1, 1, 1, 1, 1.0});
    const auto comp1 = correct(sc, pr, CorrectionSet::zero(df, one), df, one);
    const auto pf = prolong(sc.p_f, pr.porous, df.porous());
    CHECK(compute_piecewise_norm(comp1, CompositeSolution::Field::pf, mc.p_f, 0.5, NormKind::L2) ==
          doctest::Approx(compute_norm(pf, f, mc.p_f, 0.5, NormKind::L2)).epsilon(1e-13));

    // Two halves of area 1/2 whose subdomain L2 errors are 3 and 4.
    const auto two = partition_subdomains(f, {2, 1, 1, 1, 0.0});
    auto corr = CorrectionSet::zero(df, two);
    corr.e_F[0].setConstant(3.0 * std::sqrt(2.0));
    corr.e_F[1].setConstant(4.0 * std::sqrt(2.0));
    const auto comp2 = correct(State::zero(dc), pr, corr, df, two);
    CHECK(compute_piecewise_norm(comp2, CompositeSolution::Field::pF, constant(0.0), 0.0, NormKind::L2) ==
          doctest::Approx(5.0));

    // Exact linear data on the coarse grid prolongs to an exact composite.
    ProblemData d;
    const ScalarExact lin{[](const Vec2& p, double) { return p.x() + 2 * p.y(); },
                          [](const Vec2&, double) { return Vec2(1, 2); }};
    d.init_F = lin.value;
    const State sl = State::initial(dc, d);
    const auto comp3 = correct(sl, pr, CorrectionSet::zero(df, two), df, two);
    CHECK(compute_piecewise_norm(comp3, CompositeSolution::Field::pF, lin, 0.0, NormKind::H1Semi) < 1e-12);
  }

  TEST_CASE("relative differences") {
    const Mesh m = porous_square(0.25);
    const DofMap d = DofMap::build(m, SpaceKind::P1Scalar);
    FieldVector a = FieldVector::zero(d), b = FieldVector::zero(d);
    b.values.setConstant(2.0);
    a.values.setConstant(2.2);
    CHECK(relative_l2_difference(a, b, m) == doctest::Approx(0.1));
    CHECK(relative_l2_difference(b, b, m) == 0.0);
    CHECK(relative_l2_difference(a, FieldVector::zero(d), m) == doctest::Approx(2.2));
  }

  TEST_CASE("convergence rates") {
    CHECK(convergence_rate(0.786682, 0.209930, 0.25, 1.0 / 16) == doctest::Approx(std::log(0.786682 / 0.209930) / std::log(4.0)));
    ErrorTable t;
    t.rows.push_back({0.25, 0.5, 0.0625, 1.0, 0, 0, 0, 0, 0, 0});
    CHECK(!t.rate(0, &ErrorRow::uc_h1));
    t.rows.push_back({0.125, 0.25, 0.0625, 0.25, 0, 0, 0, 0, 0, 0});
    CHECK(*t.rate(1, &ErrorRow::uc_h1) == doctest::Approx(2.0));
    CHECK(!t.rate(1, &ErrorRow::pf_l2));
  }

  TEST_CASE("single-row sweep") {
    SweepSettings s;
    s.T = 0.25;
    const auto t = convergence_sweep({{0.25, 0.5, 0.0625, {2, 2, 2, 2, 0.25}}}, Algorithm::Traditional, s);
    REQUIRE(t.rows.size() == 1);
    CHECK(!t.rate(0, &ErrorRow::uc_h1));
    CHECK(t.rows[0].uc_h1 > 0);
    CHECK(t.rows[0].h == 0.25);
    CHECK(t.rows[0].H == 0.0); // no coarse grid in the traditional scheme
  }

  TEST_CASE("interpolated exact solution has interpolation-size errors") {
    const auto mc = example1_case();
    for (double h : {0.125, 0.0625}) {
      const Mesh m = build_rect_mesh(example1_domain(), h);
      const Discretization disc(m, {});
      const State s = State::initial(disc, mc.data(), 0.0);
      CHECK(compute_norm(s.p_f, m, mc.p_f, 0.0, NormKind::L2) < 2 * h * h * std::numbers::pi * std::numbers::pi);
    }
  }
}
