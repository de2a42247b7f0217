#include <doctest.h>

#include "oracles.hpp"
#include "tpns/error.hpp"
#include "tpns/mms.hpp"

using namespace tpns;

namespace {

double max_abs(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

bool is_zero(const State& s) {
  return max_abs(s.p_F.values) == 0.0 && max_abs(s.p_f.values) == 0.0 && max_abs(s.p_m.values) == 0.0 &&
         max_abs(s.u_c.values) == 0.0 && max_abs(s.p.values) == 0.0;
}

} // namespace

TEST_SUITE("stepping") {
  TEST_CASE("zero data stays zero") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Discretization disc(m, {});
    const ProblemData zero;
    StepConfig cfg;
    const TraditionalStepper st(disc, cfg, zero);
    State s = State::initial(disc, zero);
    CHECK(is_zero(s));
    const auto c = st.step_conduit(s);
    CHECK(c.picard.iterations == 1);
    CHECK(c.picard.converged);
    for (int n = 0; n < 2; ++n) s = st.advance(s);
    CHECK(is_zero(s));
    CHECK(s.t == doctest::Approx(2 * cfg.dt));
  }

  TEST_CASE("constant porous pressures are preserved") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Discretization disc(m, {});
    const double c = 2.5;
    ProblemData d;
    d.bc_F = d.bc_f = d.bc_m = [&](const Vec2&, double) { return c; };
    d.init_F = d.init_f = d.init_m = d.bc_F;
    const TraditionalStepper st(disc, {}, d);
    const auto r = st.step_porous(State::initial(disc, d));
    for (const auto* f : {&r.p_F, &r.p_f, &r.p_m})
      CHECK((f->values.array() - c).abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("porous step matches a dense monolithic assembly") {
    for (double k : {1.0, 0.3}) {
      ModelParams p;
      p.k_F = k;
      p.sigma = 2.0;
      p.phi_m = 0.5;
      p.C_f = 3.0;
      const auto mc = example1_case(p);
      const auto data = mc.data();
      const Mesh m = build_rect_mesh(example1_domain(), 0.25);
      const Discretization disc(m, p);
      StepConfig cfg;
      cfg.dt = 1.0 / 16;
      const TraditionalStepper st(disc, cfg, data);
      const State s0 = State::initial(disc, data);
      const auto lib = st.step_porous(s0);
      const auto ref = oracle::dense_porous_step(disc, s0, data, cfg.dt);
      CHECK((lib.p_F.values - ref.p_F).lpNorm<Eigen::Infinity>() < 1e-10);
      CHECK((lib.p_f.values - ref.p_f).lpNorm<Eigen::Infinity>() < 1e-10);
      CHECK((lib.p_m.values - ref.p_m).lpNorm<Eigen::Infinity>() < 1e-10);
      // Close to the exact fields at t = dt.
      const double err = compute_norm(lib.p_f, m, mc.p_f, cfg.dt, NormKind::L2);
      CHECK(err < 0.2);
    }
  }

  TEST_CASE("picard iteration counts") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Discretization disc(m, {});
    StepConfig cfg;
    cfg.dt = 1.0 / 16;
    const State s0 = State::initial(disc, data);
    const auto ns = TraditionalStepper(disc, cfg, data).step_conduit(s0);
    CHECK(ns.picard.converged);
    CHECK(ns.picard.iterations <= 6);
    cfg.convection = false;
    const auto stokes = TraditionalStepper(disc, cfg, data).step_conduit(s0);
    CHECK(stokes.picard.iterations == 1);
    CHECK(stokes.picard.converged);
  }

  TEST_CASE("conduit step uses the lagged macrofracture pressure") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Discretization disc(m, {});
    const TraditionalStepper st(disc, {}, data);
    const State s0 = State::initial(disc, data);
    const auto lagged = st.step_conduit(s0);
    const auto pnew = st.step_porous(s0);
    const auto fresh = st.step_conduit(s0, &pnew.p_F);
    CHECK((lagged.u_c.values - fresh.u_c.values).norm() > 1e-8);
    const State adv = st.advance(s0);
    CHECK((adv.u_c.values - lagged.u_c.values).norm() == 0.0);
    CHECK((adv.p_F.values - pnew.p_F.values).norm() == 0.0);
  }

  TEST_CASE("worker count does not change a step") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 0.125);
    const Discretization disc(m, {});
    StepConfig one, four;
    four.workers = 4;
    const State s0 = State::initial(disc, data);
    const State a = TraditionalStepper(disc, one, data).advance(s0);
    const State b = TraditionalStepper(disc, four, data).advance(s0);
    for (auto f : {&State::p_F, &State::p_f, &State::p_m, &State::u_c, &State::p})
      CHECK(((a.*f).values - (b.*f).values).norm() == 0.0);
  }

  TEST_CASE("full run stays bounded") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    StepConfig cfg;
    cfg.dt = 1.0 / 16;
    const auto run = run_traditional(m, {}, cfg, data, 16);
    const ErrorRow r = error_row(run, mc);
    CHECK(std::isfinite(r.uc_h1));
    CHECK(r.uc_h1 < 10 * 0.783562);
    CHECK(r.pf_l2 < 10 * 0.094526);
    CHECK(run.stats.picard_stagnations == 0);
    CHECK(run.state.t == doctest::Approx(1.0));
  }

  TEST_CASE("halving dt reduces the time error") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 1.0 / 32);
    StepConfig cfg;
    cfg.dt = 0.25;
    const ErrorRow a = error_row(run_traditional(m, {}, cfg, data, 4), mc);
    cfg.dt = 0.125;
    const ErrorRow b = error_row(run_traditional(m, {}, cfg, data, 8), mc);
    CHECK(b.pf_l2 < a.pf_l2);
    CHECK(b.pm_l2 < a.pm_l2);
  }

  TEST_CASE("invalid step settings") {
    StepConfig c;
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), InvariantViolation);
    c = {};
    c.picard_tol = 1.0;
    CHECK_THROWS_AS(c.validate(), InvariantViolation);
    c = {};
    c.picard_max = 0;
    CHECK_THROWS_AS(c.validate(), InvariantViolation);
    c = {};
    CHECK_NOTHROW(c.validate());
  }
}
