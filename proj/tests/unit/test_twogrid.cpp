#include <doctest.h>

#include "tpns/error.hpp"
#include "tpns/mms.hpp"

using namespace tpns;

namespace {

const SubdomainLayout kLayout{2, 2, 2, 2, 0.25};

struct Pair {
  Mesh coarse, fine;
  std::unique_ptr<Discretization> dc, df;
  Pair(double H, double h)
      : coarse(build_rect_mesh(example1_domain(), H)), fine(nested_fine_mesh(coarse, H, h)),
        dc(std::make_unique<Discretization>(coarse, ModelParams{})),
        df(std::make_unique<Discretization>(fine, ModelParams{})) {}
};

double hat(const Mesh& m, int cell, int vertex, const Vec2& x) {
  const auto g = CellGeometry::of(m, cell);
  const auto b = g.barycentric(x);
  for (int i = 0; i < 3; ++i)
    if (m.triangles[cell][i] == vertex) return b[i];
  return 0.0;
}

} // namespace

TEST_SUITE("twogrid") {
  TEST_CASE("prolongation reproduces constants and linears") {
    Pair p(0.5, 0.125);
    const auto pr = Prolongation::build(*p.dc, *p.df);
    const ScalarFunction lin = [](const Vec2& x, double) { return 1.0 + 3.0 * x.x() - 2.0 * x.y(); };
    const auto cf = interpolate(p.coarse, p.dc->porous(), lin, 0.0);
    const auto ff = prolong(cf, pr.porous, p.df->porous());
    CHECK((ff.values - interpolate(p.fine, p.df->porous(), lin, 0.0).values).lpNorm<Eigen::Infinity>() < 1e-13);
    const VectorFunction vlin = [](const Vec2& x, double) { return Vec2(x.y(), 2.0 - x.x()); };
    const auto cu = interpolate(p.coarse, p.dc->velocity(), vlin, 0.0);
    const auto fu = prolong(cu, pr.velocity, p.df->velocity());
    CHECK((fu.values - interpolate(p.fine, p.df->velocity(), vlin, 0.0).values).lpNorm<Eigen::Infinity>() < 1e-13);
    const auto one = prolong(FieldVector{&p.dc->pressure(), Vector::Ones(p.dc->pressure().n_dofs()), 0.0},
                             pr.pressure, p.df->pressure());
    CHECK((one.values.array() - 1.0).abs().maxCoeff() < 1e-14);
  }

  TEST_CASE("prolonged hat matches pointwise evaluation") {
    Pair p(0.5, 0.125);
    const auto pr = Prolongation::build(*p.dc, *p.df);
    const DofMap& cd = p.dc->porous();
    const int cv = 4; // an interior porous vertex
    REQUIRE(cd.vertex_dof(cv) >= 0);
    FieldVector h = FieldVector::zero(cd);
    h.values[cd.vertex_dof(cv)] = 1.0;
    const auto fh = prolong(h, pr.porous, p.df->porous());
    const DofMap& fd = p.df->porous();
    for (int c : fd.cells())
      for (int v : p.fine.triangles[c]) {
        const double expect = hat(p.coarse, p.fine.parent[c], cv, p.fine.vertices[v]);
        CHECK(fh.values[fd.vertex_dof(v)] == doctest::Approx(expect).epsilon(1e-14));
      }
  }

  TEST_CASE("identity nesting gives the identity operator") {
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Mesh f = nest_identity(m);
    const Discretization dc(m, {}), df(f, {});
    const auto pr = Prolongation::build(dc, df);
    for (const SparseMatrix* a : {&pr.porous, &pr.velocity, &pr.pressure}) {
      const Eigen::MatrixXd d(*a);
      CHECK((d - Eigen::MatrixXd::Identity(d.rows(), d.cols())).norm() < 1e-13);
    }
  }

  TEST_CASE("non-nested meshes are rejected") {
    const Mesh c = build_rect_mesh(example1_domain(), 0.5);
    const Mesh f = build_rect_mesh(example1_domain(), 0.25); // no parent map
    const Discretization dc(c, {}), df(f, {});
    CHECK_THROWS_AS(Prolongation::build(dc, df), NotNested);
    CHECK_THROWS_AS(nested_fine_mesh(c, 0.5, 0.5 / 3), NotNested);
  }

  TEST_CASE("coarse march with H = h equals the traditional step") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh m = build_rect_mesh(example1_domain(), 0.25);
    const Mesh f = nest_identity(m);
    const Discretization dc(m, {}), df(f, {});
    const auto dec = partition_subdomains(f, {1, 1, 1, 1, 1.0});
    const StepConfig cfg;
    const LocalParallelStepper lp(dc, df, dec, cfg, data);
    const State s0 = State::initial(dc, data);
    const State a = lp.coarse_march(s0);
    const State b = TraditionalStepper(dc, cfg, data).advance(s0);
    for (auto fld : {&State::p_F, &State::p_f, &State::p_m, &State::u_c, &State::p})
      CHECK(((a.*fld).values - (b.*fld).values).norm() == 0.0);
    // Fine space equals the coarse one, so the corrections vanish.
    const auto r = lp.advance(s0, lp.initial_corrections());
    for (std::size_t j = 0; j < dec.subdomains.size(); ++j) {
      if (dec.subdomains[j].region == Region::Porous) {
        CHECK(r.corrections.e_F[j].lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK(r.corrections.e_m[j].lpNorm<Eigen::Infinity>() < 1e-10);
      } else {
        CHECK(r.corrections.e_c[j].lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK(r.corrections.xi[j].lpNorm<Eigen::Infinity>() < 1e-8);
      }
    }
  }

  TEST_CASE("zero data gives zero corrections") {
    Pair p(0.5, 0.25);
    const auto dec = partition_subdomains(p.fine, kLayout);
    const LocalParallelStepper lp(*p.dc, *p.df, dec, {}, {});
    const auto r = lp.advance(State::zero(*p.dc), lp.initial_corrections());
    for (const auto* set : {&r.corrections.e_F, &r.corrections.e_f, &r.corrections.e_m, &r.corrections.e_c,
                            &r.corrections.xi})
      for (const auto& v : *set) CHECK((v.size() == 0 || v.lpNorm<Eigen::Infinity>() == 0.0));
  }

  TEST_CASE("zero corrections give the prolonged coarse state") {
    const auto mc = example1_case();
    Pair p(0.5, 0.25);
    const auto dec = partition_subdomains(p.fine, kLayout);
    const auto pr = Prolongation::build(*p.dc, *p.df);
    const State sc = State::initial(*p.dc, mc.data(), 0.3);
    const auto comp = correct(sc, pr, CorrectionSet::zero(*p.df, dec), *p.df, dec);
    const auto pf = prolong(sc.p_f, pr.porous, p.df->porous());
    CHECK((comp.vertex_field(CompositeSolution::Field::pf).values - pf.values).norm() == 0.0);
    const auto uc = prolong(sc.u_c, pr.velocity, p.df->velocity());
    CHECK((comp.subdomain_field(CompositeSolution::Field::uc, 5).values - uc.values).norm() == 0.0);
  }

  TEST_CASE("composite uses the owner's correction") {
    Pair p(0.5, 0.25);
    const auto dec = partition_subdomains(p.fine, kLayout);
    const auto pr = Prolongation::build(*p.dc, *p.df);
    auto corr = CorrectionSet::zero(*p.df, dec);
    const auto porous = dec.indices_of(Region::Porous);
    for (int j : porous) corr.e_F[j].setConstant(static_cast<double>(j + 1));
    const auto comp = correct(State::zero(*p.dc), pr, corr, *p.df, dec);
    const auto f = comp.vertex_field(CompositeSolution::Field::pF);
    const DofMap& d = p.df->porous();
    for (int c : d.cells()) {
      // The lowest-index cell of each vertex decides; check the cell that decides vertex 0 of c.
      const int v = p.fine.triangles[c][0];
      int first = -1;
      for (int k = 0; k < p.fine.n_cells() && first < 0; ++k)
        for (int w : p.fine.triangles[k])
          if (w == v && p.fine.cell_region[k] == Region::Porous) first = k;
      CHECK(f.values[d.vertex_dof(v)] == static_cast<double>(dec.owner[first] + 1));
    }
  }

  TEST_CASE("enclosed conduit subdomains need a pressure pin") {
    // The upper conduit subdomains see only prescribed outer walls and artificial boundary.
    Pair p(0.5, 0.25);
    const auto dec = partition_subdomains(p.fine, kLayout);
    StepConfig cfg;
    cfg.pressure_pin = false;
    CHECK_THROWS_AS(LocalParallelStepper(*p.dc, *p.df, dec, cfg, {}), SingularPressureBlock);
    cfg.pressure_pin = true;
    CHECK_NOTHROW(LocalParallelStepper(*p.dc, *p.df, dec, cfg, {}));
  }

  TEST_CASE("missing corrections are rejected") {
    Pair p(0.5, 0.25);
    const auto dec = partition_subdomains(p.fine, kLayout);
    const auto pr = Prolongation::build(*p.dc, *p.df);
    auto corr = CorrectionSet::zero(*p.df, dec);
    corr.e_c.pop_back();
    CHECK_THROWS_AS(correct(State::zero(*p.dc), pr, corr, *p.df, dec), MissingCorrection);
    auto corr2 = CorrectionSet::zero(*p.df, dec);
    corr2.e_F[0] = Vector();
    CHECK_THROWS_AS(correct(State::zero(*p.dc), pr, corr2, *p.df, dec), MissingCorrection);
  }

  TEST_CASE("worker counts give bitwise identical results") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh c = build_rect_mesh(example1_domain(), 0.5);
    const Mesh f = nested_fine_mesh(c, 0.5, 0.125);
    StepConfig one, four;
    one.dt = four.dt = 1.0 / 16;
    four.workers = 4;
    const auto a = run_local_parallel(c, f, kLayout, {}, one, data, 3);
    const auto b = run_local_parallel(c, f, kLayout, {}, four, data, 3);
    const State sa = a.composite.vertex_state(), sb = b.composite.vertex_state();
    for (auto fld : {&State::p_F, &State::p_f, &State::p_m, &State::u_c, &State::p})
      CHECK(((sa.*fld).values - (sb.*fld).values).norm() == 0.0);
    for (std::size_t j = 0; j < a.corrections.e_c.size(); ++j)
      CHECK((a.corrections.e_c[j] - b.corrections.e_c[j]).norm() == 0.0);
  }

  TEST_CASE("local corrections improve on the coarse solution") {
    const auto mc = example1_case();
    const auto data = mc.data();
    const Mesh c = build_rect_mesh(example1_domain(), 0.5);
    const Mesh f = nested_fine_mesh(c, 0.5, 0.125);
    StepConfig cfg;
    cfg.dt = 1.0 / 16;
    const auto lp = run_local_parallel(c, f, kLayout, {}, cfg, data, 16);
    const auto coarse = run_traditional(c, {}, cfg, data, 16);
    const double e_lp = compute_piecewise_norm(lp.composite, CompositeSolution::Field::pF, mc.p_F, 1.0, NormKind::H1Semi);
    const double e_c = compute_norm(coarse.state.p_F, c, mc.p_F, 1.0, NormKind::H1Semi);
    CHECK(e_lp < e_c);
  }
}
