#include "tpns/wellbore.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "tpns/error.hpp"
#include "tpns/parallel.hpp"

namespace tpns {

ModelParams wellbore_params() {
  ModelParams p;
  p.phi_m = 1e-2;
  p.phi_f = 1e-3;
  p.phi_F = 1e-4;
  p.C_m = p.C_f = p.C_F = 1e-4;
  p.k_m = 1e-8;
  p.k_f = 1e-6;
  p.k_F = 1e-3;
  p.mu_tilde = 1e-2;
  p.nu = 1e-2;
  p.sigma = 0.5;
  p.sigma_star = 0.5;
  p.rho = 10.0;
  p.alpha = 1.0;
  p.eta = 1.0;
  return p;
}

void WellboreConfig::validate() const {
  params.validate();
  if (!(square.width() > 0.0 && square.height() > 0.0)) throw InvariantViolation("empty wellbore square");
  if (!(0.0 <= outlet_lo && outlet_lo < outlet_hi && outlet_hi <= 1.0))
    throw InvariantViolation("outlet fractions need 0 <= lo < hi <= 1");
  if (!(H > 0.0 && h > 0.0 && h <= H)) throw InvariantViolation("need 0 < h <= H");
  const double ratio = H / h;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) throw InvariantViolation("h must divide H");
  if (!(dt > 0.0) || !(T > 0.0)) throw InvariantViolation("need dt > 0 and T > 0");
}

namespace {

/// Coordinate on the line family x0 + k*H, snapped or checked.
double align(double x, double x0, double H, bool snap, const char* what) {
  const double k = std::round((x - x0) / H);
  const double on = x0 + k * H;
  if (!snap && std::abs(on - x) > 1e-9 * std::max(1.0, std::abs(x)))
    throw GeometryMisaligned(std::string(what) + " is not on a coarse mesh line");
  return on;
}

} // namespace

WellboreGeometry wellbore_geometry(const WellboreConfig& cfg) {
  cfg.validate();
  const Rect& s = cfg.square;
  const Rect& c = cfg.conduit;
  WellboreGeometry g;
  g.conduit = {align(c.x0, s.x0, cfg.H, cfg.snap, "conduit x0"), align(c.y0, s.y0, cfg.H, cfg.snap, "conduit y0"),
               align(c.x1, s.x0, cfg.H, cfg.snap, "conduit x1"), align(c.y1, s.y0, cfg.H, cfg.snap, "conduit y1")};
  g.snapped = !(g.conduit == c);
  const Rect& r = g.conduit;
  const double tol = 1e-9;
  if (!(r.x0 > s.x0 + tol && r.y0 > s.y0 + tol && r.x1 < s.x1 - tol && r.y1 < s.y1 - tol) || r.width() < tol ||
      r.height() < tol)
    throw GeometryMisaligned("conduit must lie strictly inside the square");
  const double y0 = r.y0 + cfg.outlet_lo * r.height();
  const double y1 = r.y0 + cfg.outlet_hi * r.height();
  g.outlet_y0 = align(y0, s.y0, cfg.H, cfg.snap, "outlet start");
  g.outlet_y1 = align(y1, s.y0, cfg.H, cfg.snap, "outlet end");
  if (!(g.outlet_y1 - g.outlet_y0 > tol)) throw EmptyOutlet("outlet span is empty on the coarse mesh");
  return g;
}

Mesh build_wellbore_mesh(const WellboreConfig& cfg, const WellboreGeometry& g, double step) {
  const Rect r = g.conduit;
  const double tol = 1e-9;
  const auto classify = [r](const Vec2& x) -> std::optional<Region> {
    return r.contains(x) ? Region::Conduit : Region::Porous;
  };
  const auto crossing = [&g, tol](const Vec2& a, const Vec2& b) {
    if (std::abs(a.y() - b.y()) < tol) return EdgeTag::Interface; // top and bottom walls
    const double ym = 0.5 * (a.y() + b.y());
    const bool right = std::abs(a.x() - g.conduit.x1) < tol;
    if (right && ym > g.outlet_y0 && ym < g.outlet_y1) return EdgeTag::Outlet;
    return EdgeTag::Cased;
  };
  return build_structured_mesh(cfg.square, step, classify, crossing);
}

WellboreProblem build_wellbore_problem(const WellboreConfig& cfg) {
  WellboreProblem w;
  w.geometry = wellbore_geometry(cfg);
  w.coarse = build_wellbore_mesh(cfg, w.geometry, cfg.H);
  const Mesh fine = build_wellbore_mesh(cfg, w.geometry, cfg.h);
  w.fine = nest_in(w.coarse, fine);
  w.params = cfg.params;
  w.step.dt = cfg.dt;
  w.step.convection = !cfg.stokes;
  w.steps = step_count(cfg.T, cfg.dt);
  const double pF = cfg.p_F_in, pf = cfg.p_f_in, pm = cfg.p_m_in;
  w.data.bc_F = [pF](const Vec2&, double) { return pF; };
  w.data.bc_f = [pf](const Vec2&, double) { return pf; };
  w.data.bc_m = [pm](const Vec2&, double) { return pm; };
  w.data.init_F = w.data.bc_F;
  w.data.init_f = w.data.bc_f;
  w.data.init_m = w.data.bc_m;
  return w;
}

double production_rate(const FieldVector& u, const Mesh& mesh) {
  const auto outlet = edges_with_tag(mesh, EdgeTag::Outlet);
  if (outlet.empty()) throw EmptyOutlet("mesh has no outlet edges");
  // The bubble vanishes on edges, so u.n is linear along each edge and the midpoint rule is exact.
  double q = 0.0;
  for (int i : outlet) {
    const auto& e = mesh.edges[i];
    const EdgeFrame f = edge_frame(mesh, e);
    const auto g = CellGeometry::of(mesh, e.conduit_cell);
    const Vec2 um = eval_vector(u, e.conduit_cell, local_basis(g, g.barycentric(0.5 * (f.a + f.b))));
    q += f.length * um.dot(f.normal);
  }
  return q;
}

double production_rate_functional(const FieldVector& u, const Mesh& mesh) {
  const auto outlet = edges_with_tag(mesh, EdgeTag::Outlet);
  if (outlet.empty()) throw EmptyOutlet("mesh has no outlet edges");
  const DofMap& d = *u.dofs;
  Vector w = Vector::Zero(d.n_dofs());
  for (int i : outlet) {
    const auto& e = mesh.edges[i];
    const EdgeFrame f = edge_frame(mesh, e);
    for (int v : e.v)
      for (int comp = 0; comp < 2; ++comp) w[d.vertex_dof(v, comp)] += 0.5 * f.length * f.normal[comp];
  }
  return w.dot(u.values);
}

RatePoint wellbore_rate(const WellboreConfig& cfg, Algorithm algorithm) {
  const auto t0 = std::chrono::steady_clock::now();
  const WellboreProblem w = build_wellbore_problem(cfg);
  RatePoint pt;
  pt.k_F = cfg.params.k_F;
  pt.algorithm = algorithm;
  if (algorithm == Algorithm::Traditional) {
    const auto run = run_traditional(w.fine, w.params, w.step, w.data, w.steps);
    pt.Q = production_rate(run.state.u_c, run.disc->mesh());
  } else {
    const auto run = run_local_parallel(w.coarse, w.fine, cfg.layout, w.params, w.step, w.data, w.steps);
    pt.Q = production_rate(run.composite.vertex_field(CompositeSolution::Field::uc), run.fine->mesh());
  }
  pt.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return pt;
}

RateCurve sweep_kF(const WellboreConfig& cfg, const std::vector<double>& k_F, Algorithm algorithm, int workers) {
  for (std::size_t i = 0; i < k_F.size(); ++i) {
    if (!(k_F[i] > 0.0)) throw InvariantViolation("k_F values must be positive");
    if (i > 0 && !(k_F[i] > k_F[i - 1])) throw InvariantViolation("k_F values must be strictly increasing");
  }
  RateCurve curve;
  curve.points.resize(k_F.size());
  parallel_for(static_cast<int>(k_F.size()), workers, [&](int i) {
    WellboreConfig c = cfg;
    c.params.k_F = k_F[i];
    curve.points[i] = wellbore_rate(c, algorithm);
  });
  return curve;
}

} // namespace tpns
