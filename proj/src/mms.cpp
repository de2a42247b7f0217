#include "tpns/mms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "tpns/error.hpp"
#include "tpns/run.hpp"

namespace tpns {

namespace {

constexpr double pi = std::numbers::pi;

// Factors of the porous and pressure fields: value = g(x) Y(y) cos t.
struct Profile {
  double y, dy, d2y;
};

double g(double x) { return 2.0 - pi * std::sin(pi * x); }
double g1(double x) { return -pi * pi * std::cos(pi * x); }
double g2(double x) { return pi * pi * pi * std::sin(pi * x); }

Profile Y_F(double y) { return {1.0 - y - std::cos(pi * y), -1.0 + pi * std::sin(pi * y), pi * pi * std::cos(pi * y)}; }
Profile Y_f(double y) {
  return {std::cos(pi * (1.0 - y)), pi * std::sin(pi * (1.0 - y)), -pi * pi * std::cos(pi * (1.0 - y))};
}
Profile Y_m(double y) {
  const double s = 0.5 * pi * (3.0 * y * y * y - 2.0 * y * y);
  const double s1 = 0.5 * pi * (9.0 * y * y - 4.0 * y);
  const double s2 = 0.5 * pi * (18.0 * y - 4.0);
  return {std::sin(s), std::cos(s) * s1, -std::sin(s) * s1 * s1 + std::cos(s) * s2};
}
Profile Y_p(double y) {
  return {std::sin(0.5 * pi * y), 0.5 * pi * std::cos(0.5 * pi * y), -0.25 * pi * pi * std::sin(0.5 * pi * y)};
}

using ProfileFn = Profile (*)(double);

ScalarExact separable(ProfileFn Y) {
  return {[Y](const Vec2& x, double t) { return g(x.x()) * Y(x.y()).y * std::cos(t); },
          [Y](const Vec2& x, double t) {
            const Profile p = Y(x.y());
            return Vec2(std::cos(t) * Vec2(g1(x.x()) * p.y, g(x.x()) * p.dy));
          }};
}

double laplacian(ProfileFn Y, const Vec2& x, double t) {
  const Profile p = Y(x.y());
  return (g2(x.x()) * p.y + g(x.x()) * p.d2y) * std::cos(t);
}

double time_derivative(ProfileFn Y, const Vec2& x, double t) { return -g(x.x()) * Y(x.y()).y * std::sin(t); }

Vec2 u_shape(const Vec2& p) {
  const double x = p.x(), y1 = p.y() - 1.0;
  return {x * x * y1 * y1 + p.y(), -2.0 / 3.0 * x * y1 * y1 * y1 + g(x)};
}

Mat2 u_jacobian(const Vec2& p) {
  const double x = p.x(), y1 = p.y() - 1.0;
  Mat2 j;
  j << 2.0 * x * y1 * y1, 2.0 * x * x * y1 + 1.0, -2.0 / 3.0 * y1 * y1 * y1 + g1(x), -2.0 * x * y1 * y1;
  return j;
}

Vec2 u_laplacian(const Vec2& p) {
  const double x = p.x(), y1 = p.y() - 1.0;
  return {2.0 * y1 * y1 + 2.0 * x * x, -4.0 * x * y1 + g2(x)};
}

} // namespace

ManufacturedCase example1_case(const ModelParams& params) {
  ManufacturedCase c;
  c.params = params;
  c.p_F = separable(Y_F);
  c.p_f = separable(Y_f);
  c.p_m = separable(Y_m);
  c.p = separable(Y_p);
  c.u_c = {[](const Vec2& x, double t) { return Vec2(u_shape(x) * std::cos(t)); },
           [](const Vec2& x, double t) { return Mat2(u_jacobian(x) * std::cos(t)); }};

  const ModelParams pr = params;
  const auto val = [](ProfileFn Y, const Vec2& x, double t) { return g(x.x()) * Y(x.y()).y * std::cos(t); };
  c.q_F = [pr, val](const Vec2& x, double t) {
    return pr.phi_F * pr.C_F * time_derivative(Y_F, x, t) - pr.k_F / pr.mu_tilde * laplacian(Y_F, x, t) +
           pr.transfer_Ff() * (val(Y_F, x, t) - val(Y_f, x, t));
  };
  c.q_f = [pr, val](const Vec2& x, double t) {
    return pr.phi_f * pr.C_f * time_derivative(Y_f, x, t) - pr.k_f / pr.mu_tilde * laplacian(Y_f, x, t) +
           pr.transfer_Ff() * (val(Y_f, x, t) - val(Y_F, x, t)) + pr.transfer_fm() * (val(Y_f, x, t) - val(Y_m, x, t));
  };
  c.q_m = [pr, val](const Vec2& x, double t) {
    return pr.phi_m * pr.C_m * time_derivative(Y_m, x, t) - pr.k_m / pr.mu_tilde * laplacian(Y_m, x, t) +
           pr.transfer_fm() * (val(Y_m, x, t) - val(Y_f, x, t));
  };
  c.f_c = [pr, grad_p = c.p.grad](const Vec2& x, double t) {
    const double ct = std::cos(t);
    const Vec2 u = u_shape(x) * ct;
    // div u = 0 identically, so only the Laplacian part of the viscous term survives.
    return Vec2(-u_shape(x) * std::sin(t) - pr.nu * u_laplacian(x) * ct + grad_p(x, t) + u_jacobian(x) * ct * u);
  };
  return c;
}

RectDomain example1_domain() { return {{0.0, 0.0, 1.0, 1.0}, {0.0, 1.0, 1.0, 2.0}, 2}; }

ProblemData ManufacturedCase::data() const {
  ProblemData d;
  d.q_F = q_F;
  d.q_f = q_f;
  d.q_m = q_m;
  d.f_c = f_c;
  d.bc_F = d.init_F = p_F.value;
  d.bc_f = d.init_f = p_f.value;
  d.bc_m = d.init_m = p_m.value;
  d.bc_u = d.init_u = u_c.value;
  d.init_p = p.value;
  return d;
}

namespace {

template <class Integrand>
double integrate_cells(const Mesh& mesh, CellList cells, Integrand&& f) {
  const auto& q = quadrature(5);
  double sum = 0.0;
  for (int c : cells) {
    const CellGeometry g = CellGeometry::of(mesh, c);
    double cell = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) cell += q.weights[k] * f(c, g, q.points[k]);
    sum += 2.0 * g.area * cell;
  }
  return sum;
}

double squared_error(const FieldVector& f, const Mesh& mesh, const ScalarExact& ex, double t, NormKind kind,
                     CellList cells) {
  return integrate_cells(mesh, cells, [&](int c, const CellGeometry& g, const Barycentric& b) {
    const Vec2 x = g.point(b);
    if (kind == NormKind::L2) {
      const double e = eval_scalar(f, c, g, b) - ex.value(x, t);
      return e * e;
    }
    return (eval_scalar_grad(f, c, g) - ex.grad(x, t)).squaredNorm();
  });
}

double squared_error(const FieldVector& f, const Mesh& mesh, const VectorExact& ex, double t, NormKind kind,
                     CellList cells) {
  return integrate_cells(mesh, cells, [&](int c, const CellGeometry& g, const Barycentric& b) {
    const Vec2 x = g.point(b);
    const LocalBasis basis = local_basis(g, b);
    if (kind == NormKind::L2) return (eval_vector(f, c, basis) - ex.value(x, t)).squaredNorm();
    return (eval_vector_grad(f, c, basis) - ex.grad(x, t)).squaredNorm();
  });
}

template <class Exact>
double piecewise(const CompositeSolution& s, CompositeSolution::Field field, const Exact& exact, double t,
                 NormKind kind) {
  if (!s.fine || !s.decomposition) throw MissingCorrection("composite solution is empty");
  const bool conduit = field == CompositeSolution::Field::uc || field == CompositeSolution::Field::p;
  const Region region = conduit ? Region::Conduit : Region::Porous;
  double sum = 0.0;
  for (int j = 0; j < static_cast<int>(s.decomposition->subdomains.size()); ++j) {
    const auto& sub = s.decomposition->subdomains[j];
    if (sub.region != region) continue;
    sum += squared_error(s.subdomain_field(field, j), s.fine->mesh(), exact, t, kind, sub.owned_cells);
  }
  return std::sqrt(sum);
}

} // namespace

double compute_norm(const FieldVector& f, const Mesh& mesh, const ScalarExact& exact, double t, NormKind kind,
                    CellList cells) {
  return std::sqrt(squared_error(f, mesh, exact, t, kind, cells.empty() ? CellList(f.dofs->cells()) : cells));
}

double compute_norm(const FieldVector& f, const Mesh& mesh, const VectorExact& exact, double t, NormKind kind,
                    CellList cells) {
  return std::sqrt(squared_error(f, mesh, exact, t, kind, cells.empty() ? CellList(f.dofs->cells()) : cells));
}

double compute_piecewise_norm(const CompositeSolution& s, CompositeSolution::Field field, const ScalarExact& exact,
                              double t, NormKind kind) {
  return piecewise(s, field, exact, t, kind);
}

double compute_piecewise_norm(const CompositeSolution& s, CompositeSolution::Field field, const VectorExact& exact,
                              double t, NormKind kind) {
  return piecewise(s, field, exact, t, kind);
}

double relative_l2_difference(const FieldVector& a, const FieldVector& b, const Mesh& mesh) {
  if (!a.dofs || !b.dofs || a.values.size() != b.values.size() || a.dofs->kind() != b.dofs->kind())
    throw RegionMismatch("fields live on different spaces");
  const SparseMatrix m = assemble_mass(mesh, *b.dofs, 1.0);
  const Vector d = a.values - b.values;
  const double num = std::sqrt(std::max(0.0, d.dot(m * d)));
  const double den = std::sqrt(std::max(0.0, b.values.dot(m * b.values)));
  return den > 0.0 ? num / den : num;
}

double max_relative_difference(const State& a, const State& b, const Mesh& mesh) {
  return std::max({relative_l2_difference(a.p_F, b.p_F, mesh), relative_l2_difference(a.p_f, b.p_f, mesh),
                   relative_l2_difference(a.p_m, b.p_m, mesh), relative_l2_difference(a.u_c, b.u_c, mesh),
                   relative_l2_difference(a.p, b.p, mesh)});
}

double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::optional<double> ErrorTable::rate(std::size_t i, double ErrorRow::*column) const {
  if (i == 0 || i >= rows.size()) return std::nullopt;
  const double a = rows[i - 1].*column, b = rows[i].*column;
  if (!(a > 0.0) || !(b > 0.0) || rows[i - 1].h == rows[i].h) return std::nullopt;
  return convergence_rate(a, b, rows[i - 1].h, rows[i].h);
}

const char* to_string(Algorithm a) { return a == Algorithm::Traditional ? "traditional" : "local-parallel"; }

ErrorRow error_row(const TraditionalRun& run, const ManufacturedCase& mc) {
  const auto& s = run.state;
  const Mesh& m = run.disc->mesh();
  const double t = s.t;
  ErrorRow row;
  row.h = m.h;
  row.uc_h1 = compute_norm(s.u_c, m, mc.u_c, t, NormKind::H1Semi);
  row.pF_h1 = compute_norm(s.p_F, m, mc.p_F, t, NormKind::H1Semi);
  row.pf_l2 = compute_norm(s.p_f, m, mc.p_f, t, NormKind::L2);
  row.pf_h1 = compute_norm(s.p_f, m, mc.p_f, t, NormKind::H1Semi);
  row.pm_l2 = compute_norm(s.p_m, m, mc.p_m, t, NormKind::L2);
  row.pm_h1 = compute_norm(s.p_m, m, mc.p_m, t, NormKind::H1Semi);
  row.cpu_s = run.stats.wall_s;
  return row;
}

ErrorRow error_row(const LocalParallelRun& run, const ManufacturedCase& mc) {
  using F = CompositeSolution::Field;
  const auto& s = run.composite;
  const double t = s.base.t;
  ErrorRow row;
  row.h = run.fine->mesh().h;
  row.H = run.coarse->mesh().h;
  row.uc_h1 = compute_piecewise_norm(s, F::uc, mc.u_c, t, NormKind::H1Semi);
  row.pF_h1 = compute_piecewise_norm(s, F::pF, mc.p_F, t, NormKind::H1Semi);
  row.pf_l2 = compute_piecewise_norm(s, F::pf, mc.p_f, t, NormKind::L2);
  row.pf_h1 = compute_piecewise_norm(s, F::pf, mc.p_f, t, NormKind::H1Semi);
  row.pm_l2 = compute_piecewise_norm(s, F::pm, mc.p_m, t, NormKind::L2);
  row.pm_h1 = compute_piecewise_norm(s, F::pm, mc.p_m, t, NormKind::H1Semi);
  row.cpu_s = run.stats.wall_s;
  return row;
}

ErrorTable convergence_sweep(const std::vector<SweepCase>& cases, Algorithm algorithm, const SweepSettings& settings) {
  ErrorTable table;
  const ManufacturedCase mc = example1_case(settings.params);
  const ProblemData data = mc.data();
  for (const auto& sc : cases) {
    StepConfig cfg = settings.step;
    cfg.dt = sc.dt;
    const int steps = step_count(settings.T, sc.dt);
    ErrorRow row;
    if (algorithm == Algorithm::Traditional) {
      const Mesh mesh = build_rect_mesh(example1_domain(), sc.h);
      row = error_row(run_traditional(mesh, settings.params, cfg, data, steps), mc);
    } else {
      const Mesh coarse = build_rect_mesh(example1_domain(), sc.H);
      const Mesh fine = nested_fine_mesh(coarse, sc.H, sc.h);
      row = error_row(run_local_parallel(coarse, fine, sc.layout, settings.params, cfg, data, steps), mc);
      row.H = sc.H;
    }
    row.h = sc.h;
    row.dt = sc.dt;
    table.rows.push_back(row);
  }
  return table;
}

} // namespace tpns
