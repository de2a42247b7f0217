#include "tpns/stepping.hpp"

#include <array>

#include "tpns/error.hpp"
#include "tpns/parallel.hpp"

namespace tpns {

namespace {

FieldVector interpolate_or_zero(const Discretization& disc, const DofMap& dofs, const ScalarFunction& f, double t) {
  return f ? interpolate(disc.mesh(), dofs, f, t) : FieldVector::zero(dofs, t);
}

std::vector<char> dirichlet_mask(const DofMap& d, int extra = 0) {
  std::vector<char> mask(d.n_dofs() + extra, 0);
  for (int i : d.dirichlet_set()) mask[i] = 1;
  return mask;
}

} // namespace

State State::zero(const Discretization& disc, double t) {
  return {t,
          FieldVector::zero(disc.porous(), t),
          FieldVector::zero(disc.porous(), t),
          FieldVector::zero(disc.porous(), t),
          FieldVector::zero(disc.velocity(), t),
          FieldVector::zero(disc.pressure(), t)};
}

State State::initial(const Discretization& disc, const ProblemData& data, double t0) {
  State s;
  s.t = t0;
  s.p_F = interpolate_or_zero(disc, disc.porous(), data.init_F, t0);
  s.p_f = interpolate_or_zero(disc, disc.porous(), data.init_f, t0);
  s.p_m = interpolate_or_zero(disc, disc.porous(), data.init_m, t0);
  s.u_c = data.init_u ? interpolate(disc.mesh(), disc.velocity(), data.init_u, t0) : FieldVector::zero(disc.velocity(), t0);
  s.p = interpolate_or_zero(disc, disc.pressure(), data.init_p, t0);
  return s;
}

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw InvariantViolation("dt must be positive");
  if (!(picard_tol > 0.0 && picard_tol < 1.0)) throw InvariantViolation("picard_tol must lie in (0,1)");
  if (picard_max < 1) throw InvariantViolation("picard_max must be at least 1");
  if (workers < 1) throw InvariantViolation("workers must be at least 1");
}

SparseMatrix convection_operator(const Discretization& disc, const FieldVector& wind, const StepConfig& cfg,
                                 CellList cells, EdgeList natural_edges) {
  const double eta = disc.params().eta;
  SparseMatrix n = assemble_convection(disc.mesh(), disc.velocity(), wind, eta, cfg.skew, cells);
  if (cfg.skew) n += assemble_convection_boundary(disc.mesh(), disc.velocity(), wind, eta, natural_edges);
  return n;
}

struct TraditionalStepper::Cache {
  std::array<DirichletElimination, 3> porous_elim;
  std::array<LuSolver, 3> porous_lu;
  ExchangeMatrices exchange;
  SparseMatrix conduit_base; // eta/dt M + viscous
  SparseMatrix divergence_t;
  std::vector<char> conduit_mask;
  int pin = -1;
  // Stokes mode: the saddle matrix never changes.
  DirichletElimination stokes_elim;
  LuSolver stokes_lu;
};

TraditionalStepper::TraditionalStepper(const Discretization& disc, const StepConfig& cfg, const ProblemData& data)
    : disc_(disc), cfg_(cfg), data_(data), cache_(std::make_unique<Cache>()) {
  cfg_.validate();
  const auto& pr = disc.params();
  const auto& m = disc.porous_mass();
  const auto& k = disc.porous_stiffness();
  cache_->exchange = assemble_exchange(disc.mesh(), disc.porous(), pr);
  const auto& ex = cache_->exchange;
  const std::array<SparseMatrix, 3> systems{
      SparseMatrix((pr.phi_F * pr.C_F / cfg_.dt) * m + (pr.k_F / pr.mu_tilde) * k + ex.F_f.self),
      SparseMatrix((pr.phi_f * pr.C_f / cfg_.dt) * m + (pr.k_f / pr.mu_tilde) * k + ex.f_F.self + ex.f_m.self),
      SparseMatrix((pr.phi_m * pr.C_m / cfg_.dt) * m + (pr.k_m / pr.mu_tilde) * k + ex.m_f.self)};
  const auto mask = dirichlet_mask(disc.porous());
  for (int i = 0; i < 3; ++i) {
    cache_->porous_elim[i] = DirichletElimination(systems[i], mask);
    cache_->porous_lu[i].factor(cache_->porous_elim[i].matrix());
  }

  cache_->conduit_base = (1.0 / cfg_.dt) * disc.velocity_mass() + disc.viscous();
  cache_->divergence_t = disc.divergence().transpose();
  const int nu = disc.velocity().n_dofs();
  cache_->conduit_mask = dirichlet_mask(disc.velocity(), disc.pressure().n_dofs());
  if (disc.natural_edges().empty() && disc.pressure().n_dofs() > 0) {
    if (!cfg_.pressure_pin) throw SingularPressureBlock("conduit velocity is prescribed on the whole boundary");
    cache_->pin = nu;
    cache_->conduit_mask[nu] = 1;
  }
  if (!cfg_.convection) {
    const SparseMatrix zero(disc.pressure().n_dofs(), disc.pressure().n_dofs());
    cache_->stokes_elim = DirichletElimination(
        block2x2(cache_->conduit_base, cache_->divergence_t, disc.divergence(), zero), cache_->conduit_mask);
    cache_->stokes_lu.factor(cache_->stokes_elim.matrix());
  }
}

TraditionalStepper::~TraditionalStepper() = default;
TraditionalStepper::TraditionalStepper(TraditionalStepper&&) noexcept = default;

TraditionalStepper::PorousResult TraditionalStepper::step_porous(const State& s) const {
  const auto& pr = disc_.params();
  const auto& mesh = disc_.mesh();
  const auto& dofs = disc_.porous();
  const auto& m = disc_.porous_mass();
  const auto& ex = cache_->exchange;
  const double t1 = s.t + cfg_.dt;

  const std::array<const ScalarFunction*, 3> sources{&data_.q_F, &data_.q_f, &data_.q_m};
  const std::array<const ScalarFunction*, 3> bcs{&data_.bc_F, &data_.bc_f, &data_.bc_m};
  std::array<FieldVector, 3> out{FieldVector::zero(dofs, t1), FieldVector::zero(dofs, t1), FieldVector::zero(dofs, t1)};
  parallel_for(3, cfg_.workers, [&](int i) {
    Vector b = assemble_load(mesh, dofs, *sources[i], t1);
    if (i == 0) {
      b += (pr.phi_F * pr.C_F / cfg_.dt) * (m * s.p_F.values) - ex.F_f.other * s.p_f.values;
      b -= disc_.coupling().normal_flux * s.u_c.values;
    } else if (i == 1) {
      b += (pr.phi_f * pr.C_f / cfg_.dt) * (m * s.p_f.values) - ex.f_F.other * s.p_F.values -
           ex.f_m.other * s.p_m.values;
    } else {
      b += (pr.phi_m * pr.C_m / cfg_.dt) * (m * s.p_m.values) - ex.m_f.other * s.p_f.values;
    }
    const Vector g = *bcs[i] ? dirichlet_values(mesh, dofs, *bcs[i], t1) : Vector::Zero(dofs.n_dofs());
    try {
      out[i].values = cache_->porous_lu[i].solve(cache_->porous_elim[i].rhs(b, g));
    } catch (const SingularMatrix& e) {
      throw SolverFailure(std::string("porous step: ") + e.what());
    }
  });
  return {std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

TraditionalStepper::ConduitResult TraditionalStepper::step_conduit(const State& s, const FieldVector* lagged_pF) const {
  const auto& pr = disc_.params();
  const auto& mesh = disc_.mesh();
  const auto& vel = disc_.velocity();
  const int nu = vel.n_dofs();
  const int np = disc_.pressure().n_dofs();
  const double t1 = s.t + cfg_.dt;
  const Vector& pF = lagged_pF ? lagged_pF->values : s.p_F.values;

  Vector b = Vector::Zero(nu + np);
  b.head(nu) = assemble_load(mesh, vel, data_.f_c, t1, pr.eta) + (1.0 / cfg_.dt) * (disc_.velocity_mass() * s.u_c.values) -
               disc_.coupling().pressure_load * pF - disc_.coupling().tangential_load * pF;
  Vector g = Vector::Zero(nu + np);
  if (data_.bc_u) g.head(nu) = dirichlet_values(mesh, vel, data_.bc_u, t1);

  ConduitResult out{FieldVector::zero(vel, t1), FieldVector::zero(disc_.pressure(), t1), {}};
  const auto unpack = [&](const Vector& x) {
    out.u_c.values = x.head(nu);
    out.p.values = x.tail(np);
  };
  try {
    if (!cfg_.convection) {
      unpack(cache_->stokes_lu.solve(cache_->stokes_elim.rhs(b, g)));
      out.picard = {1, true, 0.0};
      return out;
    }
    const SparseMatrix zero(np, np);
    FieldVector wind = s.u_c;
    for (int k = 1; k <= cfg_.picard_max; ++k) {
      const SparseMatrix a =
          cache_->conduit_base + convection_operator(disc_, wind, cfg_, vel.cells(), disc_.natural_edges());
      const DirichletElimination elim(block2x2(a, cache_->divergence_t, disc_.divergence(), zero), cache_->conduit_mask);
      LuSolver lu;
      lu.factor(elim.matrix());
      unpack(lu.solve(elim.rhs(b, g)));
      const double diff = (out.u_c.values - wind.values).norm();
      const double scale = out.u_c.values.norm();
      const double change = scale > 0.0 ? diff / scale : diff;
      out.picard = {k, change < cfg_.picard_tol, change};
      if (out.picard.converged) break;
      wind.values = out.u_c.values;
    }
  } catch (const SingularMatrix& e) {
    throw SolverFailure(std::string("conduit step: ") + e.what());
  }
  return out;
}

State TraditionalStepper::advance(const State& s, PicardReport* report) const {
  PorousResult porous;
  ConduitResult conduit;
  // Both halves read only state_n.
  parallel_for(2, cfg_.workers, [&](int i) {
    if (i == 0)
      porous = step_porous(s);
    else
      conduit = step_conduit(s);
  });
  if (report) *report = conduit.picard;
  return {s.t + cfg_.dt, std::move(porous.p_F), std::move(porous.p_f), std::move(porous.p_m), std::move(conduit.u_c),
          std::move(conduit.p)};
}

State advance_traditional(const State& state_n, const TraditionalStepper& stepper, PicardReport* report) {
  return stepper.advance(state_n, report);
}

} // namespace tpns
