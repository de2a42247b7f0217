#include "tpns/twogrid.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "tpns/error.hpp"
#include "tpns/parallel.hpp"

namespace tpns {

namespace {

/// First cell of the region containing each vertex, -1 elsewhere.
std::vector<int> vertex_cell(const Mesh& mesh, Region region) {
  std::vector<int> out(mesh.n_vertices(), -1);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_region[c] != region) continue;
    for (int v : mesh.triangles[c])
      if (out[v] < 0) out[v] = c;
  }
  return out;
}

Barycentric locate(const Mesh& coarse, int cell, const Vec2& x) {
  const CellGeometry g = CellGeometry::of(coarse, cell);
  Barycentric b = g.barycentric(x);
  for (double& v : b) {
    if (v < -1e-9) throw NotNested("fine point lies outside its parent cell");
    v = std::max(v, 0.0);
  }
  return b;
}

using Row = std::map<int, double>;

/// Coefficients of a coarse field's value at x inside coarse cell `cell`, one component.
Row coarse_row(const Mesh& coarse_mesh, const DofMap& coarse, int cell, const Vec2& x, int comp) {
  const Barycentric b = locate(coarse_mesh, cell, x);
  const auto d = coarse.cell_dofs(cell);
  Row r;
  if (coarse.kind() == SpaceKind::MiniVector) {
    for (int k = 0; k < 3; ++k) r[d[4 * comp + k]] += b[k];
    r[d[4 * comp + 3]] += 27.0 * b[0] * b[1] * b[2];
  } else {
    for (int k = 0; k < 3; ++k) r[d[k]] += b[k];
  }
  return r;
}

SparseMatrix build_transfer(const Mesh& coarse_mesh, const DofMap& coarse, const Mesh& fine_mesh, const DofMap& fine) {
  const std::vector<int> vcell = vertex_cell(fine_mesh, fine.region());
  const int ncomp = fine.kind() == SpaceKind::MiniVector ? 2 : 1;
  std::vector<Row> rows(fine.n_dofs());
  for (int lv = 0; lv < fine.n_local_vertices(); ++lv) {
    const int v = fine.mesh_vertex(lv);
    const int parent = fine_mesh.parent[vcell[v]];
    for (int comp = 0; comp < ncomp; ++comp)
      rows[fine.vertex_dof(v, comp)] = coarse_row(coarse_mesh, coarse, parent, fine_mesh.vertices[v], comp);
  }
  if (ncomp == 2) {
    for (int c : fine.cells()) {
      const int parent = fine_mesh.parent[c];
      const auto& tri = fine_mesh.triangles[c];
      for (int comp = 0; comp < 2; ++comp) {
        Row r = coarse_row(coarse_mesh, coarse, parent, fine_mesh.centroid(c), comp);
        for (int v : tri)
          for (const auto& [col, val] : rows[fine.vertex_dof(v, comp)]) r[col] -= val / 3.0;
        rows[fine.bubble_dof(c, comp)] = std::move(r);
      }
    }
  }
  TripletAccumulator acc(fine.n_dofs(), coarse.n_dofs());
  for (int i = 0; i < fine.n_dofs(); ++i)
    for (const auto& [col, val] : rows[i])
      if (val != 0.0) acc.add(i, col, val);
  return acc.finish();
}

} // namespace

Prolongation Prolongation::build(const Discretization& coarse, const Discretization& fine) {
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = fine.mesh();
  if (static_cast<int>(fm.parent.size()) != fm.n_cells()) throw NotNested("fine mesh carries no parent map");
  for (int c = 0; c < fm.n_cells(); ++c) {
    const int p = fm.parent[c];
    if (p < 0 || p >= cm.n_cells() || cm.cell_region[p] != fm.cell_region[c])
      throw NotNested("cell " + std::to_string(c) + " has no parent of its region");
    locate(cm, p, fm.centroid(c));
  }
  return {build_transfer(cm, coarse.porous(), fm, fine.porous()),
          build_transfer(cm, coarse.velocity(), fm, fine.velocity()),
          build_transfer(cm, coarse.pressure(), fm, fine.pressure())};
}

FieldVector prolong(const FieldVector& coarse, const SparseMatrix& p, const DofMap& fine) {
  if (p.cols() != coarse.values.size() || p.rows() != fine.n_dofs())
    throw NotNested("transfer operator does not match the spaces");
  return {&fine, p * coarse.values, coarse.time};
}

CorrectionSet CorrectionSet::zero(const Discretization& fine, const Decomposition& dec) {
  const std::size_t n = dec.subdomains.size();
  CorrectionSet s;
  s.e_F.resize(n);
  s.e_f.resize(n);
  s.e_m.resize(n);
  s.e_c.resize(n);
  s.xi.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (dec.subdomains[j].region == Region::Porous) {
      s.e_F[j] = s.e_f[j] = s.e_m[j] = Vector::Zero(fine.porous().n_dofs());
    } else {
      s.e_c[j] = Vector::Zero(fine.velocity().n_dofs());
      s.xi[j] = Vector::Zero(fine.pressure().n_dofs());
    }
  }
  return s;
}

namespace {

const FieldVector& pick(const State& s, CompositeSolution::Field f) {
  using F = CompositeSolution::Field;
  switch (f) {
  case F::pF: return s.p_F;
  case F::pf: return s.p_f;
  case F::pm: return s.p_m;
  case F::uc: return s.u_c;
  case F::p: return s.p;
  }
  return s.p;
}

const Vector& pick(const CorrectionSet& c, CompositeSolution::Field f, int j) {
  using F = CompositeSolution::Field;
  switch (f) {
  case F::pF: return c.e_F[j];
  case F::pf: return c.e_f[j];
  case F::pm: return c.e_m[j];
  case F::uc: return c.e_c[j];
  case F::p: return c.xi[j];
  }
  return c.xi[j];
}

Region region_of(CompositeSolution::Field f) {
  using F = CompositeSolution::Field;
  return f == F::uc || f == F::p ? Region::Conduit : Region::Porous;
}

} // namespace

FieldVector CompositeSolution::subdomain_field(Field f, int j) const {
  FieldVector out = pick(base, f);
  if (decomposition->subdomains.at(j).region != region_of(f))
    throw RegionMismatch("subdomain " + std::to_string(j) + " carries no such field");
  out.values += pick(corrections, f, j);
  return out;
}

FieldVector CompositeSolution::vertex_field(Field f) const {
  const FieldVector& b = pick(base, f);
  FieldVector out = b;
  std::vector<char> done(b.values.size(), 0);
  for (int c : b.dofs->cells()) {
    const Vector& e = pick(corrections, f, decomposition->owner[c]);
    for (int d : b.dofs->cell_dofs(c)) {
      if (done[d]) continue;
      out.values[d] = b.values[d] + e[d];
      done[d] = 1;
    }
  }
  return out;
}

State CompositeSolution::vertex_state() const {
  State s;
  s.t = base.t;
  s.p_F = vertex_field(Field::pF);
  s.p_f = vertex_field(Field::pf);
  s.p_m = vertex_field(Field::pm);
  s.u_c = vertex_field(Field::uc);
  s.p = vertex_field(Field::p);
  return s;
}

CompositeSolution correct(const State& coarse_np1, const Prolongation& pr, const CorrectionSet& corr,
                          const Discretization& fine, const Decomposition& dec) {
  const std::size_t n = dec.subdomains.size();
  if (corr.e_F.size() != n || corr.e_f.size() != n || corr.e_m.size() != n || corr.e_c.size() != n ||
      corr.xi.size() != n)
    throw MissingCorrection("correction set does not cover every subdomain");
  for (std::size_t j = 0; j < n; ++j) {
    const bool porous = dec.subdomains[j].region == Region::Porous;
    const bool ok = porous ? corr.e_F[j].size() == fine.porous().n_dofs() && corr.e_f[j].size() == fine.porous().n_dofs() &&
                                 corr.e_m[j].size() == fine.porous().n_dofs()
                           : corr.e_c[j].size() == fine.velocity().n_dofs() && corr.xi[j].size() == fine.pressure().n_dofs();
    if (!ok) throw MissingCorrection("subdomain " + std::to_string(j) + " has no correction");
  }
  CompositeSolution out;
  out.fine = &fine;
  out.decomposition = &dec;
  out.base = {coarse_np1.t,
              prolong(coarse_np1.p_F, pr.porous, fine.porous()),
              prolong(coarse_np1.p_f, pr.porous, fine.porous()),
              prolong(coarse_np1.p_m, pr.porous, fine.porous()),
              prolong(coarse_np1.u_c, pr.velocity, fine.velocity()),
              prolong(coarse_np1.p, pr.pressure, fine.pressure())};
  out.corrections = corr;
  return out;
}

// ---------------------------------------------------------------------------

struct LocalParallelStepper::Local {
  Region region = Region::Porous;
  std::vector<int> cells;
  SubsystemMap map;         // porous dofs, or velocity dofs followed by pressure dofs
  std::vector<char> fixed;  // over the local numbering
  std::vector<char> physical; // over the global numbering of the same block(s)

  // porous
  SparseMatrix mass, stiffness, normal_flux;
  std::array<DirichletElimination, 3> elim;
  std::array<LuSolver, 3> lu;

  // conduit
  SparseMatrix vmass, viscous, div, div_t, pressure_load, tangential_load;
  std::vector<int> natural_edges;
  DirichletElimination stokes_elim;
  LuSolver stokes_lu;
  int pin = -1; // local index
  // With the pin, continuity is only imposed modulo constants: the boundary flux defect is spread by these weights.
  Vector pressure_weights, div_colsum;
};

namespace {

/// Local vertices adjacent to a region cell outside the subdomain.
std::vector<char> artificial_vertices(const Mesh& mesh, Region region, const std::vector<char>& in) {
  std::vector<char> inside(mesh.n_vertices(), 0), outside(mesh.n_vertices(), 0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_region[c] != region) continue;
    for (int v : mesh.triangles[c]) (in[c] ? inside : outside)[v] = 1;
  }
  std::vector<char> out(mesh.n_vertices(), 0);
  for (int v = 0; v < mesh.n_vertices(); ++v) out[v] = inside[v] && outside[v];
  return out;
}

} // namespace

LocalParallelStepper::LocalParallelStepper(const Discretization& coarse, const Discretization& fine,
                                           const Decomposition& dec, const StepConfig& cfg, const ProblemData& data)
    : coarse_(coarse), fine_(fine), dec_(dec), cfg_(cfg), data_(data), coarse_stepper_(coarse, cfg, data),
      prolongation_(Prolongation::build(coarse, fine)) {
  const Mesh& mesh = fine.mesh();
  const auto& pr = fine.params();
  if (static_cast<int>(dec.owner.size()) != mesh.n_cells()) throw MissingCorrection("decomposition is for another mesh");
  for (const auto& sub : dec.subdomains) {
    auto loc = std::make_unique<Local>();
    loc->region = sub.region;
    loc->cells = sub.cells;
    std::vector<char> in(mesh.n_cells(), 0);
    for (int c : sub.cells) in[c] = 1;
    const auto artificial = artificial_vertices(mesh, sub.region, in);

    if (sub.region == Region::Porous) {
      const DofMap& d = fine.porous();
      std::vector<char> keep(d.n_dofs(), 0);
      for (int c : sub.cells)
        for (int i : d.cell_dofs(c)) keep[i] = 1;
      loc->map = SubsystemMap::from_mask(keep);
      loc->physical.assign(d.n_dofs(), 0);
      loc->fixed.assign(loc->map.size(), 0);
      for (int li = 0; li < loc->map.size(); ++li) {
        const int gi = loc->map.global_of_local[li];
        loc->physical[gi] = d.is_dirichlet(gi);
        loc->fixed[li] = d.is_dirichlet(gi) || artificial[d.info(gi).vertex];
      }
      loc->mass = assemble_mass(mesh, d, 1.0, sub.cells);
      loc->stiffness = assemble_stiffness(mesh, d, 1.0, sub.cells);
      loc->normal_flux =
          assemble_interface_coupling(mesh, d, fine.velocity(), pr, sub.interface_edges).normal_flux;
      const auto ex = assemble_exchange(mesh, d, pr, sub.cells);
      const std::array<SparseMatrix, 3> systems{
          SparseMatrix((pr.phi_F * pr.C_F / cfg.dt) * loc->mass + (pr.k_F / pr.mu_tilde) * loc->stiffness + ex.F_f.self),
          SparseMatrix((pr.phi_f * pr.C_f / cfg.dt) * loc->mass + (pr.k_f / pr.mu_tilde) * loc->stiffness +
                       ex.f_F.self + ex.f_m.self),
          SparseMatrix((pr.phi_m * pr.C_m / cfg.dt) * loc->mass + (pr.k_m / pr.mu_tilde) * loc->stiffness + ex.m_f.self)};
      for (int i = 0; i < 3; ++i) {
        loc->elim[i] = DirichletElimination(loc->map.restrict_matrix(systems[i]), loc->fixed);
        loc->lu[i].factor(loc->elim[i].matrix());
      }
    } else {
      const DofMap& v = fine.velocity();
      const DofMap& p = fine.pressure();
      const int nu = v.n_dofs();
      std::vector<char> keep(nu + p.n_dofs(), 0);
      for (int c : sub.cells) {
        for (int i : v.cell_dofs(c)) keep[i] = 1;
        for (int i : p.cell_dofs(c)) keep[nu + i] = 1;
      }
      loc->map = SubsystemMap::from_mask(keep);
      loc->physical.assign(nu + p.n_dofs(), 0);
      loc->fixed.assign(loc->map.size(), 0);
      for (int li = 0; li < loc->map.size(); ++li) {
        const int gi = loc->map.global_of_local[li];
        if (gi >= nu) continue;
        loc->physical[gi] = v.is_dirichlet(gi);
        const int vert = v.info(gi).vertex;
        loc->fixed[li] = v.is_dirichlet(gi) || (vert >= 0 && artificial[vert]);
      }
      loc->natural_edges = edges_touching(mesh, fine.natural_edges(), Region::Conduit, in);
      if (loc->natural_edges.empty()) {
        if (!cfg.pressure_pin) throw SingularPressureBlock("conduit subdomain " + std::to_string(locals_.size()));
        for (int li = 0; li < loc->map.size(); ++li)
          if (loc->map.global_of_local[li] >= nu) {
            loc->pin = li;
            loc->fixed[li] = 1;
            break;
          }
      }
      loc->vmass = assemble_mass(mesh, v, pr.eta, sub.cells);
      loc->div = assemble_divergence(mesh, v, p, pr.eta, sub.cells);
      if (loc->pin >= 0) {
        const Vector w = assemble_mass(mesh, p, 1.0, sub.cells) * Vector::Ones(p.n_dofs());
        loc->pressure_weights = w / w.sum();
        loc->div_colsum = loc->div.transpose() * Vector::Ones(p.n_dofs());
      }
      loc->viscous = assemble_conduit_viscous(mesh, v, pr, sub.cells, sub.interface_edges);
      loc->div_t = loc->div.transpose();
      const auto coupling = assemble_interface_coupling(mesh, fine.porous(), v, pr, sub.interface_edges);
      loc->pressure_load = coupling.pressure_load;
      loc->tangential_load = coupling.tangential_load;
      if (!cfg.convection) {
        const SparseMatrix a = (1.0 / cfg.dt) * loc->vmass + loc->viscous;
        const SparseMatrix zero(p.n_dofs(), p.n_dofs());
        loc->stokes_elim = DirichletElimination(loc->map.restrict_matrix(block2x2(a, loc->div_t, loc->div, zero)), loc->fixed);
        loc->stokes_lu.factor(loc->stokes_elim.matrix());
      }
    }
    locals_.push_back(std::move(loc));
  }
}

LocalParallelStepper::~LocalParallelStepper() = default;
LocalParallelStepper::LocalParallelStepper(LocalParallelStepper&&) noexcept = default;

State LocalParallelStepper::coarse_march(const State& coarse_n, PicardReport* report) const {
  return coarse_stepper_.advance(coarse_n, report);
}

void LocalParallelStepper::local_correction(int j, const State& cn, const State& cn1, const CorrectionSet& corr_n,
                                            CorrectionSet& out) const {
  const Local& loc = *locals_.at(j);
  const Mesh& mesh = fine_.mesh();
  const auto& pr = fine_.params();
  const double dt = cfg_.dt;
  const double t1 = cn1.t;
  const auto& P = prolongation_;

  if (loc.region == Region::Porous) {
    const DofMap& d = fine_.porous();
    const Vector F0 = P.porous * cn.p_F.values, F1 = P.porous * cn1.p_F.values;
    const Vector f0 = P.porous * cn.p_f.values, f1 = P.porous * cn1.p_f.values;
    const Vector m0 = P.porous * cn.p_m.values, m1 = P.porous * cn1.p_m.values;
    const Vector U0 = P.velocity * cn.u_c.values;
    const auto& M = loc.mass;
    const auto& K = loc.stiffness;
    const double sFf = pr.transfer_Ff(), sfm = pr.transfer_fm();
    const double cF = pr.phi_F * pr.C_F / dt, cf = pr.phi_f * pr.C_f / dt, cm = pr.phi_m * pr.C_m / dt;
    const Vector& eF = corr_n.e_F[j];
    const Vector& ef = corr_n.e_f[j];
    const Vector& em = corr_n.e_m[j];

    std::array<Vector, 3> rhs;
    rhs[0] = assemble_load(mesh, d, data_.q_F, t1, loc.cells) -
             (cF * (M * (F1 - F0)) + (pr.k_F / pr.mu_tilde) * (K * F1) + sFf * (M * (F1 - f0))) -
             loc.normal_flux * U0 + cF * (M * eF) + sFf * (M * ef);
    rhs[1] = assemble_load(mesh, d, data_.q_f, t1, loc.cells) -
             (cf * (M * (f1 - f0)) + (pr.k_f / pr.mu_tilde) * (K * f1) + sfm * (M * (f1 - m0)) +
              sFf * (M * (f1 - F0))) +
             cf * (M * ef) + sfm * (M * em) + sFf * (M * eF);
    rhs[2] = assemble_load(mesh, d, data_.q_m, t1, loc.cells) -
             (cm * (M * (m1 - m0)) + (pr.k_m / pr.mu_tilde) * (K * m1) + sfm * (M * (m1 - f0))) + cm * (M * em) +
             sfm * (M * ef);
    const std::array<const ScalarFunction*, 3> bcs{&data_.bc_F, &data_.bc_f, &data_.bc_m};
    const std::array<const Vector*, 3> base{&F1, &f1, &m1};
    std::array<Vector*, 3> dest{&out.e_F[j], &out.e_f[j], &out.e_m[j]};
    for (int i = 0; i < 3; ++i) {
      Vector g = Vector::Zero(loc.map.size());
      for (int li = 0; li < loc.map.size(); ++li) {
        const int gi = loc.map.global_of_local[li];
        if (!loc.physical[gi]) continue;
        const double bc = *bcs[i] ? (*bcs[i])(mesh.vertices[d.info(gi).vertex], t1) : 0.0;
        g[li] = bc - (*base[i])[gi];
      }
      try {
        *dest[i] = loc.map.expand(loc.lu[i].solve(loc.elim[i].rhs(loc.map.restrict_vector(rhs[i]), g)), d.n_dofs());
      } catch (const SingularMatrix& e) {
        throw SolverFailure("porous correction " + std::to_string(j) + ": " + e.what());
      }
    }
    return;
  }

  const DofMap& v = fine_.velocity();
  const DofMap& p = fine_.pressure();
  const int nu = v.n_dofs();
  const int np = p.n_dofs();
  const Vector U0 = P.velocity * cn.u_c.values;
  const FieldVector U1{&v, P.velocity * cn1.u_c.values, t1};
  const Vector p1 = P.pressure * cn1.p.values;
  const Vector F0 = P.porous * cn.p_F.values;
  const Vector& ec = corr_n.e_c[j];

  SparseMatrix a = (1.0 / dt) * loc.vmass + loc.viscous;
  Vector ru = assemble_load(mesh, v, data_.f_c, t1, pr.eta, loc.cells) -
              ((1.0 / dt) * (loc.vmass * (U1.values - U0)) + loc.viscous * U1.values + loc.div_t * p1) -
              loc.pressure_load * F0 - loc.tangential_load * F0 + (1.0 / dt) * (loc.vmass * ec);
  if (cfg_.convection) {
    const SparseMatrix n = convection_operator(fine_, U1, cfg_, loc.cells, loc.natural_edges);
    ru -= n * U1.values;
    SparseMatrix r = assemble_convection_reaction(mesh, v, U1, pr.eta, cfg_.skew, loc.cells);
    if (cfg_.skew) r += assemble_convection_reaction_boundary(mesh, v, U1, pr.eta, loc.natural_edges);
    a += n + r;
  }
  Vector rhs(nu + np);
  rhs.head(nu) = ru;
  rhs.tail(np) = -(loc.div * U1.values);

  Vector g = Vector::Zero(loc.map.size());
  double boundary_flux = 0.0;
  for (int li = 0; li < loc.map.size(); ++li) {
    const int gi = loc.map.global_of_local[li];
    if (!loc.physical[gi]) continue;
    const auto info = v.info(gi);
    const double bc = data_.bc_u ? data_.bc_u(mesh.vertices[info.vertex], t1)[info.comp] : 0.0;
    g[li] = bc - U1.values[gi];
    if (loc.pin >= 0) boundary_flux += loc.div_colsum[gi] * g[li];
  }
  if (loc.pin >= 0) {
    // Summed continuity rows only see the fixed boundary values; remove the incompatible part.
    const double defect = rhs.tail(np).sum() - boundary_flux;
    rhs.tail(np) -= defect * loc.pressure_weights;
  }
  Vector x;
  try {
    const Vector b = loc.map.restrict_vector(rhs);
    if (!cfg_.convection) {
      x = loc.stokes_lu.solve(loc.stokes_elim.rhs(b, g));
    } else {
      const SparseMatrix zero(np, np);
      const DirichletElimination elim(loc.map.restrict_matrix(block2x2(a, loc.div_t, loc.div, zero)), loc.fixed);
      LuSolver lu;
      lu.factor(elim.matrix());
      x = lu.solve(elim.rhs(b, g));
    }
  } catch (const SingularMatrix& e) {
    throw SolverFailure("conduit correction " + std::to_string(j) + ": " + e.what());
  }
  const Vector full = loc.map.expand(x, nu + np);
  out.e_c[j] = full.head(nu);
  out.xi[j] = full.tail(np);
}

LocalParallelStepper::Result LocalParallelStepper::advance(const State& coarse_n, const CorrectionSet& corr_n) const {
  Result r;
  r.coarse = coarse_march(coarse_n, &r.picard);
  r.corrections = CorrectionSet::zero(fine_, dec_);
  parallel_for(static_cast<int>(locals_.size()), cfg_.workers,
               [&](int j) { local_correction(j, coarse_n, r.coarse, corr_n, r.corrections); });
  r.composite = correct(r.coarse, prolongation_, r.corrections, fine_, dec_);
  return r;
}

LocalParallelStepper::Result advance_local_parallel(const State& coarse_n, const CorrectionSet& corr_n,
                                                    const LocalParallelStepper& stepper) {
  return stepper.advance(coarse_n, corr_n);
}

} // namespace tpns
