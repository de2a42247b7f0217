#include "tpns/assembly.hpp"

#include <Eigen/Dense>

#include "tpns/error.hpp"

namespace tpns {

void ModelParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"phi_F", phi_F}, {"phi_f", phi_f}, {"phi_m", phi_m}, {"C_F", C_F},     {"C_f", C_f},
      {"C_m", C_m},     {"k_F", k_F},     {"k_f", k_f},     {"k_m", k_m},     {"sigma", sigma},
      {"sigma_star", sigma_star},         {"mu_tilde", mu_tilde},             {"nu", nu},
      {"rho", rho},     {"alpha", alpha}, {"eta", eta}};
  for (const auto& [name, v] : fields)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvariantViolation(std::string(name) + " must be positive");
}

namespace {

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

void scatter(TripletAccumulator& acc, std::span<const int> rows, std::span<const int> cols, const LocalMatrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) acc.add(rows[i], cols[j], m(i, j));
}

bool is_vector(const DofMap& d) { return d.kind() == SpaceKind::MiniVector; }

/// Loops over quadrature points of each cell and lets `body` add to the local matrix.
/// Test index is the row, trial index the column.
template <class Body>
SparseMatrix volume_form(const Mesh& mesh, const DofMap& rows, const DofMap& cols, CellList cells, Body&& body) {
  TripletAccumulator acc(rows.n_dofs(), cols.n_dofs());
  acc.reserve(cells.size() * rows.dofs_per_cell() * cols.dofs_per_cell());
  const auto& q = quadrature(5);
  LocalMatrix local(rows.dofs_per_cell(), cols.dofs_per_cell());
  for (int c : cells) {
    const auto rd = rows.cell_dofs(c);
    const auto cd = cols.cell_dofs(c);
    const CellGeometry g = CellGeometry::of(mesh, c);
    local.setZero();
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const LocalBasis basis = local_basis(g, q.points[k]);
      body(c, g, basis, 2.0 * g.area * q.weights[k], local);
    }
    scatter(acc, rd, cd, local);
  }
  return acc.finish();
}

int n_scalar(const DofMap& d) { return is_vector(d) ? 4 : 3; }

} // namespace

EdgeFrame edge_frame(const Mesh& mesh, const TaggedEdge& e) {
  EdgeFrame f;
  f.a = mesh.vertices[e.v[0]];
  f.b = mesh.vertices[e.v[1]];
  const Vec2 d = f.b - f.a;
  f.length = d.norm();
  f.tangent = d / f.length;
  f.normal = Vec2(f.tangent.y(), -f.tangent.x());
  const int cell = e.conduit_cell >= 0 ? e.conduit_cell : e.porous_cell;
  if (cell >= 0 && f.normal.dot(mesh.centroid(cell) - f.a) > 0.0) f.normal = -f.normal;
  return f;
}

std::vector<int> edges_with_tag(const Mesh& mesh, EdgeTag tag) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(mesh.edges.size()); ++i)
    if (mesh.edges[i].tag == tag) out.push_back(i);
  return out;
}

std::vector<int> conduit_natural_edges(const Mesh& mesh) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(mesh.edges.size()); ++i)
    if (mesh.edges[i].tag == EdgeTag::Interface || mesh.edges[i].tag == EdgeTag::Outlet) out.push_back(i);
  return out;
}

std::vector<int> edges_touching(const Mesh& mesh, std::span<const int> edges, Region region,
                                const std::vector<char>& cell_mask) {
  std::vector<int> out;
  for (int i : edges) {
    const auto& e = mesh.edges[i];
    const int c = region == Region::Porous ? e.porous_cell : e.conduit_cell;
    if (c >= 0 && cell_mask[c]) out.push_back(i);
  }
  return out;
}

SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coef) {
  return assemble_mass(mesh, dofs, coef, dofs.cells());
}

SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coef, CellList cells) {
  const int ns = n_scalar(dofs);
  const int ncomp = is_vector(dofs) ? 2 : 1;
  return volume_form(mesh, dofs, dofs, cells, [&](int, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    for (int comp = 0; comp < ncomp; ++comp)
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) m(comp * ns + i, comp * ns + j) += coef * w * b.value[i] * b.value[j];
  });
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs, double coef) {
  return assemble_stiffness(mesh, dofs, coef, dofs.cells());
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs, double coef, CellList cells) {
  const int ns = n_scalar(dofs);
  const int ncomp = is_vector(dofs) ? 2 : 1;
  return volume_form(mesh, dofs, dofs, cells, [&](int, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    for (int comp = 0; comp < ncomp; ++comp)
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) m(comp * ns + i, comp * ns + j) += coef * w * b.grad[i].dot(b.grad[j]);
  });
}

ExchangeMatrices assemble_exchange(const Mesh& mesh, const DofMap& porous, const ModelParams& params) {
  return assemble_exchange(mesh, porous, params, porous.cells());
}

ExchangeMatrices assemble_exchange(const Mesh& mesh, const DofMap& porous, const ModelParams& params,
                                   CellList cells) {
  const SparseMatrix mass = assemble_mass(mesh, porous, 1.0, cells);
  const auto term = [&mass](double c) { return ExchangeTerm{c * mass, -c * mass}; };
  return {term(params.transfer_Ff()), term(params.transfer_Ff()), term(params.transfer_fm()),
          term(params.transfer_fm())};
}

SparseMatrix assemble_deformation(const Mesh& mesh, const DofMap& velocity, double coef, CellList cells) {
  const double half = 0.5 * coef; // coef = 2 nu eta
  return volume_form(mesh, velocity, velocity, cells, [&](int, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    for (int n = 0; n < 2; ++n)
      for (int mm = 0; mm < 2; ++mm)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            double v = b.grad[j][n] * b.grad[i][mm];
            if (n == mm) v += b.grad[j].dot(b.grad[i]);
            m(4 * n + i, 4 * mm + j) += half * w * v;
          }
  });
}

SparseMatrix assemble_tangential_friction(const Mesh& mesh, const DofMap& velocity, double coef, EdgeList edges) {
  TripletAccumulator acc(velocity.n_dofs(), velocity.n_dofs());
  for (int ei : edges) {
    const auto& e = mesh.edges[ei];
    const EdgeFrame f = edge_frame(mesh, e);
    // int phi_i phi_j ds on a straight edge: L/3 on the diagonal, L/6 off it.
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double mij = f.length * (i == j ? 1.0 / 3.0 : 1.0 / 6.0);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double v = coef * f.tangent[k] * f.tangent[l] * mij;
            if (v != 0.0) acc.add(velocity.vertex_dof(e.v[i], k), velocity.vertex_dof(e.v[j], l), v);
          }
      }
  }
  return acc.finish();
}

SparseMatrix assemble_conduit_viscous(const Mesh& mesh, const DofMap& velocity, const ModelParams& params) {
  const auto iface = edges_with_tag(mesh, EdgeTag::Interface);
  if (iface.empty() && !mesh.cells_in(Region::Porous).empty())
    throw MissingInterfaceTags("two-region mesh has no interface edges");
  return assemble_conduit_viscous(mesh, velocity, params, velocity.cells(), iface);
}

SparseMatrix assemble_conduit_viscous(const Mesh& mesh, const DofMap& velocity, const ModelParams& params,
                                      CellList cells, EdgeList interface_edges) {
  SparseMatrix a = assemble_deformation(mesh, velocity, 2.0 * params.nu * params.eta, cells);
  a += assemble_tangential_friction(mesh, velocity, params.bj_friction(), interface_edges);
  return a;
}

InterfaceMatrices assemble_interface_coupling(const Mesh& mesh, const DofMap& porous, const DofMap& velocity,
                                              const ModelParams& params) {
  return assemble_interface_coupling(mesh, porous, velocity, params, edges_with_tag(mesh, EdgeTag::Interface));
}

InterfaceMatrices assemble_interface_coupling(const Mesh& mesh, const DofMap& porous, const DofMap& velocity,
                                              const ModelParams& params, EdgeList edges) {
  TripletAccumulator b1(velocity.n_dofs(), porous.n_dofs());
  TripletAccumulator b2(porous.n_dofs(), velocity.n_dofs());
  TripletAccumulator b3(velocity.n_dofs(), porous.n_dofs());
  const double c1 = params.eta / params.rho;
  const double c3 = params.bj_tangential();
  for (int ei : edges) {
    const auto& e = mesh.edges[ei];
    if (e.porous_cell < 0 || e.conduit_cell < 0)
      throw NonMatchingInterface("interface edge " + std::to_string(ei) + " lacks a cell on one side");
    for (int v : e.v)
      if (porous.vertex_dof(v) < 0 || velocity.vertex_dof(v, 0) < 0)
        throw NonMatchingInterface("interface vertex " + std::to_string(v) + " missing from a space");
    const EdgeFrame f = edge_frame(mesh, e);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double mij = f.length * (i == j ? 1.0 / 3.0 : 1.0 / 6.0);
        const int pi = porous.vertex_dof(e.v[i]);
        const int pj = porous.vertex_dof(e.v[j]);
        for (int k = 0; k < 2; ++k) {
          const int ui = velocity.vertex_dof(e.v[i], k);
          const int uj = velocity.vertex_dof(e.v[j], k);
          if (f.normal[k] != 0.0) {
            b1.add(ui, pj, c1 * f.normal[k] * mij);
            b2.add(pi, uj, -f.normal[k] * mij);
          }
          // d_tau p_F is (p_b - p_a)/L on the edge; int phi_i ds = L/2.
          if (f.tangent[k] != 0.0 && i == 0) {
            const double sign = j == 0 ? -1.0 : 1.0;
            for (int ii = 0; ii < 2; ++ii)
              b3.add(velocity.vertex_dof(e.v[ii], k), pj, c3 * f.tangent[k] * sign * 0.5);
          }
        }
      }
    }
  }
  return {b1.finish(), b2.finish(), b3.finish()};
}

SparseMatrix assemble_divergence(const Mesh& mesh, const DofMap& velocity, const DofMap& pressure, double eta) {
  return assemble_divergence(mesh, velocity, pressure, eta, velocity.cells());
}

SparseMatrix assemble_divergence(const Mesh& mesh, const DofMap& velocity, const DofMap& pressure, double eta,
                                 CellList cells) {
  return volume_form(mesh, pressure, velocity, cells, [&](int, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    for (int i = 0; i < 3; ++i)
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j < 4; ++j) m(i, 4 * comp + j) -= eta * w * b.value[i] * b.grad[j][comp];
  });
}

SparseMatrix assemble_convection(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind, double eta,
                                 bool skew) {
  return assemble_convection(mesh, velocity, wind, eta, skew, velocity.cells());
}

SparseMatrix assemble_convection(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind, double eta,
                                 bool skew, CellList cells) {
  return volume_form(mesh, velocity, velocity, cells, [&](int c, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    const Vec2 wv = eval_vector(wind, c, b);
    std::array<double, 4> adv;
    for (int s = 0; s < 4; ++s) adv[s] = wv.dot(b.grad[s]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double v = skew ? 0.5 * (adv[j] * b.value[i] - adv[i] * b.value[j]) : adv[j] * b.value[i];
        m(i, j) += eta * w * v;
        m(4 + i, 4 + j) += eta * w * v;
      }
  });
}

namespace {

/// Vertex values of a MINI field along an edge (bubbles vanish there).
std::array<Vec2, 2> edge_values(const FieldVector& f, const TaggedEdge& e) {
  std::array<Vec2, 2> out;
  for (int i = 0; i < 2; ++i)
    out[i] = Vec2(f.values[f.dofs->vertex_dof(e.v[i], 0)], f.values[f.dofs->vertex_dof(e.v[i], 1)]);
  return out;
}

template <class Body>
SparseMatrix edge_form(const Mesh& mesh, const DofMap& velocity, EdgeList edges, Body&& body) {
  TripletAccumulator acc(velocity.n_dofs(), velocity.n_dofs());
  const auto& rule = gauss2();
  for (int ei : edges) {
    const auto& e = mesh.edges[ei];
    const EdgeFrame f = edge_frame(mesh, e);
    for (int q = 0; q < 2; ++q) {
      const double s = rule.points[q];
      const std::array<double, 2> phi{1.0 - s, s};
      body(e, f, s, phi, f.length * rule.weights[q], acc);
    }
  }
  return acc.finish();
}

} // namespace

SparseMatrix assemble_convection_boundary(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind,
                                          double eta, EdgeList edges) {
  return edge_form(mesh, velocity, edges, [&](const TaggedEdge& e, const EdgeFrame& f, double s,
                                              const std::array<double, 2>& phi, double w, TripletAccumulator& acc) {
    const auto wv = edge_values(wind, e);
    const double wn = ((1.0 - s) * wv[0] + s * wv[1]).dot(f.normal);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          acc.add(velocity.vertex_dof(e.v[i], k), velocity.vertex_dof(e.v[j], k), 0.5 * eta * w * wn * phi[i] * phi[j]);
  });
}

SparseMatrix assemble_convection_reaction(const Mesh& mesh, const DofMap& velocity, const FieldVector& base,
                                          double eta, bool skew, CellList cells) {
  return volume_form(mesh, velocity, velocity, cells, [&](int c, const CellGeometry&, const LocalBasis& b, double w, LocalMatrix& m) {
    const Vec2 bv = eval_vector(base, c, b);
    const Mat2 bg = eval_vector_grad(base, c, b);
    for (int n = 0; n < 2; ++n) // test component
      for (int mm = 0; mm < 2; ++mm) // trial component
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            // trial a e_m, test b e_n: a d_m base_n b, skew part subtracts a d_m b base_n
            double v = b.value[j] * bg(n, mm) * b.value[i];
            if (skew) v = 0.5 * (v - b.value[j] * b.grad[i][mm] * bv[n]);
            m(4 * n + i, 4 * mm + j) += eta * w * v;
          }
  });
}

SparseMatrix assemble_convection_reaction_boundary(const Mesh& mesh, const DofMap& velocity,
                                                   const FieldVector& base, double eta, EdgeList edges) {
  return edge_form(mesh, velocity, edges, [&](const TaggedEdge& e, const EdgeFrame& f, double s,
                                              const std::array<double, 2>& phi, double w, TripletAccumulator& acc) {
    const auto bv = edge_values(base, e);
    const Vec2 bq = (1.0 - s) * bv[0] + s * bv[1];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int n = 0; n < 2; ++n)
          for (int mm = 0; mm < 2; ++mm) {
            const double v = 0.5 * eta * w * phi[j] * f.normal[mm] * bq[n] * phi[i];
            if (v != 0.0) acc.add(velocity.vertex_dof(e.v[i], n), velocity.vertex_dof(e.v[j], mm), v);
          }
  });
}

Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& q, double t) {
  return assemble_load(mesh, dofs, q, t, dofs.cells());
}

Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& q, double t, CellList cells) {
  Vector out = Vector::Zero(dofs.n_dofs());
  if (!q) return out;
  const auto& rule = quadrature(5);
  for (int c : cells) {
    const CellGeometry g = CellGeometry::of(mesh, c);
    const auto d = dofs.cell_dofs(c);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const auto& b = rule.points[k];
      const double val = q(g.point(b), t) * 2.0 * g.area * rule.weights[k];
      for (int i = 0; i < 3; ++i) out[d[i]] += val * b[i];
    }
  }
  return out;
}

Vector assemble_load(const Mesh& mesh, const DofMap& velocity, const VectorFunction& f, double t, double eta) {
  return assemble_load(mesh, velocity, f, t, eta, velocity.cells());
}

Vector assemble_load(const Mesh& mesh, const DofMap& velocity, const VectorFunction& f, double t, double eta,
                     CellList cells) {
  Vector out = Vector::Zero(velocity.n_dofs());
  if (!f) return out;
  const auto& rule = quadrature(5);
  for (int c : cells) {
    const CellGeometry g = CellGeometry::of(mesh, c);
    const auto d = velocity.cell_dofs(c);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const LocalBasis b = local_basis(g, rule.points[k]);
      const Vec2 val = eta * f(g.point(rule.points[k]), t) * 2.0 * g.area * rule.weights[k];
      for (int s = 0; s < 4; ++s) {
        out[d[s]] += val.x() * b.value[s];
        out[d[4 + s]] += val.y() * b.value[s];
      }
    }
  }
  return out;
}

void apply_dirichlet(SparseMatrix& a, Vector& b, const DofMap& dofs, const Vector& values) {
  apply_dirichlet(a, b, dofs.dirichlet_set(), values);
}

} // namespace tpns
