#include "tpns/elements.hpp"

#include <algorithm>
#include <cmath>

#include "tpns/error.hpp"

namespace tpns {

namespace {

void check_barycentric(const Barycentric& b) {
  if (b[0] < -1e-12 || b[1] < -1e-12 || b[2] < -1e-12 || std::abs(b[0] + b[1] + b[2] - 1.0) > 1e-12)
    throw InvalidBarycentric("coordinates must be nonnegative and sum to one");
}

const std::array<Vec2, 3> kRefGrad{Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

QuadratureRule make_rule(int order) {
  QuadratureRule q;
  q.order = order;
  const auto add_orbit = [&q](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    q.points.push_back({a, a, b});
    q.points.push_back({a, b, a});
    q.points.push_back({b, a, a});
    for (int k = 0; k < 3; ++k) q.weights.push_back(0.5 * w);
  };
  switch (order) {
  case 2:
    add_orbit(1.0 / 6.0, 1.0 / 3.0);
    break;
  case 4:
    add_orbit(0.44594849091596488632, 0.22338158967801146570);
    add_orbit(0.09157621350977074346, 0.10995174365532186764);
    break;
  case 5: {
    const double s = std::sqrt(15.0);
    q.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    q.weights.push_back(0.5 * 9.0 / 40.0);
    add_orbit((6.0 - s) / 21.0, (155.0 - s) / 1200.0);
    add_orbit((6.0 + s) / 21.0, (155.0 + s) / 1200.0);
    break;
  }
  default:
    throw UnsupportedOrder("quadrature order " + std::to_string(order));
  }
  return q;
}

} // namespace

P1Shape p1_shape(const Barycentric& b) {
  check_barycentric(b);
  return {{b[0], b[1], b[2]}, kRefGrad};
}

BubbleShape bubble_shape(const Barycentric& b) {
  check_barycentric(b);
  const Vec2 g = 27.0 * (b[1] * b[2] * kRefGrad[0] + b[0] * b[2] * kRefGrad[1] + b[0] * b[1] * kRefGrad[2]);
  return {27.0 * b[0] * b[1] * b[2], g};
}

const QuadratureRule& quadrature(int order) {
  static const QuadratureRule q2 = make_rule(2);
  static const QuadratureRule q4 = make_rule(4);
  static const QuadratureRule q5 = make_rule(5);
  switch (order) {
  case 2: return q2;
  case 4: return q4;
  case 5: return q5;
  default: throw UnsupportedOrder("quadrature order " + std::to_string(order));
  }
}

const LineRule& gauss2() {
  static const LineRule rule = [] {
    const double d = 0.5 / std::sqrt(3.0);
    return LineRule{{0.5 - d, 0.5 + d}, {0.5, 0.5}};
  }();
  return rule;
}

CellGeometry CellGeometry::of(const Mesh& mesh, int cell) {
  CellGeometry g;
  const auto& t = mesh.triangles[cell];
  for (int k = 0; k < 3; ++k) g.x[k] = mesh.vertices[t[k]];
  const Vec2 e1 = g.x[1] - g.x[0];
  const Vec2 e2 = g.x[2] - g.x[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  g.area = 0.5 * det;
  // grad l1 = perp(x2 - x1)/det etc.
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = g.x[(k + 1) % 3];
    const Vec2& b = g.x[(k + 2) % 3];
    g.grad_lambda[k] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
  }
  return g;
}

Barycentric CellGeometry::barycentric(const Vec2& p) const {
  Barycentric b;
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = x[(k + 1) % 3];
    b[k] = grad_lambda[k].dot(p - a);
  }
  return b;
}

const char* to_string(SpaceKind k) {
  switch (k) {
  case SpaceKind::P1Scalar: return "P1_SCALAR";
  case SpaceKind::MiniVector: return "MINI_VECTOR";
  case SpaceKind::P1ScalarConduit: return "P1_SCALAR_CONDUIT";
  }
  return "?";
}

DofMap DofMap::build(const Mesh& mesh, SpaceKind kind) {
  DofMap d;
  d.kind_ = kind;
  d.region_ = kind == SpaceKind::P1Scalar ? Region::Porous : Region::Conduit;
  d.local_cell_.assign(mesh.n_cells(), -1);
  d.vertex_local_.assign(mesh.n_vertices(), -1);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_region[c] != d.region_) continue;
    d.local_cell_[c] = static_cast<int>(d.cells_.size());
    d.cells_.push_back(c);
    for (int v : mesh.triangles[c]) d.vertex_local_[v] = 0;
  }
  if (d.cells_.empty()) throw RegionMismatch(std::string("mesh has no ") + to_string(d.region_) + " cells");
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (d.vertex_local_[v] < 0) continue;
    d.vertex_local_[v] = static_cast<int>(d.local_vertex_.size());
    d.local_vertex_.push_back(v);
  }
  const int nv = d.n_local_vertices();
  const int nc = static_cast<int>(d.cells_.size());
  d.n_dofs_ = kind == SpaceKind::MiniVector ? 2 * nv + 2 * nc : nv;

  d.cell_dofs_.reserve(static_cast<std::size_t>(nc) * d.dofs_per_cell());
  for (int lc = 0; lc < nc; ++lc) {
    const auto& t = mesh.triangles[d.cells_[lc]];
    if (kind == SpaceKind::MiniVector) {
      for (int comp = 0; comp < 2; ++comp) {
        for (int v : t) d.cell_dofs_.push_back(comp * nv + d.vertex_local_[v]);
        d.cell_dofs_.push_back(2 * nv + comp * nc + lc);
      }
    } else {
      for (int v : t) d.cell_dofs_.push_back(d.vertex_local_[v]);
    }
  }

  d.dirichlet_mask_.assign(d.n_dofs_, 0);
  for (const auto& e : mesh.edges) {
    std::array<bool, 2> constrain{false, false};
    if (kind == SpaceKind::P1Scalar && e.tag == EdgeTag::OuterP) {
      constrain = {true, false};
    } else if (kind == SpaceKind::MiniVector && e.tag == EdgeTag::OuterC) {
      constrain = {true, true};
    } else if (kind == SpaceKind::MiniVector && e.tag == EdgeTag::Cased) {
      const Vec2 dir = mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]];
      // Axis-aligned walls: the normal is the coordinate direction across the edge.
      constrain = std::abs(dir.x()) > std::abs(dir.y()) ? std::array{false, true} : std::array{true, false};
    }
    for (int comp = 0; comp < 2; ++comp) {
      if (!constrain[comp]) continue;
      for (int v : e.v) {
        const int dof = d.vertex_dof(v, comp);
        if (dof >= 0) d.dirichlet_mask_[dof] = 1;
      }
    }
  }
  for (int i = 0; i < d.n_dofs_; ++i)
    if (d.dirichlet_mask_[i]) d.dirichlet_.push_back(i);
  return d;
}

std::span<const int> DofMap::cell_dofs(int mesh_cell) const {
  const int lc = mesh_cell >= 0 && mesh_cell < static_cast<int>(local_cell_.size()) ? local_cell_[mesh_cell] : -1;
  if (lc < 0)
    throw RegionMismatch("cell " + std::to_string(mesh_cell) + " is not in the " + to_string(region_) + " region");
  const int n = dofs_per_cell();
  return {cell_dofs_.data() + static_cast<std::size_t>(lc) * n, static_cast<std::size_t>(n)};
}

int DofMap::vertex_dof(int v, int comp) const {
  const int lv = vertex_local_[v];
  if (lv < 0) return -1;
  return kind_ == SpaceKind::MiniVector ? comp * n_local_vertices() + lv : lv;
}

int DofMap::bubble_dof(int mesh_cell, int comp) const {
  const int lc = local_cell_[mesh_cell];
  if (lc < 0 || kind_ != SpaceKind::MiniVector) return -1;
  return 2 * n_local_vertices() + comp * static_cast<int>(cells_.size()) + lc;
}

DofMap::DofInfo DofMap::info(int dof) const {
  const int nv = n_local_vertices();
  if (kind_ != SpaceKind::MiniVector) return {local_vertex_[dof], -1, 0};
  if (dof < 2 * nv) return {local_vertex_[dof % nv], -1, dof / nv};
  const int nc = static_cast<int>(cells_.size());
  const int b = dof - 2 * nv;
  return {-1, cells_[b % nc], b / nc};
}

} // namespace tpns
