#pragma once

#include <array>
#include <span>
#include <vector>

#include "tpns/mesh.hpp"

namespace tpns {

using Barycentric = std::array<double, 3>;

/// P1 values are the barycentric coordinates; gradients are w.r.t. the reference
/// triangle (0,0),(1,0),(0,1) with lambda_1 = 1 - xi - eta.
struct P1Shape {
  std::array<double, 3> values;
  std::array<Vec2, 3> gradients;
};

struct BubbleShape {
  double value;
  Vec2 gradient;
};

/// Throws InvalidBarycentric unless coordinates are nonnegative and sum to one (1e-12).
P1Shape p1_shape(const Barycentric& point);
/// Cubic bubble 27 l1 l2 l3.
BubbleShape bubble_shape(const Barycentric& point);

struct QuadratureRule {
  int order = 0;
  std::vector<Barycentric> points;
  std::vector<double> weights; // sum to 1/2, the reference area
};

/// Symmetric Gauss rules on the triangle; order in {2, 4, 5}.
const QuadratureRule& quadrature(int order);

/// Two-point Gauss rule on [0,1] (weights sum to 1).
struct LineRule {
  std::array<double, 2> points;
  std::array<double, 2> weights;
};
const LineRule& gauss2();

/// Affine geometry of one physical triangle.
struct CellGeometry {
  std::array<Vec2, 3> x;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda; // physical gradients of the barycentric coordinates

  static CellGeometry of(const Mesh& mesh, int cell);
  Vec2 point(const Barycentric& b) const { return b[0] * x[0] + b[1] * x[1] + b[2] * x[2]; }
  /// Barycentric coordinates of a physical point (may be outside [0,1] if p is outside).
  Barycentric barycentric(const Vec2& p) const;
};

enum class SpaceKind { P1Scalar, MiniVector, P1ScalarConduit };

const char* to_string(SpaceKind k);

/// Dense numbering of one discrete space on one region.
///
/// P1 spaces: one dof per region vertex. MINI: ux on vertices, uy on vertices,
/// ux bubbles, uy bubbles, in that block order. Per-cell dof order for MINI is
/// (ux_0, ux_1, ux_2, ux_bubble, uy_0, uy_1, uy_2, uy_bubble).
class DofMap {
public:
  static DofMap build(const Mesh& mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  Region region() const { return region_; }
  int n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return kind_ == SpaceKind::MiniVector ? 8 : 3; }
  int n_local_vertices() const { return static_cast<int>(local_vertex_.size()); }

  const std::vector<int>& cells() const { return cells_; }
  bool contains_cell(int mesh_cell) const { return local_cell_[mesh_cell] >= 0; }
  /// Throws RegionMismatch if the cell is in the other region.
  std::span<const int> cell_dofs(int mesh_cell) const;

  /// Dof of mesh vertex v (component comp for MINI), or -1 if v is not in the region.
  int vertex_dof(int v, int comp = 0) const;
  int bubble_dof(int mesh_cell, int comp) const;
  /// Mesh vertex of region-local vertex index.
  int mesh_vertex(int local) const { return local_vertex_[local]; }

  const std::vector<int>& dirichlet_set() const { return dirichlet_; }
  bool is_dirichlet(int dof) const { return dirichlet_mask_[dof] != 0; }

  /// For vertex dofs: mesh vertex and component; bubble dofs give vertex -1.
  struct DofInfo {
    int vertex = -1;
    int cell = -1;
    int comp = 0;
  };
  DofInfo info(int dof) const;

private:
  SpaceKind kind_ = SpaceKind::P1Scalar;
  Region region_ = Region::Porous;
  int n_dofs_ = 0;
  std::vector<int> cells_;
  std::vector<int> local_cell_;   // per mesh cell, -1 if outside the region
  std::vector<int> vertex_local_; // per mesh vertex, -1 if outside the region
  std::vector<int> local_vertex_;
  std::vector<int> cell_dofs_;
  std::vector<int> dirichlet_;
  std::vector<char> dirichlet_mask_;
};

} // namespace tpns
