#pragma once

#include <span>
#include <vector>

#include "tpns/field.hpp"
#include "tpns/params.hpp"

namespace tpns {

using CellList = std::span<const int>;
using EdgeList = std::span<const int>;

/// Geometry of a boundary or interface edge. The normal points out of the conduit
/// cell when there is one, otherwise out of the porous cell.
struct EdgeFrame {
  Vec2 a, b;
  double length = 0.0;
  Vec2 tangent; // (b - a) / length
  Vec2 normal;
};
EdgeFrame edge_frame(const Mesh& mesh, const TaggedEdge& e);

/// Mesh edges with the given tag, optionally only those whose cell in `region` is in `cells`.
std::vector<int> edges_with_tag(const Mesh& mesh, EdgeTag tag);
std::vector<int> conduit_natural_edges(const Mesh& mesh);
std::vector<int> edges_touching(const Mesh& mesh, std::span<const int> edges, Region region,
                                const std::vector<char>& cell_mask);

// Volume forms. The overloads without a cell list integrate over the whole region.
SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coef);
SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs, double coef, CellList cells);
/// Scalar Laplacian for P1, componentwise vector Laplacian for MINI.
SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs, double coef);
SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs, double coef, CellList cells);

/// coef (p_self - p_other, v_self): `self` acts on the equation's own unknown.
struct ExchangeTerm {
  SparseMatrix self, other;
  Vector apply(const Vector& p_self, const Vector& p_other) const { return self * p_self + other * p_other; }
};
struct ExchangeMatrices {
  ExchangeTerm F_f; // in the macrofracture equation
  ExchangeTerm f_F; // in the microfracture equation
  ExchangeTerm f_m; // in the microfracture equation
  ExchangeTerm m_f; // in the matrix equation
};
ExchangeMatrices assemble_exchange(const Mesh& mesh, const DofMap& porous, const ModelParams& params);
ExchangeMatrices assemble_exchange(const Mesh& mesh, const DofMap& porous, const ModelParams& params,
                                   CellList cells);

/// 2 nu eta (D u, D v) over the cells.
SparseMatrix assemble_deformation(const Mesh& mesh, const DofMap& velocity, double coef, CellList cells);
/// coef * int (u.tau)(v.tau) over the edges.
SparseMatrix assemble_tangential_friction(const Mesh& mesh, const DofMap& velocity, double coef, EdgeList edges);
/// Deformation term plus BJ friction on the interface. Throws MissingInterfaceTags when
/// the mesh has both regions but no interface edge.
SparseMatrix assemble_conduit_viscous(const Mesh& mesh, const DofMap& velocity, const ModelParams& params);
SparseMatrix assemble_conduit_viscous(const Mesh& mesh, const DofMap& velocity, const ModelParams& params,
                                      CellList cells, EdgeList interface_edges);

struct InterfaceMatrices {
  SparseMatrix pressure_load;   // velocity x porous: (eta/rho) int p_F v.n
  SparseMatrix normal_flux;     // porous x velocity: -int v_F u.n
  SparseMatrix tangential_load; // velocity x porous: bj_tangential int d_tau p_F (v.tau)
};
InterfaceMatrices assemble_interface_coupling(const Mesh& mesh, const DofMap& porous, const DofMap& velocity,
                                              const ModelParams& params);
InterfaceMatrices assemble_interface_coupling(const Mesh& mesh, const DofMap& porous, const DofMap& velocity,
                                              const ModelParams& params, EdgeList edges);

/// Rows are pressure dofs, columns velocity dofs: -eta int psi div phi.
SparseMatrix assemble_divergence(const Mesh& mesh, const DofMap& velocity, const DofMap& pressure, double eta);
SparseMatrix assemble_divergence(const Mesh& mesh, const DofMap& velocity, const DofMap& pressure, double eta,
                                 CellList cells);

/// eta ((w.grad) u, v), or its skew part eta/2 [((w.grad) u, v) - ((w.grad) v, u)].
SparseMatrix assemble_convection(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind, double eta,
                                 bool skew);
SparseMatrix assemble_convection(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind, double eta,
                                 bool skew, CellList cells);
/// eta/2 int (w.n)(u.v) on open boundary edges. Added to the skew matrix it restores
/// consistency where the velocity is not prescribed.
SparseMatrix assemble_convection_boundary(const Mesh& mesh, const DofMap& velocity, const FieldVector& wind,
                                          double eta, EdgeList edges);
/// Matrix of e -> N(e; base, v): the wind is the unknown and `base` is convected.
SparseMatrix assemble_convection_reaction(const Mesh& mesh, const DofMap& velocity, const FieldVector& base,
                                          double eta, bool skew, CellList cells);
SparseMatrix assemble_convection_reaction_boundary(const Mesh& mesh, const DofMap& velocity,
                                                   const FieldVector& base, double eta, EdgeList edges);

/// int q phi_i for P1 spaces.
Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& q, double t);
Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& q, double t, CellList cells);
/// eta int f . phi_i for the MINI space.
Vector assemble_load(const Mesh& mesh, const DofMap& velocity, const VectorFunction& f, double t, double eta);
Vector assemble_load(const Mesh& mesh, const DofMap& velocity, const VectorFunction& f, double t, double eta,
                     CellList cells);

/// Dirichlet elimination using the dofmap's essential set; values indexed like b.
void apply_dirichlet(SparseMatrix& a, Vector& b, const DofMap& dofs, const Vector& values);

} // namespace tpns
