#pragma once

#include <memory>

#include "tpns/assembly.hpp"

namespace tpns {

/// Sources, boundary data and initial data. Empty functions mean zero.
struct ProblemData {
  ScalarFunction q_F, q_f, q_m;
  VectorFunction f_c;
  ScalarFunction bc_F, bc_f, bc_m; // on outer porous boundary
  VectorFunction bc_u;             // on conduit Dirichlet dofs
  ScalarFunction init_F, init_f, init_m, init_p;
  VectorFunction init_u;
};

/// Spaces and the time-independent matrices of one mesh. Non-movable: fields keep
/// pointers to the dofmaps.
class Discretization {
public:
  Discretization(const Mesh& mesh, const ModelParams& params);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const ModelParams& params() const { return params_; }
  const DofMap& porous() const { return porous_; }
  const DofMap& velocity() const { return velocity_; }
  const DofMap& pressure() const { return pressure_; }
  const std::vector<int>& interface_edges() const { return interface_edges_; }
  /// Interface and outlet edges: where the conduit velocity is not prescribed.
  const std::vector<int>& natural_edges() const { return natural_edges_; }

  // Unit-coefficient porous mass and stiffness, conduit blocks with parameters applied.
  const SparseMatrix& porous_mass() const { return porous_mass_; }
  const SparseMatrix& porous_stiffness() const { return porous_stiffness_; }
  const SparseMatrix& velocity_mass() const { return velocity_mass_; }
  const SparseMatrix& viscous() const { return viscous_; }
  const SparseMatrix& divergence() const { return divergence_; }
  const InterfaceMatrices& coupling() const { return coupling_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  ModelParams params_;
  DofMap porous_, velocity_, pressure_;
  std::vector<int> interface_edges_, natural_edges_;
  SparseMatrix porous_mass_, porous_stiffness_, velocity_mass_, viscous_, divergence_;
  InterfaceMatrices coupling_;
};

} // namespace tpns
