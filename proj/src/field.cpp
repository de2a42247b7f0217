#include "tpns/field.hpp"

namespace tpns {

LocalBasis local_basis(const CellGeometry& g, const Barycentric& b) {
  LocalBasis out;
  for (int k = 0; k < 3; ++k) {
    out.value[k] = b[k];
    out.grad[k] = g.grad_lambda[k];
  }
  out.value[3] = 27.0 * b[0] * b[1] * b[2];
  out.grad[3] = 27.0 * (b[1] * b[2] * g.grad_lambda[0] + b[0] * b[2] * g.grad_lambda[1] + b[0] * b[1] * g.grad_lambda[2]);
  return out;
}

double eval_scalar(const FieldVector& f, int cell, const CellGeometry&, const Barycentric& b) {
  const auto dofs = f.dofs->cell_dofs(cell);
  return b[0] * f.values[dofs[0]] + b[1] * f.values[dofs[1]] + b[2] * f.values[dofs[2]];
}

Vec2 eval_scalar_grad(const FieldVector& f, int cell, const CellGeometry& g) {
  const auto dofs = f.dofs->cell_dofs(cell);
  return f.values[dofs[0]] * g.grad_lambda[0] + f.values[dofs[1]] * g.grad_lambda[1] +
         f.values[dofs[2]] * g.grad_lambda[2];
}

Vec2 eval_vector(const FieldVector& f, int cell, const LocalBasis& basis) {
  const auto dofs = f.dofs->cell_dofs(cell);
  Vec2 u = Vec2::Zero();
  for (int s = 0; s < 4; ++s) {
    u.x() += f.values[dofs[s]] * basis.value[s];
    u.y() += f.values[dofs[4 + s]] * basis.value[s];
  }
  return u;
}

Mat2 eval_vector_grad(const FieldVector& f, int cell, const LocalBasis& basis) {
  const auto dofs = f.dofs->cell_dofs(cell);
  Mat2 g = Mat2::Zero();
  for (int s = 0; s < 4; ++s) {
    g.row(0) += f.values[dofs[s]] * basis.grad[s].transpose();
    g.row(1) += f.values[dofs[4 + s]] * basis.grad[s].transpose();
  }
  return g;
}

FieldVector interpolate(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& f, double t) {
  FieldVector out = FieldVector::zero(dofs, t);
  for (int lv = 0; lv < dofs.n_local_vertices(); ++lv) {
    const int v = dofs.mesh_vertex(lv);
    out.values[dofs.vertex_dof(v)] = f(mesh.vertices[v], t);
  }
  return out;
}

FieldVector interpolate(const Mesh& mesh, const DofMap& dofs, const VectorFunction& f, double t) {
  FieldVector out = FieldVector::zero(dofs, t);
  for (int lv = 0; lv < dofs.n_local_vertices(); ++lv) {
    const int v = dofs.mesh_vertex(lv);
    const Vec2 u = f(mesh.vertices[v], t);
    out.values[dofs.vertex_dof(v, 0)] = u.x();
    out.values[dofs.vertex_dof(v, 1)] = u.y();
  }
  if (dofs.kind() == SpaceKind::MiniVector) {
    for (int c : dofs.cells()) {
      const Vec2 uc = f(mesh.centroid(c), t);
      const auto cd = dofs.cell_dofs(c);
      for (int comp = 0; comp < 2; ++comp) {
        const double mean = (out.values[cd[4 * comp]] + out.values[cd[4 * comp + 1]] + out.values[cd[4 * comp + 2]]) / 3.0;
        out.values[cd[4 * comp + 3]] = uc[comp] - mean;
      }
    }
  }
  return out;
}

Vector dirichlet_values(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& g, double t) {
  Vector out = Vector::Zero(dofs.n_dofs());
  for (int dof : dofs.dirichlet_set()) out[dof] = g(mesh.vertices[dofs.info(dof).vertex], t);
  return out;
}

Vector dirichlet_values(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g, double t) {
  Vector out = Vector::Zero(dofs.n_dofs());
  for (int dof : dofs.dirichlet_set()) {
    const auto info = dofs.info(dof);
    out[dof] = g(mesh.vertices[info.vertex], t)[info.comp];
  }
  return out;
}

} // namespace tpns
