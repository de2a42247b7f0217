#pragma once

#include <functional>

#include "tpns/elements.hpp"
#include "tpns/linalg.hpp"

namespace tpns {

/// Coefficients of one discrete field. The dofmap must outlive the field.
struct FieldVector {
  const DofMap* dofs = nullptr;
  Vector values;
  double time = 0.0;

  static FieldVector zero(const DofMap& d, double t = 0.0) { return {&d, Vector::Zero(d.n_dofs()), t}; }
};

using ScalarFunction = std::function<double(const Vec2& x, double t)>;
using VectorFunction = std::function<Vec2(const Vec2& x, double t)>;

/// Local basis for one cell at one point: three hats then the bubble, with physical gradients.
struct LocalBasis {
  std::array<double, 4> value;
  std::array<Vec2, 4> grad;
};
LocalBasis local_basis(const CellGeometry& g, const Barycentric& b);

double eval_scalar(const FieldVector& f, int cell, const CellGeometry& g, const Barycentric& b);
Vec2 eval_scalar_grad(const FieldVector& f, int cell, const CellGeometry& g);
Vec2 eval_vector(const FieldVector& f, int cell, const LocalBasis& basis);
/// Row i holds the gradient of component i.
Mat2 eval_vector_grad(const FieldVector& f, int cell, const LocalBasis& basis);

/// Nodal interpolation. For MINI the bubble coefficient matches the value at the centroid.
FieldVector interpolate(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& f, double t);
FieldVector interpolate(const Mesh& mesh, const DofMap& dofs, const VectorFunction& f, double t);

/// Values on the Dirichlet dofs of `dofs` (zero elsewhere).
Vector dirichlet_values(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& g, double t);
Vector dirichlet_values(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g, double t);

} // namespace tpns
