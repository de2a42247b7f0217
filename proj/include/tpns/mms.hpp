#pragma once

#include <optional>
#include <string>

#include "tpns/run.hpp"

namespace tpns {

using GradFunction = std::function<Vec2(const Vec2& x, double t)>;
using JacobianFunction = std::function<Mat2(const Vec2& x, double t)>; // row i: gradient of component i

struct ScalarExact {
  ScalarFunction value;
  GradFunction grad;
};
struct VectorExact {
  VectorFunction value;
  JacobianFunction grad;
};

/// Closed-form exact fields, their derivatives, and the forcings that make them solve
/// the model with the given parameters.
struct ManufacturedCase {
  ModelParams params;
  ScalarExact p_F, p_f, p_m, p;
  VectorExact u_c;
  ScalarFunction q_F, q_f, q_m;
  VectorFunction f_c;

  /// Sources plus Dirichlet and initial data taken from the exact fields.
  ProblemData data() const;
};

/// The 2D manufactured solution on (0,1) x (0,2) with the interface at y = 1.
ManufacturedCase example1_case(const ModelParams& params = {});
RectDomain example1_domain();

enum class NormKind { L2, H1Semi };

/// Norm of (numeric - exact) at time t over `cells` (all cells of the field when empty).
double compute_norm(const FieldVector& f, const Mesh& mesh, const ScalarExact& exact, double t, NormKind kind,
                    CellList cells = {});
double compute_norm(const FieldVector& f, const Mesh& mesh, const VectorExact& exact, double t, NormKind kind,
                    CellList cells = {});
/// Squared per-cell error contributions are summed over each owner's disjoint cells.
double compute_piecewise_norm(const CompositeSolution& s, CompositeSolution::Field field, const ScalarExact& exact,
                              double t, NormKind kind);
double compute_piecewise_norm(const CompositeSolution& s, CompositeSolution::Field field, const VectorExact& exact,
                              double t, NormKind kind);

/// L2 norm of a - b relative to the L2 norm of b (absolute when b vanishes). The fields
/// must use the same numbering on `mesh`.
double relative_l2_difference(const FieldVector& a, const FieldVector& b, const Mesh& mesh);
/// Largest relative difference over the five fields of two states on one mesh.
double max_relative_difference(const State& a, const State& b, const Mesh& mesh);

double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct ErrorRow {
  double h = 0.0, H = 0.0, dt = 0.0;
  double uc_h1 = 0.0, pF_h1 = 0.0, pf_l2 = 0.0, pf_h1 = 0.0, pm_l2 = 0.0, pm_h1 = 0.0;
  double cpu_s = 0.0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;

  /// Rate between row i-1 and row i; empty for the first row or a zero error.
  std::optional<double> rate(std::size_t i, double ErrorRow::*column) const;
};

enum class Algorithm { Traditional, LocalParallel };
const char* to_string(Algorithm a);

struct SweepCase {
  double h = 0.25;
  double H = 0.5;
  double dt = 0.0625;
  SubdomainLayout layout{2, 2, 2, 2, 0.25};
};

struct SweepSettings {
  ModelParams params;
  StepConfig step; // dt is taken from each case
  double T = 1.0;
};

/// Errors at the final time of a finished run: global norms for the traditional run,
/// piecewise norms over the owned cells for the composite.
ErrorRow error_row(const TraditionalRun& run, const ManufacturedCase& mc);
ErrorRow error_row(const LocalParallelRun& run, const ManufacturedCase& mc);

/// One manufactured-solution run per case, errors at the final time.
ErrorTable convergence_sweep(const std::vector<SweepCase>& cases, Algorithm algorithm, const SweepSettings& settings);

} // namespace tpns
