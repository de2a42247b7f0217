#pragma once

#include <memory>

#include "tpns/twogrid.hpp"

namespace tpns {

/// Number of steps of size dt covering [0, T]; throws InvariantViolation unless dt divides T.
int step_count(double T, double dt);

struct RunStats {
  double wall_s = 0.0;
  int steps = 0;
  int picard_iterations = 0;
  int picard_stagnations = 0;
};

struct TraditionalRun {
  std::unique_ptr<Discretization> disc;
  State state;
  RunStats stats;
};

/// Partitioned scheme from the initial data for `steps` steps on `mesh`.
TraditionalRun run_traditional(const Mesh& mesh, const ModelParams& params, const StepConfig& cfg,
                               const ProblemData& data, int steps);

struct LocalParallelRun {
  std::unique_ptr<Discretization> coarse, fine;
  std::unique_ptr<Decomposition> decomposition;
  State coarse_state;
  CorrectionSet corrections;
  CompositeSolution composite;
  RunStats stats;
};

/// Local-parallel scheme: coarse mesh plus a nested fine mesh (refine_uniform or nest_identity).
LocalParallelRun run_local_parallel(const Mesh& coarse, const Mesh& fine, const SubdomainLayout& layout,
                                    const ModelParams& params, const StepConfig& cfg, const ProblemData& data,
                                    int steps);

/// Fine mesh H/h = 2^levels finer than `coarse`; levels = 0 gives the identity nesting.
Mesh nested_fine_mesh(const Mesh& coarse, double H, double h);

} // namespace tpns
