#include "tpns/run.hpp"

#include <chrono>
#include <cmath>

#include "tpns/error.hpp"

namespace tpns {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void tally(RunStats& s, const PicardReport& r) {
  s.picard_iterations += r.iterations;
  if (!r.converged) ++s.picard_stagnations;
}

} // namespace

int step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw InvariantViolation("need dt > 0 and T >= 0");
  const double n = std::round(T / dt);
  if (std::abs(n * dt - T) > 1e-9 * std::max(1.0, T)) throw InvariantViolation("dt does not divide T");
  return static_cast<int>(n);
}

TraditionalRun run_traditional(const Mesh& mesh, const ModelParams& params, const StepConfig& cfg,
                               const ProblemData& data, int steps) {
  const auto t0 = std::chrono::steady_clock::now();
  TraditionalRun run;
  run.disc = std::make_unique<Discretization>(mesh, params);
  const TraditionalStepper stepper(*run.disc, cfg, data);
  run.state = State::initial(*run.disc, data);
  for (int n = 0; n < steps; ++n) {
    PicardReport r;
    run.state = stepper.advance(run.state, &r);
    tally(run.stats, r);
  }
  run.stats.steps = steps;
  run.stats.wall_s = seconds_since(t0);
  return run;
}

LocalParallelRun run_local_parallel(const Mesh& coarse, const Mesh& fine, const SubdomainLayout& layout,
                                    const ModelParams& params, const StepConfig& cfg, const ProblemData& data,
                                    int steps) {
  const auto t0 = std::chrono::steady_clock::now();
  LocalParallelRun run;
  run.coarse = std::make_unique<Discretization>(coarse, params);
  run.fine = std::make_unique<Discretization>(fine, params);
  run.decomposition = std::make_unique<Decomposition>(partition_subdomains(run.fine->mesh(), layout));
  const LocalParallelStepper stepper(*run.coarse, *run.fine, *run.decomposition, cfg, data);
  run.coarse_state = State::initial(*run.coarse, data);
  run.corrections = stepper.initial_corrections();
  run.composite = correct(run.coarse_state, stepper.prolongation(), run.corrections, *run.fine, *run.decomposition);
  for (int n = 0; n < steps; ++n) {
    auto r = stepper.advance(run.coarse_state, run.corrections);
    tally(run.stats, r.picard);
    run.coarse_state = std::move(r.coarse);
    run.corrections = std::move(r.corrections);
    run.composite = std::move(r.composite);
  }
  run.stats.steps = steps;
  run.stats.wall_s = seconds_since(t0);
  return run;
}

Mesh nested_fine_mesh(const Mesh& coarse, double H, double h) {
  const double ratio = H / h;
  const int levels = static_cast<int>(std::lround(std::log2(ratio)));
  if (levels < 0 || std::abs(std::ldexp(1.0, levels) - ratio) > 1e-9 * ratio)
    throw NotNested("H/h must be a power of two");
  return levels == 0 ? nest_identity(coarse) : refine_uniform(coarse, levels);
}

} // namespace tpns
