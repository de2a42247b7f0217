#pragma once

#include <optional>

#include "tpns/problem.hpp"

namespace tpns {

struct State {
  double t = 0.0;
  FieldVector p_F, p_f, p_m, u_c, p;

  static State zero(const Discretization& disc, double t = 0.0);
  /// Nodal interpolation of the initial data.
  static State initial(const Discretization& disc, const ProblemData& data, double t0 = 0.0);
};

struct StepConfig {
  double dt = 0.0625;
  double picard_tol = 1e-10;
  int picard_max = 50;
  bool skew = true;
  bool convection = true; // false: Stokes flow in the conduit
  int workers = 1;
  bool pressure_pin = true; // pin one pressure dof when the velocity is prescribed on the whole boundary

  /// Throws InvariantViolation.
  void validate() const;
  bool operator==(const StepConfig&) const = default;
};

struct PicardReport {
  int iterations = 0;
  bool converged = true;
  double last_change = 0.0;
};

/// Convection operator actually used by the solvers: the skew matrix plus the open
/// boundary term when `cfg.skew`, the plain one otherwise.
SparseMatrix convection_operator(const Discretization& disc, const FieldVector& wind, const StepConfig& cfg,
                                 CellList cells, EdgeList natural_edges);

/// Backward Euler with lagged couplings, caching the porous factorizations.
class TraditionalStepper {
public:
  TraditionalStepper(const Discretization& disc, const StepConfig& cfg, const ProblemData& data);
  ~TraditionalStepper();
  TraditionalStepper(TraditionalStepper&&) noexcept;

  struct PorousResult {
    FieldVector p_F, p_f, p_m;
  };
  struct ConduitResult {
    FieldVector u_c, p;
    PicardReport picard;
  };

  /// Three independent solves using state_n only.
  PorousResult step_porous(const State& state_n) const;
  /// Picard iteration on the conduit system with the interface data lagged at p_F^n.
  /// `lagged_pF` overrides the pressure used in the interface loads.
  ConduitResult step_conduit(const State& state_n, const FieldVector* lagged_pF = nullptr) const;
  State advance(const State& state_n, PicardReport* report = nullptr) const;

  const Discretization& disc() const { return disc_; }
  const StepConfig& config() const { return cfg_; }

private:
  struct Cache;
  const Discretization& disc_;
  StepConfig cfg_;
  ProblemData data_;
  std::unique_ptr<Cache> cache_;
};

State advance_traditional(const State& state_n, const TraditionalStepper& stepper, PicardReport* report = nullptr);

} // namespace tpns
