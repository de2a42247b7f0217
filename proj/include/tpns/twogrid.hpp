#pragma once

#include "tpns/stepping.hpp"

namespace tpns {

/// Coarse-to-fine transfer between nested meshes. The fine mesh's `parent` map must
/// point into the coarse mesh. For MINI the coarse field, bubble included, is
/// evaluated at fine vertices and centroids, so the operator is the identity when
/// the meshes coincide.
struct Prolongation {
  SparseMatrix porous, velocity, pressure;

  /// Throws NotNested.
  static Prolongation build(const Discretization& coarse, const Discretization& fine);
};

FieldVector prolong(const FieldVector& coarse, const SparseMatrix& p, const DofMap& fine);

/// Per-subdomain corrections stored as fine-length vectors (zero off the subdomain).
struct CorrectionSet {
  std::vector<Vector> e_F, e_f, e_m; // indexed by subdomain; empty for conduit subdomains
  std::vector<Vector> e_c, xi;       // empty for porous subdomains

  static CorrectionSet zero(const Discretization& fine, const Decomposition& dec);
};

/// Prolonged coarse state plus owner-restricted corrections.
struct CompositeSolution {
  const Discretization* fine = nullptr;
  const Decomposition* decomposition = nullptr;
  State base; // prolonged coarse state
  CorrectionSet corrections;

  enum class Field { pF, pf, pm, uc, p };
  /// Coarse + correction of subdomain j, valid on the cells j owns.
  FieldVector subdomain_field(Field f, int j) const;
  /// Continuous vertex field: each vertex takes the owner of its lowest-index cell.
  FieldVector vertex_field(Field f) const;
  /// All five vertex fields as one fine-mesh state.
  State vertex_state() const;
};

/// Throws MissingCorrection when a subdomain has no correction vector.
CompositeSolution correct(const State& coarse_np1, const Prolongation& prolongation, const CorrectionSet& corrections,
                          const Discretization& fine, const Decomposition& dec);

/// Coarse march, fine corrections on the extended subdomains, and owner restriction.
class LocalParallelStepper {
public:
  LocalParallelStepper(const Discretization& coarse, const Discretization& fine, const Decomposition& dec,
                       const StepConfig& cfg, const ProblemData& data);
  ~LocalParallelStepper();
  LocalParallelStepper(LocalParallelStepper&&) noexcept;

  struct Result {
    State coarse;
    CorrectionSet corrections;
    CompositeSolution composite;
    PicardReport picard;
  };

  CorrectionSet initial_corrections() const { return CorrectionSet::zero(fine_, dec_); }
  State coarse_march(const State& coarse_n, PicardReport* report = nullptr) const;
  /// Fine residual correction on one extended subdomain; writes its slots of `out`.
  void local_correction(int j, const State& coarse_n, const State& coarse_np1, const CorrectionSet& corr_n,
                        CorrectionSet& out) const;
  Result advance(const State& coarse_n, const CorrectionSet& corr_n) const;

  const Prolongation& prolongation() const { return prolongation_; }
  const TraditionalStepper& coarse_stepper() const { return coarse_stepper_; }
  const Discretization& fine() const { return fine_; }
  const Decomposition& decomposition() const { return dec_; }

private:
  struct Local;
  const Discretization& coarse_;
  const Discretization& fine_;
  const Decomposition& dec_;
  StepConfig cfg_;
  ProblemData data_;
  TraditionalStepper coarse_stepper_;
  Prolongation prolongation_;
  std::vector<std::unique_ptr<Local>> locals_;
};

LocalParallelStepper::Result advance_local_parallel(const State& coarse_n, const CorrectionSet& corr_n,
                                                    const LocalParallelStepper& stepper);

} // namespace tpns
