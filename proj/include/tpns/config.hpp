#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpns/wellbore.hpp"

namespace tpns {

enum class ProblemKind { MmsExample1, Wellbore };
const char* to_string(ProblemKind k);

/// One (h, H) row of a convergence sweep; dt follows the sweep's dt rule.
struct SweepRow {
  double h = 0.25, H = 0.5;
  bool operator==(const SweepRow&) const = default;
};

struct RunConfig {
  // [problem]
  ProblemKind problem = ProblemKind::MmsExample1;
  std::string output_dir = "out";
  int workers = 1;
  std::uint64_t seed = 20240501;
  // [model]; all ones unless the problem is the wellbore
  ModelParams model;
  // [discretization]
  double h = 0.25, H = 0.5, dt = 0.0625, T = 1.0;
  SubdomainLayout layout{2, 2, 2, 2, 0.25};
  // [solver]
  Algorithm algorithm = Algorithm::Traditional;
  StepConfig step; // dt and workers are copied from the fields above
  // [sweep]
  std::vector<SweepRow> rows{{0.25, 0.5}, {0.0625, 0.25}};
  bool dt_from_h = true; // dt = h^2 per row, otherwise the fixed dt above
  // [wellbore]
  WellboreConfig wellbore;
  std::vector<double> k_F_values{0.02, 0.04, 0.06, 0.08, 0.2, 0.4, 0.6, 0.8};

  /// Throws InvariantViolation.
  void validate() const;
  /// Step settings with dt and workers filled in.
  StepConfig step_config() const;
  /// Wellbore settings with the [model] coefficients applied.
  WellboreConfig wellbore_config() const;
  std::vector<SweepCase> sweep_cases() const;

  bool operator==(const RunConfig&) const = default;
};

/// Line-based `key = value` text with `[section]` headers and `#` comments. Numbers
/// may be written as fractions (1/16). Omitted keys keep their defaults.
/// Throws ParseError (with line number), UnknownKey, TypeMismatch, InvariantViolation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key, doubles with 17 significant digits, so parsing the output gives back `cfg`.
std::string serialize_config(const RunConfig& cfg);

} // namespace tpns
