#pragma once

#include <cmath>

namespace tpns {

/// Physical coefficients of the triple-porosity / Navier-Stokes model.
struct ModelParams {
  double phi_F = 1.0, phi_f = 1.0, phi_m = 1.0;
  double C_F = 1.0, C_f = 1.0, C_m = 1.0;
  double k_F = 1.0, k_f = 1.0, k_m = 1.0;
  double sigma = 1.0, sigma_star = 1.0;
  double mu_tilde = 1.0;
  double nu = 1.0;
  double rho = 1.0;
  double alpha = 1.0;
  double eta = 1.0;

  /// Throws InvariantViolation naming the first non-positive coefficient.
  void validate() const;

  /// sigma* k_f / mu~ : macro/micro fracture transfer.
  double transfer_Ff() const { return sigma_star * k_f / mu_tilde; }
  /// sigma k_m / mu~ : micro fracture/matrix transfer.
  double transfer_fm() const { return sigma * k_m / mu_tilde; }
  /// Friction coefficient of the BJ term, eta nu alpha sqrt(d) / sqrt(trace Pi) with Pi = k_F I, d = 2.
  double bj_friction() const { return eta * nu * alpha * std::sqrt(2.0) / std::sqrt(2.0 * k_F); }
  /// Coefficient of the tangential pressure-gradient load on the interface.
  double bj_tangential() const { return eta * nu * alpha * std::sqrt(k_F) / mu_tilde; }

  bool operator==(const ModelParams&) const = default;
};

} // namespace tpns
