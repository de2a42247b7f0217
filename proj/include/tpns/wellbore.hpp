#pragma once

#include <vector>

#include "tpns/mms.hpp"
#include "tpns/run.hpp"

namespace tpns {

/// Coefficients of the shale wellbore scenario. The macro/micro shape factor is not
/// given separately, so sigma_star = sigma.
ModelParams wellbore_params();

struct WellboreConfig {
  Rect square{0.0, 0.0, 6.0, 6.0};
  Rect conduit{1.9, 2.4, 4.4, 3.6};
  double p_m_in = 4.0e3, p_f_in = 1.6e3, p_F_in = 1.0e3;
  // Outlet segment on the right conduit wall, as fractions of its height.
  double outlet_lo = 0.25, outlet_hi = 0.75;
  double H = 1.0 / 3.0, h = 1.0 / 9.0;
  double dt = 0.05, T = 10.0;
  bool stokes = true;
  bool snap = true; // move the geometry to coarse mesh lines instead of rejecting it
  // Four porous quadrants; the wellbore stays one subdomain.
  SubdomainLayout layout{2, 2, 1, 1, 1.0 / 3.0};
  ModelParams params = wellbore_params();

  void validate() const;
  bool operator==(const WellboreConfig&) const = default;
};

/// Conduit rectangle and outlet span after alignment with the coarse mesh.
struct WellboreGeometry {
  Rect conduit;
  double outlet_y0 = 0.0, outlet_y1 = 0.0;
  bool snapped = false;
};

/// Throws GeometryMisaligned (off-grid without snapping, or not strictly inside the
/// square) and EmptyOutlet.
WellboreGeometry wellbore_geometry(const WellboreConfig& cfg);

/// Structured mesh of the square with conduit cells re-tagged. Left and right conduit
/// walls are cased except the outlet span; top and bottom walls are fracture interface.
Mesh build_wellbore_mesh(const WellboreConfig& cfg, const WellboreGeometry& g, double step);

struct WellboreProblem {
  WellboreGeometry geometry;
  Mesh coarse, fine; // fine carries its parent map into coarse
  ModelParams params;
  StepConfig step;
  ProblemData data;
  int steps = 0;
};

WellboreProblem build_wellbore_problem(const WellboreConfig& cfg);

/// Outflow through the outlet edges, integrated edge by edge. Throws EmptyOutlet.
double production_rate(const FieldVector& u, const Mesh& mesh);
/// Same quantity as one dot product with an assembled boundary functional.
double production_rate_functional(const FieldVector& u, const Mesh& mesh);

struct RatePoint {
  double k_F = 0.0;
  double Q = 0.0;
  Algorithm algorithm = Algorithm::Traditional;
  double wall_s = 0.0;
};

struct RateCurve {
  std::vector<RatePoint> points; // k_F strictly increasing
};

/// Final-time production rate for each k_F. Entries run on up to `workers` threads.
RateCurve sweep_kF(const WellboreConfig& cfg, const std::vector<double>& k_F, Algorithm algorithm, int workers = 1);

/// Production rate at the final time of one run.
RatePoint wellbore_rate(const WellboreConfig& cfg, Algorithm algorithm);

} // namespace tpns
