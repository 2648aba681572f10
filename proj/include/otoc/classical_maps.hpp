#pragma once

#include "otoc/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace otoc {

enum class MapFamily { Standard, Harper };

const char* to_string(MapFamily family);
MapFamily map_family_from_string(const std::string& name);

/// Point on the unit 2-torus. Coordinates are kept reduced into [0, 1).
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Reduce a real number into [0, 1).
double wrap_unit(double v);

PhasePoint wrap(PhasePoint point);

/// Minimum-image Euclidean distance on the flat unit torus.
double torus_distance(PhasePoint a, PhasePoint b);

struct ClassicalMapSpec {
  MapFamily family = MapFamily::Standard;
  double k1 = 0.0;  // standard map: K; Harper: kick in momentum
  double k2 = 0.0;  // Harper only: kick in position

  static ClassicalMapSpec standard(double k) { return {MapFamily::Standard, k, k}; }
  static ClassicalMapSpec harper(double k) { return {MapFamily::Harper, k, k}; }
  static ClassicalMapSpec harper(double k1, double k2) { return {MapFamily::Harper, k1, k2}; }

  void validate() const;
};

// p' = p + K/(2 pi) sin(2 pi x), x' = x + p'  (mod 1)
PhasePoint step_standard(PhasePoint point, double k);

// p' = p - K1 sin(2 pi x), x' = x + K2 sin(2 pi p')  (mod 1)
PhasePoint step_harper(PhasePoint point, double k1, double k2);

PhasePoint step(const ClassicalMapSpec& spec, PhasePoint point);

/// Tangent map d(x', p')/d(x, p) at `point`, rows (x', p'), columns (x, p).
Eigen::Matrix2d jacobian(const ClassicalMapSpec& spec, PhasePoint point);

/// Largest Lyapunov exponent (per iteration) from the tangent-map product
/// with renormalization at every step. Requires n_steps >= 100.
double lyapunov_exponent(const ClassicalMapSpec& spec, PhasePoint point, int n_steps);

struct TrajectorySample {
  int t;
  PhasePoint point;
};

std::vector<TrajectorySample> trajectory(const ClassicalMapSpec& spec, PhasePoint start, int n_steps);

struct AreaSamplerConfig {
  int n_tot = 35000;
  std::vector<int> t_max_list;
  double delta = 1e-2;
  std::uint64_t seed = 1;
  int workers = 1;

  /// Window of `count` contiguous caps starting at `first`.
  static std::vector<int> window(int first, int count = 20);

  /// Defaults per family: standard map t_max 490..509 with delta 2e-3,
  /// Harper t_max 90..109 with delta 1e-2.
  static AreaSamplerConfig defaults_for(MapFamily family);

  void validate() const;
};

struct AreaRatio {
  double r_ch = 0.0;
  double r_reg = 1.0;
  double stderr_ = 0.0;           // binomial standard error of r_ch
  std::vector<double> per_t_max;  // r_ch for each entry of t_max_list
};

/// Return-time Monte Carlo estimate of the chaotic phase-space fraction:
/// an initial condition counts as chaotic if its orbit has not come back
/// within `delta` of the start after t_max iterations (t = 0 excluded).
AreaRatio chaotic_area_ratio(const ClassicalMapSpec& spec, const AreaSamplerConfig& cfg);

/// First t >= 1 at which the orbit is within `delta` of `start`, or -1 if
/// that does not happen within `t_cap` steps.
int first_return_time(const ClassicalMapSpec& spec, PhasePoint start, double delta, int t_cap);

}  // namespace otoc
