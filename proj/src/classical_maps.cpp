#include "otoc/classical_maps.hpp"

#include "otoc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace otoc {

const char* to_string(MapFamily family) {
  return family == MapFamily::Standard ? "standard" : "harper";
}

MapFamily map_family_from_string(const std::string& name) {
  if (name == "standard" || name == "sm") return MapFamily::Standard;
  if (name == "harper" || name == "hm") return MapFamily::Harper;
  throw std::invalid_argument("unknown map family: " + name);
}

double wrap_unit(double v) {
  double r = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.0
  return r >= 1.0 ? 0.0 : r;
}

PhasePoint wrap(PhasePoint point) { return {wrap_unit(point.x), wrap_unit(point.p)}; }

double torus_distance(PhasePoint a, PhasePoint b) {
  double dx = std::abs(a.x - b.x);
  double dp = std::abs(a.p - b.p);
  dx = std::min(dx, 1.0 - dx);
  dp = std::min(dp, 1.0 - dp);
  return std::hypot(dx, dp);
}

void ClassicalMapSpec::validate() const {
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw std::invalid_argument("map kick strength must be >= 0");
}

PhasePoint step_standard(PhasePoint point, double k) {
  double p = wrap_unit(point.p + k / kTwoPi * std::sin(kTwoPi * point.x));
  double x = wrap_unit(point.x + p);
  return {x, p};
}

PhasePoint step_harper(PhasePoint point, double k1, double k2) {
  double p = wrap_unit(point.p - k1 * std::sin(kTwoPi * point.x));
  double x = wrap_unit(point.x + k2 * std::sin(kTwoPi * p));
  return {x, p};
}

PhasePoint step(const ClassicalMapSpec& spec, PhasePoint point) {
  return spec.family == MapFamily::Standard ? step_standard(point, spec.k1)
                                            : step_harper(point, spec.k1, spec.k2);
}

Eigen::Matrix2d jacobian(const ClassicalMapSpec& spec, PhasePoint point) {
  Eigen::Matrix2d jac;
  if (spec.family == MapFamily::Standard) {
    double c = spec.k1 * std::cos(kTwoPi * point.x);
    jac << 1.0 + c, 1.0,
           c,       1.0;
  } else {
    double a = -kTwoPi * spec.k1 * std::cos(kTwoPi * point.x);
    double p_next = wrap_unit(point.p - spec.k1 * std::sin(kTwoPi * point.x));
    double b = kTwoPi * spec.k2 * std::cos(kTwoPi * p_next);
    jac << 1.0 + a * b, b,
           a,           1.0;
  }
  return jac;
}

double lyapunov_exponent(const ClassicalMapSpec& spec, PhasePoint point, int n_steps) {
  if (n_steps < 100) throw std::invalid_argument("lyapunov_exponent needs n_steps >= 100");
  spec.validate();
  Eigen::Vector2d tangent(1.0, 0.3);
  tangent.normalize();
  double log_growth = 0.0;
  PhasePoint current = wrap(point);
  for (int t = 0; t < n_steps; ++t) {
    tangent = jacobian(spec, current) * tangent;
    double norm = tangent.norm();
    log_growth += std::log(norm);
    tangent /= norm;
    current = step(spec, current);
  }
  return log_growth / n_steps;
}

std::vector<TrajectorySample> trajectory(const ClassicalMapSpec& spec, PhasePoint start, int n_steps) {
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  PhasePoint current = wrap(start);
  out.push_back({0, current});
  for (int t = 1; t <= n_steps; ++t) {
    current = step(spec, current);
    out.push_back({t, current});
  }
  return out;
}

std::vector<int> AreaSamplerConfig::window(int first, int count) {
  std::vector<int> caps(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) caps[static_cast<std::size_t>(i)] = first + i;
  return caps;
}

AreaSamplerConfig AreaSamplerConfig::defaults_for(MapFamily family) {
  AreaSamplerConfig cfg;
  if (family == MapFamily::Standard) {
    cfg.t_max_list = window(490);
    cfg.delta = 2e-3;
  } else {
    cfg.t_max_list = window(90);
    cfg.delta = 1e-2;
  }
  return cfg;
}

void AreaSamplerConfig::validate() const {
  if (n_tot < 1) throw std::invalid_argument("n_tot must be >= 1");
  if (t_max_list.empty()) throw std::invalid_argument("t_max_list must be nonempty");
  for (int t : t_max_list)
    if (t < 1) throw std::invalid_argument("every t_max must be >= 1");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5)");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

int first_return_time(const ClassicalMapSpec& spec, PhasePoint start, double delta, int t_cap) {
  const double delta2 = delta * delta;
  PhasePoint current = start;
  for (int t = 1; t <= t_cap; ++t) {
    current = step(spec, current);
    double dx = std::abs(current.x - start.x);
    double dp = std::abs(current.p - start.p);
    dx = std::min(dx, 1.0 - dx);
    dp = std::min(dp, 1.0 - dp);
    if (dx * dx + dp * dp < delta2) return t;
  }
  return -1;
}

AreaRatio chaotic_area_ratio(const ClassicalMapSpec& spec, const AreaSamplerConfig& cfg) {
  spec.validate();
  cfg.validate();
  const int t_cap = *std::max_element(cfg.t_max_list.begin(), cfg.t_max_list.end());
  const auto n = static_cast<std::size_t>(cfg.n_tot);

  // Return time per initial condition; -1 means "not within t_cap".
  std::vector<int> returns(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(cfg.seed, i);
      PhasePoint start{rng.uniform(), rng.uniform()};
      returns[i] = first_return_time(spec, start, cfg.delta, t_cap);
    }
  };

  const auto workers = static_cast<std::size_t>(std::min<int>(cfg.workers, cfg.n_tot));
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }

  AreaRatio result;
  result.per_t_max.reserve(cfg.t_max_list.size());
  for (int t_max : cfg.t_max_list) {
    long not_returned = std::count_if(returns.begin(), returns.end(),
                                      [t_max](int t) { return t < 0 || t > t_max; });
    result.per_t_max.push_back(static_cast<double>(not_returned) / static_cast<double>(cfg.n_tot));
  }
  double sum = 0.0;
  for (double r : result.per_t_max) sum += r;
  result.r_ch = sum / static_cast<double>(result.per_t_max.size());
  result.r_reg = 1.0 - result.r_ch;
  result.stderr_ = std::sqrt(result.r_ch * result.r_reg / static_cast<double>(cfg.n_tot));
  return result;
}

}  // namespace otoc
