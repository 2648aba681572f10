#include "otoc/spectral_indicators.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace otoc {

namespace {

// Chebyshev polynomials T_0..T_degree evaluated at u in [-1, 1].
void chebyshev_row(double u, int degree, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
  out(0) = 1.0;
  if (degree >= 1) out(1) = u;
  for (int k = 2; k <= degree; ++k) out(k) = 2.0 * u * out(k - 1) - out(k - 2);
}

struct CleanSpacings {
  RealVector values;  // unit mean after dropping degenerate entries
  RealVector logs;
  int dropped = 0;
};

CleanSpacings clean(const RealVector& spacings, Index minimum) {
  if (spacings.size() < minimum)
    throw std::invalid_argument("spacing fit needs at least " + std::to_string(minimum) + " spacings");
  if ((spacings.array() < 0.0).any()) throw std::invalid_argument("spacings must be nonnegative");
  const double mean = spacings.mean();
  if (!(mean > 0.0)) throw std::invalid_argument("spacings have zero mean");
  std::vector<double> kept;
  kept.reserve(static_cast<std::size_t>(spacings.size()));
  for (Index i = 0; i < spacings.size(); ++i)
    if (spacings(i) > kDegenerateSpacing * mean) kept.push_back(spacings(i));
  if (static_cast<Index>(kept.size()) < 2) throw std::invalid_argument("all spacings are degenerate");

  CleanSpacings out;
  out.dropped = static_cast<int>(spacings.size() - static_cast<Index>(kept.size()));
  out.values = Eigen::Map<RealVector>(kept.data(), static_cast<Index>(kept.size()));
  out.values /= out.values.mean();
  out.logs = out.values.array().log();
  return out;
}

// Minimizes `nll` on [lo, hi]: coarse grid, then Brent inside the bracket
// around the best grid point.
template <typename F>
FitResult minimize_1d(F nll, double lo, double hi, int grid) {
  double best_x = lo, best_f = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / grid;
  for (int i = 0; i <= grid; ++i) {
    double x = lo + step * i;
    double f = nll(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  std::uintmax_t iterations = 200;
  auto [x, f] = boost::math::tools::brent_find_minima(nll, a, b, 40, iterations);
  if (iterations >= 200) throw std::runtime_error("1-D likelihood optimizer did not converge");
  FitResult result;
  if (f <= best_f) {
    result.parameter = x;
    result.log_likelihood = -f;
  } else {
    result.parameter = best_x;
    result.log_likelihood = -best_f;
  }
  // Newton polish on the central-difference derivative.
  const double h = 1e-5;
  double xn = result.parameter;
  for (int it = 0; it < 30 && xn - h > a && xn + h < b; ++it) {
    const double fp = nll(xn + h), f0 = nll(xn), fm = nll(xn - h);
    const double g = (fp - fm) / (2.0 * h);
    const double curv = (fp - 2.0 * f0 + fm) / (h * h);
    if (!(curv > 0.0)) break;
    const double dx = g / curv;
    if (std::abs(dx) > step) break;
    xn -= dx;
    if (std::abs(dx) < 1e-13 * std::max(1.0, std::abs(xn))) break;
  }
  if (xn > a && xn < b) {
    const double fn = nll(xn);
    if (fn <= -result.log_likelihood + 1e-9 * std::max(1.0, std::abs(fn))) {
      result.parameter = xn;
      result.log_likelihood = -fn;
    }
  }
  result.iterations = static_cast<int>(iterations) + grid + 1;
  result.at_boundary = std::abs(result.parameter - lo) < 1e-6 || std::abs(result.parameter - hi) < 1e-6;
  return result;
}

}  // namespace

RealVector unfold(const RealVector& levels, double trim, int degree) {
  const Index n = levels.size();
  if (n < 50) throw std::invalid_argument("unfold needs at least 50 levels");
  if (!(trim >= 0.0 && trim < 0.5)) throw std::invalid_argument("unfold trim must lie in [0, 0.5)");
  if (degree < 1) throw std::invalid_argument("unfold degree must be >= 1");
  for (Index i = 1; i < n; ++i)
    if (levels(i) < levels(i - 1)) throw std::invalid_argument("unfold needs sorted levels");

  const Index cut = static_cast<Index>(std::floor(trim * static_cast<double>(n)));
  const Index first = cut, count = n - 2 * cut;
  if (count <= degree + 2) throw std::invalid_argument("too few levels left after trimming");

  const double lo = levels(first), hi = levels(first + count - 1);
  const double span = hi > lo ? hi - lo : 1.0;
  RealMatrix design(count, degree + 1);
  RealVector rank(count);
  for (Index i = 0; i < count; ++i) {
    double u = 2.0 * (levels(first + i) - lo) / span - 1.0;
    chebyshev_row(u, degree, design.row(i));
    rank(i) = static_cast<double>(first + i);
  }
  RealVector spacings;
  for (int d = degree; d >= 1; --d) {
    auto cols = design.leftCols(d + 1);
    RealVector coeffs = cols.colPivHouseholderQr().solve(rank);
    RealVector mapped = cols * coeffs;
    spacings = mapped.tail(count - 1) - mapped.head(count - 1);
    if ((spacings.array() >= 0.0).all()) break;
  }
  const double mean = spacings.mean();
  if (!(mean > 0.0)) throw std::runtime_error("unfolding produced a nonpositive mean spacing");
  return spacings / mean;
}

RealVector unfold_phases(const RealVector& phases) {
  const Index n = phases.size();
  if (n < 2) throw std::invalid_argument("unfold_phases needs at least 2 phases");
  RealVector s(n);
  for (Index i = 0; i + 1 < n; ++i) s(i) = phases(i + 1) - phases(i);
  s(n - 1) = phases(0) + kTwoPi - phases(n - 1);
  if ((s.array() < 0.0).any()) throw std::invalid_argument("unfold_phases needs sorted phases in [0, 2pi)");
  return s * (static_cast<double>(n) / kTwoPi);
}

double brody_normalization(double beta) { return std::pow(std::tgamma((beta + 2.0) / (beta + 1.0)), beta + 1.0); }

double brody_pdf(double s, double beta) {
  const double b = brody_normalization(beta);
  return (beta + 1.0) * b * std::pow(s, beta) * std::exp(-b * std::pow(s, beta + 1.0));
}

double berry_robnik_pdf(double s, double rho) {
  const double reg = 1.0 - rho;
  const double gauss = std::exp(-reg * s - 0.25 * kPi * rho * rho * s * s);
  return (2.0 * reg * rho + 0.5 * kPi * rho * rho * rho * s) * gauss +
         reg * reg * std::erfc(0.5 * std::sqrt(kPi) * rho * s) * std::exp(-reg * s);
}

FitResult brody_fit(const RealVector& spacings) {
  const CleanSpacings data = clean(spacings, 100);
  const double n = static_cast<double>(data.values.size());
  const double sum_log = data.logs.sum();
  auto nll = [&](double beta) {
    const double log_b = (beta + 1.0) * std::lgamma((beta + 2.0) / (beta + 1.0));
    const double b = std::exp(log_b);
    double sum_pow = (data.logs * (beta + 1.0)).array().exp().sum();
    return -(n * (std::log(beta + 1.0) + log_b) + beta * sum_log - b * sum_pow);
  };
  FitResult result = minimize_1d(nll, -0.99, 2.0, 60);
  result.value = result.parameter;
  result.dropped = data.dropped;
  return result;
}

FitResult berry_robnik_fit(const RealVector& spacings) {
  const CleanSpacings data = clean(spacings, 100);
  auto nll = [&](double rho) {
    double total = 0.0;
    for (Index i = 0; i < data.values.size(); ++i) {
      double p = berry_robnik_pdf(data.values(i), rho);
      total += std::log(std::max(p, 1e-300));
    }
    return -total;
  };
  FitResult result = minimize_1d(nll, 0.0, 1.0, 40);
  result.value = result.parameter * result.parameter;
  result.dropped = data.dropped;
  return result;
}

RatioResult ratio_eta(const RealVector& levels) {
  const Index n = levels.size();
  if (n < 3) throw std::invalid_argument("ratio_eta needs at least 3 levels");
  RealVector s = levels.tail(n - 1) - levels.head(n - 1);
  if ((s.array() < 0.0).any()) throw std::invalid_argument("ratio_eta needs sorted levels");
  const double threshold = kDegenerateSpacing * s.mean();

  RatioResult out;
  double sum = 0.0;
  for (Index i = 0; i + 1 < s.size(); ++i) {
    if (s(i) <= threshold || s(i + 1) <= threshold) {
      ++out.excluded;
      continue;
    }
    double r = s(i + 1) / s(i);
    sum += std::min(r, 1.0 / r);
    ++out.used;
  }
  if (out.used == 0) throw std::invalid_argument("ratio_eta: every spacing is degenerate");
  out.mean_ratio = sum / out.used;
  out.eta = (out.mean_ratio - kRatioPoisson) / (kRatioWignerDyson - kRatioPoisson);
  return out;
}

}  // namespace otoc
