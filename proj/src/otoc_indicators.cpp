#include "otoc/otoc_indicators.hpp"

#include "otoc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otoc {

namespace {

RealVector window_after(const OtocSeries& series, double t0) {
  Index first = 0;
  while (first < series.size() && !(series.times(first) > t0)) ++first;
  return series.values.tail(series.size() - first);
}

}  // namespace

double default_t0(const OtocSeries& series, double fraction) {
  if (series.size() == 0) throw std::invalid_argument("empty OTOC series");
  const double start = series.times(0);
  const double end = series.times(series.size() - 1);
  return start + fraction * (end - start);
}

double sigma_otoc(const OtocSeries& series, double t0) {
  const RealVector w = window_after(series, t0);
  if (w.size() < 100) throw std::invalid_argument("sigma_otoc needs at least 100 samples after t0");
  const double mean = w.mean();
  if (!(mean > 1e-12)) throw std::invalid_argument("sigma_otoc: window mean is zero, relative deviation undefined");
  const double var = (w.array() - mean).square().mean();
  return std::sqrt(var) / mean;
}

RealVector moving_average(const RealVector& values, int window) {
  const Index n = values.size();
  if (window <= 1 || n == 0) return values;
  RealVector prefix(n + 1);
  prefix(0) = 0.0;
  for (Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + values(i);
  const Index half = window / 2;
  RealVector out(n);
  for (Index i = 0; i < n; ++i) {
    Index lo = std::max<Index>(0, i - half);
    Index hi = std::min<Index>(n, i + half + 1);
    out(i) = (prefix(hi) - prefix(lo)) / static_cast<double>(hi - lo);
  }
  return out;
}

OtocSpectrum otoc_power_spectrum(const OtocSeries& series, double t0, const SpectrumOptions& opts) {
  RealVector w = window_after(series, t0);
  const Index n = w.size();
  if (n < 256) throw std::invalid_argument("xi_otoc needs at least 256 samples after t0");
  const double scale = w.cwiseAbs().maxCoeff();
  if (opts.detrend_window > 1) w -= moving_average(w, opts.detrend_window);
  w.array() -= w.mean();
  if (!(w.cwiseAbs().maxCoeff() > 1e-12 * scale))
    throw std::invalid_argument("xi_otoc: signal vanishes after mean/trend removal");
  if (opts.hann) {
    for (Index i = 0; i < n; ++i)
      w(i) *= 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
  }

  const ComplexVector bins = fft::real_forward(w);
  const Index m = bins.size() - 1;  // drop DC
  OtocSpectrum out;
  out.power = bins.tail(m).cwiseAbs2();
  out.power /= out.power.sum();
  out.d_omega = kTwoPi / (static_cast<double>(n) * series.dt);
  out.omega = RealVector::LinSpaced(m, 1.0, static_cast<double>(m)) * out.d_omega;
  return out;
}

double xi_otoc(const OtocSeries& series, double t0, const SpectrumOptions& opts) {
  const OtocSpectrum spec = otoc_power_spectrum(series, t0, opts);
  return 1.0 / spec.power.squaredNorm();
}

std::vector<double> normalize_sweep(const std::vector<double>& values, NormalizeMode mode) {
  if (values.empty()) throw std::invalid_argument("normalize_sweep needs a nonempty list");
  std::vector<double> out(values.size());
  if (mode == NormalizeMode::Max) {
    const double vmax = *std::max_element(values.begin(), values.end());
    if (!(vmax > 0.0)) throw std::invalid_argument("normalize_sweep(max) needs a positive maximum");
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / vmax;
  } else {
    for (double v : values)
      if (!(v > 0.0)) throw std::invalid_argument("normalize_sweep(inv_min) needs positive entries");
    const double vmin = *std::min_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = vmin / values[i];
  }
  return out;
}

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (a.size() < 3) throw std::invalid_argument("spearman_rho needs at least 3 pairs");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    RealVector r(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r(static_cast<Index>(order[k])) = avg;
      i = j + 1;
    }
    return r;
  };
  RealVector ra = ranks(a), rb = ranks(b);
  ra.array() -= ra.mean();
  rb.array() -= rb.mean();
  const double denom = std::sqrt(ra.squaredNorm() * rb.squaredNorm());
  if (!(denom > 0.0)) throw std::invalid_argument("spearman_rho: constant input");
  return ra.dot(rb) / denom;
}

}  // namespace otoc
