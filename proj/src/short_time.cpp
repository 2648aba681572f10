#include "otoc/short_time.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace otoc {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

void require_separation(int l) {
  if (l < 1) throw std::invalid_argument("HBC prediction needs l >= 1");
}

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("HBC prediction needs t >= 0");
}

}  // namespace

double hbc_heisenberg(int l, double t) {
  require_separation(l);
  require_time(t);
  const double f = factorial(l);
  return std::pow(t, 2 * l) / (2.0 * f * f);
}

double hbc_tilted(int l, double field_b, double theta, double t) {
  require_separation(l);
  require_time(t);
  const int n = 2 * l + 1;
  const double f = factorial(n);
  return std::pow(field_b * std::sin(theta) * t, 2 * n) / (2.0 * f * f);
}

double hbc_xxz(int l, double lambda, double t) {
  require_separation(l);
  require_time(t);
  if (lambda < 0.0) throw std::invalid_argument("HBC prediction needs lambda >= 0");
  if (l == 1 || lambda == 0.0) return hbc_heisenberg(l, t);
  const double f = factorial(l - 1);
  return std::pow(lambda * t, 2 * (l - 1)) / (2.0 * f * f);
}

int hbc_exponent(const SpinChainSpec& spec, int l) {
  require_separation(l);
  switch (spec.family) {
    case SpinFamily::RandomFieldHeisenberg: return 2 * l;
    case SpinFamily::TiltedIsing: return 2 * (2 * l + 1);
    case SpinFamily::PerturbedXXZ: return (l == 1 || spec.lambda == 0.0) ? 2 * l : 2 * (l - 1);
  }
  return 0;
}

double hbc_prediction(const SpinChainSpec& spec, int l, double t) {
  switch (spec.family) {
    case SpinFamily::RandomFieldHeisenberg: return hbc_heisenberg(l, t);
    case SpinFamily::TiltedIsing: return hbc_tilted(l, spec.field_b, spec.theta, t);
    case SpinFamily::PerturbedXXZ: return hbc_xxz(l, spec.lambda, t);
  }
  return 0.0;
}

HbcLeadingTerm hbc_leading_term(const SpinChainSpec& spec, int l, int max_order) {
  if (l < 1 || l > spec.sites - 1) throw std::invalid_argument("hbc_leading_term: separation out of range");
  const SectorBasis basis = basis_for(spec);
  const RealMatrix h = build_hamiltonian(spec, basis);
  const RealVector zl = basis.sigma_z(l);
  const double dim = static_cast<double>(basis.dim());
  const double scale = 2.0 * h.cwiseAbs().rowwise().sum().maxCoeff();  // bounds ||ad_H||

  RealMatrix a = basis.sigma_z(0).asDiagonal();
  double norm_k = 1.0;
  for (int k = 1; k <= max_order; ++k) {
    a = (h * a - a * h).eval();
    norm_k *= scale;
    // [A, diag(z)]_ij = A_ij (z_j - z_i)
    const RealMatrix c = a.array() * (zl.transpose().replicate(a.rows(), 1) - zl.replicate(1, a.cols())).array();
    const double sq = c.squaredNorm();
    if (std::sqrt(sq) > 1e-10 * norm_k * std::sqrt(dim)) {
      const double f = factorial(k);
      return {k, sq / (2.0 * dim * f * f)};
    }
  }
  return {};
}

PowerLawFit fit_power_law(const OtocSeries& series, double t_min, double t_max) {
  std::vector<double> xs, ys;
  for (Index i = 0; i < series.size(); ++i) {
    const double t = series.times(i);
    if (t < t_min || t > t_max) continue;
    const double c = series.values(i);
    if (!(c > 0.0) || !(t > 0.0))
      throw std::invalid_argument("fit_power_law: nonpositive sample at t = " + std::to_string(t));
    xs.push_back(std::log(t));
    ys.push_back(std::log(c));
  }
  const auto n = static_cast<Index>(xs.size());
  if (n < 10) throw std::invalid_argument("fit_power_law needs at least 10 points in the window");

  Eigen::Map<RealVector> x(xs.data(), n), y(ys.data(), n);
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  fit.t_min = std::exp(x.minCoeff());
  fit.t_max = std::exp(x.maxCoeff());
  fit.points = static_cast<int>(n);
  fit.residual = std::sqrt((y.array() - intercept - fit.exponent * x.array()).square().mean());
  return fit;
}

ShortTimeReport short_time_check(const SpinChainSpec& spec, int l, const ShortTimeOptions& opts) {
  if (l < 1 || l > spec.sites - 1) throw std::invalid_argument("short_time_check: separation out of range");
  if (!(opts.c_floor > 0.0 && opts.prediction_cap > opts.c_floor))
    throw std::invalid_argument("short_time_check: invalid prediction window");
  const int exponent = hbc_exponent(spec, l);
  const double amplitude = hbc_prediction(spec, l, 1.0);
  if (!(amplitude > 0.0)) throw std::invalid_argument("short_time_check: HBC term vanishes for this model");
  const HbcLeadingTerm leading = hbc_leading_term(spec, l);
  if (leading.order == 0) throw std::runtime_error("short_time_check: no nonzero nested commutator found");
  // a t^{2n} = C  =>  t = (C / a)^{1/2n}
  const double power = 2.0 * leading.order;
  const double t_lo = std::pow(opts.c_floor / leading.coefficient, 1.0 / power);
  const double t_hi = std::pow(opts.prediction_cap / leading.coefficient, 1.0 / power);

  const SectorBasis basis = basis_for(spec);
  const SpinDiagonalization eig = diagonalize(build_hamiltonian(spec, basis));

  ShortTimeReport report;
  report.l = l;
  report.predicted_exponent = exponent;
  report.leading = leading;
  OtocSeries& series = report.series;
  series.times = RealVector::LinSpaced(opts.points, std::log(t_lo), std::log(t_hi)).array().exp();
  series.values = spin_otoc_at(eig, basis, l, series.times);
  series.dt = 0.0;
  series.metadata["l"] = std::to_string(l);
  series.metadata["grid"] = "log";

  report.fit = fit_power_law(series, t_lo * (1 - 1e-12), t_hi * (1 + 1e-12));
  report.prefactor_ratio = report.fit.prefactor / amplitude;
  report.exact_ratio = report.fit.prefactor / leading.coefficient;
  return report;
}

}  // namespace otoc
