#pragma once

#include "otoc/types.hpp"

#include <cmath>
#include <stdexcept>

namespace otoc {

// Mean of min(r, 1/r) for Poisson and Wigner-Dyson statistics, as used to
// normalize eta.
inline constexpr double kRatioPoisson = 0.386;
inline constexpr double kRatioWignerDyson = 0.586;
// Large-N GOE value, reported next to eta for reference.
inline constexpr double kRatioGoe = 0.5307;

/// Spacings below this fraction of the mean spacing count as degenerate.
inline constexpr double kDegenerateSpacing = 1e-12;

/// Unit-mean spacings from sorted energies: discards `trim` of the levels at
/// each edge, maps the rest through a degree-`degree` polynomial fit of the
/// cumulative level count, and rescales to mean 1. If the fit is not
/// monotone over the kept levels the degree is lowered until it is.
/// Needs >= 50 levels.
RealVector unfold(const RealVector& levels, double trim = 0.1, int degree = 7);

/// Exact unfolding for eigenphases of a D x D unitary: s = dphi * D / 2pi,
/// including the wrap-around gap, so the D spacings have mean exactly 1.
RealVector unfold_phases(const RealVector& sorted_phases);

struct FitResult {
  double value = 0.0;          // beta for Brody, rho^2 for Berry-Robnik
  double parameter = 0.0;      // fitted family parameter (beta or rho)
  double log_likelihood = 0.0;
  int iterations = 0;
  int dropped = 0;             // degenerate spacings removed before fitting
  bool at_boundary = false;
};

double brody_normalization(double beta);
double brody_pdf(double s, double beta);
double berry_robnik_pdf(double s, double rho);

/// Maximum-likelihood Brody parameter on (-0.99, 2]. Needs >= 100 spacings.
FitResult brody_fit(const RealVector& spacings);

/// Maximum-likelihood Berry-Robnik rho on [0, 1]; FitResult::value is rho^2.
FitResult berry_robnik_fit(const RealVector& spacings);

struct RatioResult {
  double mean_ratio = 0.0;  // mean of min(r, 1/r)
  double eta = 0.0;
  int used = 0;
  int excluded = 0;         // ratios touching a degenerate spacing
};

/// Ratio statistic on raw (not unfolded) spacings. Needs >= 3 levels.
RatioResult ratio_eta(const RealVector& sorted_levels);

/// Per-eigenstate participation ratio (sum_j |a_ij|^4)^-1, one entry per column.
template <typename Derived>
RealVector participation_ratios(const Eigen::MatrixBase<Derived>& eigvecs) {
  RealVector out(eigvecs.cols());
  for (Index i = 0; i < eigvecs.cols(); ++i) {
    double sum4 = 0.0;
    for (Index j = 0; j < eigvecs.rows(); ++j) {
      double a2 = std::norm(eigvecs(j, i));
      sum4 += a2 * a2;
    }
    out(i) = 1.0 / sum4;
  }
  return out;
}

/// Mean participation ratio over the central `center_fraction` of the
/// eigenstates (columns ordered by energy), divided by D/3.
template <typename Derived>
double eigenstate_ipr(const Eigen::MatrixBase<Derived>& eigvecs, double center_fraction = 1.0) {
  if (!(center_fraction > 0.0 && center_fraction <= 1.0))
    throw std::invalid_argument("center_fraction must lie in (0, 1]");
  const Index n = eigvecs.cols();
  const Index dim = eigvecs.rows();
  Index count = std::max<Index>(1, static_cast<Index>(std::llround(center_fraction * static_cast<double>(n))));
  count = std::min(count, n);
  const Index first = (n - count) / 2;
  RealVector xi = participation_ratios(eigvecs.middleCols(first, count));
  return xi.mean() / (static_cast<double>(dim) / 3.0);
}

}  // namespace otoc
