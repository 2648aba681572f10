#pragma once

#include "otoc/types.hpp"

#include <vector>

namespace otoc {

/// Cutoff that drops the first `fraction` of the series duration.
double default_t0(const OtocSeries& series, double fraction = 0.2);

/// Relative standard deviation sqrt(<C^2> - <C>^2) / <C> over samples with
/// t > t0. Needs >= 100 samples; rejects a window mean <= 1e-12.
double sigma_otoc(const OtocSeries& series, double t0);

struct SpectrumOptions {
  int detrend_window = 0;  // centered moving-average width in samples; 0 = off
  bool hann = false;
};

/// One-sided normalized power of C(t > t0) - <C(t > t0)>, DC bin excluded.
struct OtocSpectrum {
  RealVector omega;  // angular frequencies of bins 1..N/2
  RealVector power;  // sums to 1
  double d_omega = 0.0;
};

OtocSpectrum otoc_power_spectrum(const OtocSeries& series, double t0, const SpectrumOptions& opts = {});

/// Participation ratio of the normalized one-sided OTOC power spectrum, in
/// bins: 1 for a single line, up to N/2. Needs >= 256 samples after t0.
double xi_otoc(const OtocSeries& series, double t0, const SpectrumOptions& opts = {});

/// Centered moving average with a window that shrinks at the edges.
RealVector moving_average(const RealVector& values, int window);

enum class NormalizeMode {
  Max,     // v / max(v)
  InvMin,  // (1/v) / (1/min(v))
};

std::vector<double> normalize_sweep(const std::vector<double>& values, NormalizeMode mode);

/// Spearman rank correlation with average ranks for ties. Needs >= 3 pairs.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace otoc
