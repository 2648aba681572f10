#pragma once

#include "otoc/spin_chains.hpp"
#include "otoc/types.hpp"

namespace otoc {

// Leading nested-commutator (HBC) term of C_zz(l, t) at short times.

/// t^{2l} / (2 (l!)^2), l >= 1.
double hbc_heisenberg(int l, double t);

/// (B sin theta)^{2(2l+1)} t^{2(2l+1)} / (2 ((2l+1)!)^2), l >= 1.
double hbc_tilted(int l, double field_b, double theta, double t);

/// t^{2l} / (2 (l!)^2) when l = 1 or lambda = 0, otherwise
/// lambda^{2(l-1)} t^{2(l-1)} / (2 ((l-1)!)^2).
double hbc_xxz(int l, double lambda, double t);

/// Power of t in the leading term for the given chain and separation.
int hbc_exponent(const SpinChainSpec& spec, int l);

double hbc_prediction(const SpinChainSpec& spec, int l, double t);

/// Exact leading term a t^{2n} of C_zz(l, t), from dense nested commutators
/// ad_H^k(s0) for k = 1..max_order; order = 0 if none survives.
struct HbcLeadingTerm {
  int order = 0;             // n, so C ~ a t^{2n}
  double coefficient = 0.0;  // a = ||[ad_H^n(s0), sl]||^2 / (2 D (n!)^2)
};

HbcLeadingTerm hbc_leading_term(const SpinChainSpec& spec, int l, int max_order = 9);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double residual = 0.0;  // RMS of log-residuals
  int points = 0;
};

/// Least-squares line through (log t, log C) for samples with
/// t_min <= t <= t_max. Needs >= 10 points, all with C > 0.
PowerLawFit fit_power_law(const OtocSeries& series, double t_min, double t_max);

struct ShortTimeOptions {
  double c_floor = 1e-22;        // smallest leading-term C in the fit window
  double prediction_cap = 1e-12; // largest leading-term C in the fit window
  int points = 40;               // log-spaced samples in the window
};

struct ShortTimeReport {
  int l = 1;
  int predicted_exponent = 0;    // closed-form HBC exponent
  HbcLeadingTerm leading;        // exact leading term
  PowerLawFit fit;
  double prefactor_ratio = 0.0;  // fitted prefactor / closed-form HBC prefactor
  double exact_ratio = 0.0;      // fitted prefactor / exact leading coefficient
  OtocSeries series;             // samples the fit used
};

/// Evaluates the exact OTOC on a log-spaced grid chosen where the exact
/// leading term lies in [c_floor, prediction_cap], and fits the power law there.
ShortTimeReport short_time_check(const SpinChainSpec& spec, int l, const ShortTimeOptions& opts = {});

}  // namespace otoc
