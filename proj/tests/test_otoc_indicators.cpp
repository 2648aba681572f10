#include "doctest.h"
#include "oracles.hpp"

#include "otoc/otoc_indicators.hpp"

using namespace otoc;

namespace {

OtocSeries make_series(const RealVector& values, double dt) {
  OtocSeries s;
  s.values = values;
  s.dt = dt;
  s.times = RealVector::LinSpaced(values.size(), 0.0, dt * double(values.size() - 1));
  return s;
}

template <typename F>
OtocSeries sampled(Index n, double dt, F f) {
  RealVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = f(double(i) * dt);
  return make_series(v, dt);
}

}  // namespace

TEST_CASE("sigma otoc") {
  auto flat = sampled(500, 1.0, [](double) { return 0.8; });
  CHECK(sigma_otoc(flat, 0.0) == doctest::Approx(0.0));

  const double m = 5.0, a = 0.6, w = kTwoPi / 37.0;
  auto sine = sampled(37 * 200, 1.0, [&](double t) { return m + a * std::sin(w * t); });
  CHECK(sigma_otoc(sine, -1.0) == doctest::Approx(a / (std::sqrt(2.0) * m)).epsilon(0.01));

  auto scaled = sine;
  scaled.values *= 17.0;
  CHECK(std::abs(sigma_otoc(scaled, 100.0) - sigma_otoc(sine, 100.0)) < 1e-12);

  CHECK_THROWS_AS(sigma_otoc(sampled(50, 1.0, [](double) { return 1.0; }), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_otoc(sampled(500, 1.0, [](double) { return 0.0; }), 0.0), std::invalid_argument);
}

TEST_CASE("default cutoff") {
  auto s = sampled(101, 0.5, [](double) { return 1.0; });
  CHECK(default_t0(s) == doctest::Approx(10.0));
  CHECK(default_t0(s, 0.5) == doctest::Approx(25.0));
}

TEST_CASE("xi otoc of line spectra") {
  const Index n = 1024;
  const double dt = 0.1;
  // After t0 = -1 the window holds all n samples; bin j sits at 2 pi j / (n dt).
  auto line = [&](double bin) { return kTwoPi * bin / (double(n) * dt); };
  auto one = sampled(n, dt, [&](double t) { return 2.0 + 0.3 * std::cos(line(37) * t + 0.4); });
  CHECK(xi_otoc(one, -1.0) == doctest::Approx(1.0).epsilon(1e-9));

  auto two = sampled(n, dt, [&](double t) { return 2.0 + 0.3 * std::cos(line(37) * t) + 0.3 * std::sin(line(151) * t); });
  CHECK(xi_otoc(two, -1.0) == doctest::Approx(2.0).epsilon(1e-9));

  // Off-grid incommensurate lines leak a little with a Hann window.
  auto off = sampled(8192, dt, [&](double t) { return 1.0 + std::sin(1.0 * t) + std::sin(std::sqrt(2.0) * 2.3 * t); });
  SpectrumOptions hann;
  hann.hann = true;
  const double xi_off = xi_otoc(off, -1.0, hann);
  CHECK(xi_off > 2.0);
  CHECK(xi_off < 8.0);

  auto spec = otoc_power_spectrum(one, -1.0);
  CHECK(spec.power.size() == n / 2);
  CHECK(spec.power.sum() == doctest::Approx(1.0));
  Index peak;
  spec.power.maxCoeff(&peak);
  CHECK(spec.omega(peak) == doctest::Approx(line(37)));
}

TEST_CASE("xi otoc of white noise matches exponential power statistics") {
  const Index n = 4096, bins = n / 2;
  CounterRng rng(77);
  double xi_sum = 0.0, oracle_sum = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    RealVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = oracle::normal(rng);
    xi_sum += xi_otoc(make_series(v, 1.0), -1.0);
    // IPR of independent exponential powers.
    RealVector p(bins);
    for (Index i = 0; i < bins; ++i) p(i) = -std::log(1.0 - rng.uniform());
    p /= p.sum();
    oracle_sum += 1.0 / p.squaredNorm();
  }
  CHECK(xi_sum / reps == doctest::Approx(oracle_sum / reps).epsilon(0.15));
  CHECK(xi_sum / reps == doctest::Approx(bins / 2.0).epsilon(0.15));
}

TEST_CASE("xi otoc input checks and detrending") {
  CHECK_THROWS_AS(xi_otoc(sampled(200, 1.0, [](double t) { return std::sin(t); }), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(xi_otoc(sampled(512, 1.0, [](double) { return 3.0; }), -1.0), std::invalid_argument);

  const Index n = 2048;
  auto ramp = sampled(n, 1.0, [&](double t) { return 0.001 * t + 0.2 * std::cos(kTwoPi * 64.0 / double(n) * t); });
  SpectrumOptions opts;
  opts.detrend_window = 64;
  CHECK(xi_otoc(ramp, -1.0, opts) < xi_otoc(ramp, -1.0));

  RealVector v = RealVector::LinSpaced(9, 0.0, 8.0);
  RealVector avg = moving_average(v, 3);
  CHECK(avg(0) == doctest::Approx(0.5));
  CHECK(avg(4) == doctest::Approx(4.0));
  CHECK(avg(8) == doctest::Approx(7.5));
  CHECK(moving_average(v, 1) == v);
}

TEST_CASE("sweep normalization") {
  auto mx = normalize_sweep({2, 4, 8}, NormalizeMode::Max);
  CHECK(mx == std::vector<double>{0.25, 0.5, 1.0});
  auto inv = normalize_sweep({2, 4, 8}, NormalizeMode::InvMin);
  CHECK(inv == std::vector<double>{1.0, 0.5, 0.25});
  CHECK(normalize_sweep({3.3}, NormalizeMode::Max) == std::vector<double>{1.0});
  CHECK_THROWS_AS(normalize_sweep({}, NormalizeMode::Max), std::invalid_argument);
  CHECK_THROWS_AS(normalize_sweep({1.0, 0.0}, NormalizeMode::InvMin), std::invalid_argument);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 35, 100}) == doctest::Approx(1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // Ties get the average rank: ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
  CHECK(spearman_rho({1, 5, 5, 9}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)));
  CHECK_THROWS_AS(spearman_rho({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho({1, 2, 3}, {1, 2}), std::invalid_argument);
}
