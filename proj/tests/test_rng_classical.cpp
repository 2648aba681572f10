#include "doctest.h"

#include "otoc/classical_maps.hpp"
#include "otoc/rng.hpp"

#include <cmath>
#include <set>

using namespace otoc;

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    auto va = a();
    CHECK(va == b());
    CHECK(va != c());
  }
  CounterRng d(42, 3);
  d.seek(57);
  CounterRng e(42, 3);
  for (int i = 0; i < 57; ++i) e();
  CHECK(d() == e());
  CHECK(a.split(9)() == CounterRng(42, 3).split(9)());
}

TEST_CASE("uniform draws lie in [0, 1) with the right mean") {
  CounterRng rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("standard map single steps") {
  auto a = step_standard({0.0, 0.0}, 2.0);
  CHECK(a.x == doctest::Approx(0.0));
  CHECK(a.p == doctest::Approx(0.0));

  auto b = step_standard({0.25, 0.5}, 0.0);
  CHECK(b.x == doctest::Approx(0.75));
  CHECK(b.p == doctest::Approx(0.5));

  auto c = step_standard({0.25, 0.0}, kTwoPi);
  CHECK(torus_distance(c, {0.25, 0.0}) < 1e-12);
}

TEST_CASE("harper map single steps") {
  auto a = step_harper({0.0, 0.0}, 1.0, 1.0);
  CHECK(torus_distance(a, {0.0, 0.0}) < 1e-12);
  auto b = step_harper({0.25, 0.0}, 0.5, 0.0);
  CHECK(b.x == doctest::Approx(0.25));
  CHECK(b.p == doctest::Approx(0.5));
}

TEST_CASE("wrap and torus distance") {
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
  CHECK(wrap_unit(3.5) == doctest::Approx(0.5));
  CHECK(wrap_unit(-1e-18) < 1.0);
  CHECK(torus_distance({0.05, 0.5}, {0.95, 0.5}) == doctest::Approx(0.1));
}

TEST_CASE("jacobians are area preserving and match finite differences") {
  CounterRng rng(11);
  for (auto spec : {ClassicalMapSpec::standard(3.3), ClassicalMapSpec::harper(0.7, 1.3)}) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      PhasePoint pt{rng.uniform(), rng.uniform()};
      worst = std::max(worst, std::abs(jacobian(spec, pt).determinant() - 1.0));
    }
    CHECK(worst < 1e-12);

    PhasePoint pt{0.31, 0.47};
    const double h = 1e-6;
    Eigen::Matrix2d jac = jacobian(spec, pt);
    auto unwrap = [](double d) { return d - std::round(d); };
    for (int col = 0; col < 2; ++col) {
      PhasePoint plus = pt, minus = pt;
      (col == 0 ? plus.x : plus.p) += h;
      (col == 0 ? minus.x : minus.p) -= h;
      auto fp = step(spec, plus), fm = step(spec, minus);
      CHECK(unwrap(fp.x - fm.x) / (2 * h) == doctest::Approx(jac(0, col)).epsilon(1e-6));
      CHECK(unwrap(fp.p - fm.p) / (2 * h) == doctest::Approx(jac(1, col)).epsilon(1e-6));
    }
  }
}

TEST_CASE("lyapunov exponents") {
  CHECK(std::abs(lyapunov_exponent(ClassicalMapSpec::standard(0.0), {0.3, 0.2}, 5000)) < 1e-2);
  const double lam = lyapunov_exponent(ClassicalMapSpec::standard(10.0), {0.123, 0.456}, 20000);
  CHECK(lam == doctest::Approx(std::log(5.0)).epsilon(0.1));
  CHECK(std::abs(lyapunov_exponent(ClassicalMapSpec::harper(0.063), {0.3, 0.2}, 5000)) < 1e-2);
  CHECK_THROWS_AS(lyapunov_exponent(ClassicalMapSpec::standard(1.0), {0.1, 0.1}, 50), std::invalid_argument);
}

TEST_CASE("trajectory and return time") {
  auto traj = trajectory(ClassicalMapSpec::standard(0.0), {0.0, 0.5}, 4);
  REQUIRE(traj.size() == 5);
  CHECK(traj[2].point.x == doctest::Approx(0.0));
  CHECK(first_return_time(ClassicalMapSpec::standard(0.0), {0.0, 0.5}, 1e-9, 10) == 2);
  CHECK(first_return_time(ClassicalMapSpec::standard(0.0), {0.0, std::sqrt(2.0) - 1.0}, 1e-9, 10) == -1);
}

TEST_CASE("chaotic area ratio") {
  SUBCASE("near-integrable standard map is almost all regular") {
    auto cfg = AreaSamplerConfig::defaults_for(MapFamily::Standard);
    cfg.n_tot = 2000;
    auto r = chaotic_area_ratio(ClassicalMapSpec::standard(0.05), cfg);
    CHECK(r.r_ch < 0.05);
    CHECK(r.r_reg == doctest::Approx(1.0 - r.r_ch));
    CHECK(r.per_t_max.size() == cfg.t_max_list.size());
  }
  SUBCASE("worker count does not change the estimate") {
    auto cfg = AreaSamplerConfig::defaults_for(MapFamily::Harper);
    cfg.n_tot = 1500;
    cfg.workers = 1;
    auto one = chaotic_area_ratio(ClassicalMapSpec::harper(0.5), cfg);
    cfg.workers = 3;
    auto three = chaotic_area_ratio(ClassicalMapSpec::harper(0.5), cfg);
    CHECK(one.r_ch == three.r_ch);
    CHECK(one.per_t_max == three.per_t_max);
  }
  SUBCASE("invalid configs") {
    AreaSamplerConfig cfg;
    cfg.t_max_list = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(ClassicalMapSpec::standard(-1.0).validate(), std::invalid_argument);
  }
}

TEST_CASE("area ratio agrees with a lyapunov classification") {
  // Lyapunov oracle on a grid for a mixed standard map.
  const auto spec = ClassicalMapSpec::standard(1.5);
  const int grid = 30;
  int chaotic = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      if (lyapunov_exponent(spec, {(i + 0.5) / grid, (j + 0.5) / grid}, 3000) > 0.02) ++chaotic;
  const double oracle = double(chaotic) / (grid * grid);
  auto cfg = AreaSamplerConfig::defaults_for(MapFamily::Standard);
  cfg.n_tot = 4000;
  auto r = chaotic_area_ratio(spec, cfg);
  CHECK(std::abs(r.r_ch - oracle) < 0.08);
}

TEST_CASE("family names round trip") {
  CHECK(map_family_from_string(to_string(MapFamily::Harper)) == MapFamily::Harper);
  CHECK(map_family_from_string(to_string(MapFamily::Standard)) == MapFamily::Standard);
  CHECK_THROWS(map_family_from_string("tent"));
}
