#include "doctest.h"
#include "oracles.hpp"

#include "otoc/fft.hpp"
#include "otoc/quantum_maps.hpp"
#include "otoc/spectral_indicators.hpp"

#include <algorithm>
#include <numeric>

using namespace otoc;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

RealVector sorted(RealVector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace

TEST_CASE("fft wrappers match the direct sums") {
  CounterRng rng(5);
  const Index n = 12;
  ComplexVector x(n);
  for (Index i = 0; i < n; ++i) x(i) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  ComplexVector direct = oracle::dft(n) * x * std::sqrt(double(n));
  CHECK((fft::forward(x) - direct).norm() < 1e-12);
  CHECK((fft::backward(fft::forward(x)) / double(n) - x).norm() < 1e-12);

  RealVector r = x.real();
  ComplexVector half = fft::real_forward(r);
  REQUIRE(half.size() == n / 2 + 1);
  CHECK((half - fft::forward(r.cast<cplx>()).head(n / 2 + 1)).norm() < 1e-12);

  fft::MatrixDft work(6);
  ComplexMatrix m = ComplexMatrix::Random(6, 6);
  work.matrix() = m;
  work.columns_forward();
  CHECK(max_abs(ComplexMatrix(work.matrix()) - oracle::dft(6) * m * std::sqrt(6.0)) < 1e-12);
  work.matrix() = m;
  work.rows_forward();
  CHECK(max_abs(ComplexMatrix(work.matrix()) - m * oracle::dft(6).transpose() * std::sqrt(6.0)) < 1e-12);
}

TEST_CASE("dft matrix") {
  CHECK(max_abs(dft_matrix(7) - oracle::dft(7)) < 1e-14);
  ComplexMatrix f = dft_matrix(16);
  CHECK(max_abs(f.adjoint() * f - ComplexMatrix::Identity(16, 16)) < 1e-13);
}

TEST_CASE("floquet operators match the brute-force 4x4 products") {
  CHECK(max_abs(build_standard_floquet(4, 1.0).matrix() - oracle::standard_map(4, 1.0)) < 1e-12);
  CHECK(max_abs(build_harper_floquet(4, 0.3).matrix() - oracle::harper_map(4, 0.3)) < 1e-12);
  CHECK(max_abs(build_standard_floquet(9, 2.7).matrix() - oracle::standard_map(9, 2.7)) < 1e-12);
  CHECK(max_abs(FloquetOperator::build(MapFamily::Harper, 10, 1.1).matrix() - oracle::harper_map(10, 1.1)) < 1e-12);
}

TEST_CASE("trivial kicks") {
  auto u = build_standard_floquet(4, 0.0);
  ComplexMatrix f = dft_matrix(4);
  ComplexMatrix mom = f * u.matrix() * f.adjoint();
  CHECK(max_abs(mom - ComplexMatrix(mom.diagonal().asDiagonal())) < 1e-12);
  CHECK(std::abs(std::abs(u.matrix().determinant()) - 1.0) < 1e-12);

  auto h = build_harper_floquet(8, 0.0);
  CHECK(max_abs(h.matrix() - ComplexMatrix::Identity(8, 8)) < 1e-12);
}

TEST_CASE("unitarity at D = 1000") {
  CHECK(build_harper_floquet(1000, 2.0).unitarity_defect() < 1e-10);
  CHECK(build_standard_floquet(1000, 2.0).unitarity_defect() < 1e-10);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(build_standard_floquet(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_harper_floquet(8, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_schwinger_pair(1), std::invalid_argument);
  auto u = build_standard_floquet(8, 1.0);
  CHECK_THROWS_AS(map_otoc_series(u, build_schwinger_pair(6), 10), std::invalid_argument);
  CHECK_THROWS_AS(map_otoc_series(u, build_schwinger_pair(8), 0), std::invalid_argument);
}

TEST_CASE("schwinger pair") {
  CHECK(max_abs(build_schwinger_pair(2).x) < 1e-15);
  auto s4 = build_schwinger_pair(4);
  RealVector expect(4);
  expect << 0, 1, 0, -1;
  CHECK(max_abs(s4.x - ComplexMatrix(expect.cast<cplx>().asDiagonal())) < 1e-15);

  // P is circulant and diagonal in the momentum basis, with eigenvalues -sin(2 pi k / D).
  ComplexMatrix f = dft_matrix(4);
  ComplexMatrix pk = f * s4.p * f.adjoint();
  CHECK(max_abs(pk - ComplexMatrix((-expect).cast<cplx>().asDiagonal())) < 1e-14);
  for (Index r = 1; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) CHECK(std::abs(s4.p(r, c) - s4.p(0, (c - r + 4) % 4)) < 1e-15);

  for (Index d : {3, 7, 16}) {
    auto s = build_schwinger_pair(d);
    CHECK(max_abs(s.x - oracle::schwinger_x(d)) < 1e-14);
    CHECK(max_abs(s.p - oracle::schwinger_p(d)) < 1e-14);
  }
}

TEST_CASE("map otoc matches dense conjugation at every step") {
  for (Index d : {2, 3, 4, 8, 11, 16}) {
    for (auto family : {MapFamily::Standard, MapFamily::Harper}) {
      const double k = family == MapFamily::Standard ? 3.0 : 1.2;
      auto u = FloquetOperator::build(family, d, k);
      auto pair = build_schwinger_pair(d);
      const int steps = 60;
      RealVector ref = oracle::map_otoc(u.matrix(), steps);
      for (auto method : {MapEvolution::SplitStep, MapEvolution::Eigenbasis}) {
        auto raw = map_otoc_series(u, pair, steps, method, OtocScale::Raw);
        REQUIRE(raw.size() == steps + 1);
        CHECK((raw.values - ref).cwiseAbs().maxCoeff() < 1e-8);
        auto scaled = map_otoc_series(u, pair, steps, method, OtocScale::Saturation);
        const double norm = d > 2 ? 0.5 : 1.0;  // 2 <X^2><P^2>, unscaled when X = 0
        CHECK((scaled.values * norm - ref).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("map otoc basics") {
  auto u = build_standard_floquet(2, 1.0);
  auto s = map_otoc_series(u, build_schwinger_pair(2), 5);
  CHECK(s.values(0) == 0.0);
  auto u4 = build_standard_floquet(4, 1.0);
  auto s4 = map_otoc_series(u4, build_schwinger_pair(4), 1, MapEvolution::SplitStep, OtocScale::Raw);
  CHECK(s4.values(1) == doctest::Approx(oracle::map_otoc(oracle::standard_map(4, 1.0), 1)(1)).epsilon(1e-12));
  CHECK(s4.times(1) == 1.0);
}

TEST_CASE("chaotic map otoc approaches one with the saturation scale") {
  auto u = build_standard_floquet(100, 10.0);
  auto s = map_otoc_series(u, build_schwinger_pair(100), 1000);
  CHECK(s.values.tail(500).mean() == doctest::Approx(1.0).epsilon(0.1));
  CHECK(s.metadata.at("scale") == "saturation");
}

TEST_CASE("eigenphases") {
  SUBCASE("free rotor") {
    const Index d = 5;
    RealVector expect(d);
    for (Index k = 0; k < d; ++k) {
      double v = std::fmod(-kPi * double(k * k) / double(d), kTwoPi);
      expect(k) = v < 0 ? v + kTwoPi : v;
    }
    RealVector got = eigenphase_spectrum(build_standard_floquet(d, 0.0));
    CHECK((got - sorted(expect)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("spacings wrap to 2 pi and unitary residual is small") {
    auto u = build_harper_floquet(64, 1.3);
    RealVector ph = eigenphase_spectrum(u);
    double total = kTwoPi - (ph(ph.size() - 1) - ph(0));
    for (Index i = 1; i < ph.size(); ++i) total += ph(i) - ph(i - 1);
    CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-12));
    const auto& eig = u.eigen();
    ComplexMatrix lhs = u.matrix() * eig.vectors;
    ComplexMatrix rhs = eig.vectors * ComplexVector((ph.cast<cplx>() * cplx(0, 1)).array().exp()).asDiagonal();
    CHECK(max_abs(lhs - rhs) < 1e-8);
  }
  SUBCASE("invariant under a shuffled basis") {
    auto u = build_standard_floquet(24, 2.2);
    std::vector<Index> perm(24);
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng rng(3);
    std::shuffle(perm.begin(), perm.end(), rng);
    ComplexMatrix shuffled(24, 24);
    for (Index i = 0; i < 24; ++i)
      for (Index j = 0; j < 24; ++j) shuffled(i, j) = u.matrix()(perm[i], perm[j]);
    CHECK((diagonalize_unitary(shuffled).phases - eigenphase_spectrum(u)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("degenerate unitary") {
    ComplexMatrix id = ComplexMatrix::Identity(6, 6);
    auto eig = diagonalize_unitary(id);
    CHECK(eig.phases.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reflection blocks split the spectrum") {
  for (auto family : {MapFamily::Standard, MapFamily::Harper}) {
    auto u = FloquetOperator::build(family, 16, 1.7);
    auto blocks = eigenphases_by_reflection(u);
    CHECK(blocks.even.size() == 9);
    CHECK(blocks.odd.size() == 7);
    RealVector all(16);
    all << blocks.even, blocks.odd;
    CHECK((sorted(all) - eigenphase_spectrum(u)).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(eigenphases_by_reflection(build_standard_floquet(5, 1.0)), std::invalid_argument);
}

TEST_CASE("self-dual harper map splits into four blocks") {
  for (Index d : {15, 16}) {
    const double k = 1.3;
    // W = V^dagger F commutes with the dense oracle matrix.
    ComplexMatrix dense = oracle::harper_map(d, k);
    ComplexVector v = FloquetOperator::harper(d, k).position_phase();
    ComplexMatrix w = v.conjugate().asDiagonal() * oracle::dft(d);
    CHECK((w * dense - dense * w).norm() < 1e-10);

    auto u = FloquetOperator::harper(d, k);
    auto blocks = symmetry_resolved_phases(u);
    CHECK(blocks.size() == 4);
    std::vector<double> all;
    for (const auto& b : blocks) {
      CHECK(std::is_sorted(b.data(), b.data() + b.size()));
      all.insert(all.end(), b.data(), b.data() + b.size());
    }
    RealVector joined = Eigen::Map<RealVector>(all.data(), Index(all.size()));
    REQUIRE(joined.size() == d);
    CHECK((sorted(joined) - eigenphase_spectrum(u)).cwiseAbs().maxCoeff() < 1e-9);
  }
  auto sm = symmetry_resolved_phases(build_standard_floquet(16, 1.7));
  REQUIRE(sm.size() == 2);
  CHECK(sm[0].size() == 9);
  CHECK(sm[1].size() == 7);
}

TEST_CASE("chaotic harper map has Wigner-like spacings once desymmetrized") {
  std::vector<double> pooled;
  for (const auto& b : symmetry_resolved_phases(build_harper_floquet(1000, 0.8))) {
    RealVector s = unfold_phases(b);
    pooled.insert(pooled.end(), s.data(), s.data() + s.size());
  }
  CHECK(brody_fit(Eigen::Map<RealVector>(pooled.data(), Index(pooled.size()))).value > 0.8);
}

TEST_CASE("strongly chaotic standard map has Wigner-like spacings at D = 1000") {
  auto blocks = eigenphases_by_reflection(build_standard_floquet(1000, 10.0));
  RealVector even = unfold_phases(blocks.even), odd = unfold_phases(blocks.odd);
  RealVector pooled(even.size() + odd.size());
  pooled << even, odd;
  CHECK(brody_fit(pooled).value > 0.8);
}
