#pragma once
// Independent reference constructions used only by the tests.

#include "otoc/rng.hpp"
#include "otoc/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

using otoc::ComplexMatrix;
using otoc::ComplexVector;
using otoc::cplx;
using otoc::Index;
using otoc::RealMatrix;
using otoc::RealVector;
using otoc::kPi;
using otoc::kTwoPi;

// ---- torus maps, built entry by entry ----

inline ComplexMatrix dft(Index d) {
  ComplexMatrix f(d, d);
  for (Index k = 0; k < d; ++k)
    for (Index q = 0; q < d; ++q) f(k, q) = std::polar(1.0 / std::sqrt(double(d)), -kTwoPi * double(k * q) / double(d));
  return f;
}

inline ComplexMatrix diag_phase(const std::vector<double>& angles) {
  ComplexMatrix m = ComplexMatrix::Zero(Index(angles.size()), Index(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) m(Index(i), Index(i)) = std::polar(1.0, angles[i]);
  return m;
}

// U = F^dag T F V for the standard map with V = K cos(2 pi x)/(2 pi)^2, T = p^2/2, hbar = 1/(2 pi D).
inline ComplexMatrix standard_map(Index d, double k) {
  const double hbar = 1.0 / (kTwoPi * double(d));
  std::vector<double> v(d), t(d);
  for (Index q = 0; q < d; ++q) v[q] = -(k / (kTwoPi * kTwoPi)) * std::cos(kTwoPi * double(q) / double(d)) / hbar;
  for (Index p = 0; p < d; ++p) {
    const double mom = double(p) / double(d);
    t[p] = -0.5 * mom * mom / hbar;
  }
  const ComplexMatrix f = dft(d);
  return f.adjoint() * diag_phase(t) * f * diag_phase(v);
}

// Harper: V = -K cos(2 pi x)/(2 pi), T = -K cos(2 pi p)/(2 pi).
inline ComplexMatrix harper_map(Index d, double k) {
  const double hbar = 1.0 / (kTwoPi * double(d));
  std::vector<double> v(d), t(d);
  for (Index q = 0; q < d; ++q) v[q] = (k / kTwoPi) * std::cos(kTwoPi * double(q) / double(d)) / hbar;
  for (Index p = 0; p < d; ++p) t[p] = (k / kTwoPi) * std::cos(kTwoPi * double(p) / double(d)) / hbar;
  const ComplexMatrix f = dft(d);
  return f.adjoint() * diag_phase(t) * f * diag_phase(v);
}

// X = (U_S - U_S^dag)/2i with U_S = diag(e^{2 pi i q / D});
// P = (V_S - V_S^dag)/2i with V_S |q> = |q+1>.
inline ComplexMatrix schwinger_x(Index d) {
  ComplexMatrix us = ComplexMatrix::Zero(d, d);
  for (Index q = 0; q < d; ++q) us(q, q) = std::polar(1.0, kTwoPi * double(q) / double(d));
  return (us - us.adjoint()) / cplx(0.0, 2.0);
}

inline ComplexMatrix schwinger_p(Index d) {
  ComplexMatrix vs = ComplexMatrix::Zero(d, d);
  for (Index q = 0; q < d; ++q) vs((q + 1) % d, q) = 1.0;
  return (vs - vs.adjoint()) / cplx(0.0, 2.0);
}

// C(t) = (1/D) Tr(A^dag A), A = [X(t), P], by repeated dense conjugation.
inline RealVector map_otoc(const ComplexMatrix& u, int steps) {
  const Index d = u.rows();
  const ComplexMatrix p = schwinger_p(d);
  ComplexMatrix x = schwinger_x(d);
  RealVector out(steps + 1);
  for (int t = 0; t <= steps; ++t) {
    const ComplexMatrix a = x * p - p * x;
    out(t) = (a.adjoint() * a).trace().real() / double(d);
    x = (u.adjoint() * x * u).eval();
  }
  return out;
}

// ---- spin-1/2 chains from Kronecker products ----
// Local basis index = bit value, bit set = spin up.

inline Eigen::Matrix2cd pauli(char axis) {
  // rows/cols ordered (down, up)
  Eigen::Matrix2cd m;
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, cplx(0, 1), cplx(0, -1), 0; break;
    case 'z': m << -1, 0, 0, 1; break;
    default: m.setIdentity();
  }
  return m;
}

// Product of Pauli factors: ops[i] acts on site i ('1' = identity).
inline ComplexMatrix pauli_string(int sites, const std::vector<char>& ops) {
  const Index dim = Index(1) << sites;
  ComplexMatrix m(dim, dim);
  std::vector<Eigen::Matrix2cd> local(sites);
  for (int s = 0; s < sites; ++s) local[s] = pauli(ops[s]);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) {
      cplx v = 1.0;
      for (int s = 0; s < sites && v != 0.0; ++s) v *= local[s]((r >> s) & 1, (c >> s) & 1);
      m(r, c) = v;
    }
  return m;
}

inline ComplexMatrix site_op(int sites, int site, char axis) {
  std::vector<char> ops(sites, '1');
  ops[site] = axis;
  return pauli_string(sites, ops);
}

inline ComplexMatrix pair_op(int sites, int a, char pa, int b, char pb) {
  std::vector<char> ops(sites, '1');
  ops[a] = pa;
  ops[b] = pb;
  return pauli_string(sites, ops);
}

// S.S = (1/4)(xx + yy + mu zz) between two sites.
inline ComplexMatrix bond(int sites, int a, int b, double mu) {
  return 0.25 * (pair_op(sites, a, 'x', b, 'x') + pair_op(sites, a, 'y', b, 'y') + mu * pair_op(sites, a, 'z', b, 'z'));
}

inline ComplexMatrix xxz(int sites, double lambda, double mu) {
  const Index dim = Index(1) << sites;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < sites; ++i) h += bond(sites, i, i + 1, mu);
  for (int i = 0; i + 2 < sites; ++i) h += lambda * bond(sites, i, i + 2, mu);
  return h;
}

inline ComplexMatrix tilted(int sites, double j, double b, double theta) {
  const Index dim = Index(1) << sites;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < sites; ++i) h += 0.25 * j * pair_op(sites, i, 'z', i + 1, 'z');
  for (int i = 0; i < sites; ++i)
    h += 0.5 * b * (std::sin(theta) * site_op(sites, i, 'x') + std::cos(theta) * site_op(sites, i, 'z'));
  return h;
}

inline ComplexMatrix heisenberg(int sites, const std::vector<double>& fields) {
  const Index dim = Index(1) << sites;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < sites; ++i) h += bond(sites, i, i + 1, 1.0);
  for (int i = 0; i < sites; ++i) h += 0.5 * fields[i] * site_op(sites, i, 'z');
  return h;
}

// Rows/columns of the full-space matrix restricted to states with `up` bits set.
inline std::vector<Index> sector_states(int sites, int up) {
  std::vector<Index> out;
  for (Index s = 0; s < (Index(1) << sites); ++s)
    if (__builtin_popcountll(static_cast<unsigned long long>(s)) == up) out.push_back(s);
  return out;
}

inline ComplexMatrix restrict(const ComplexMatrix& m, const std::vector<Index>& states) {
  const Index n = Index(states.size());
  ComplexMatrix r(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) r(i, j) = m(states[i], states[j]);
  return r;
}

// C_zz(l, t) = 1 - Re Tr[s0(t) sl s0(t) sl] / D with s0(t) = e^{iHt} s0 e^{-iHt}
// from the matrix exponential (scaling and squaring).
inline double spin_otoc(const ComplexMatrix& h, const ComplexMatrix& s0, const ComplexMatrix& sl, double t) {
  const ComplexMatrix arg = cplx(0.0, t) * h;
  const ComplexMatrix u = arg.exp();
  const ComplexMatrix w = u * s0 * u.adjoint();
  const double d = double(h.rows());
  return 1.0 - (w * sl * w * sl).trace().real() / d;
}

// ---- random samples ----

// Brody spacings by inversion of the CDF 1 - exp(-b s^{beta+1}).
inline RealVector brody_sample(double beta, Index n, std::uint64_t seed) {
  const double b = std::pow(std::tgamma((beta + 2.0) / (beta + 1.0)), beta + 1.0);
  otoc::CounterRng rng(seed);
  RealVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::pow(-std::log(1.0 - rng.uniform()) / b, 1.0 / (beta + 1.0));
  return s;
}

inline double normal(otoc::CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

inline RealMatrix goe(Index n, otoc::CounterRng& rng) {
  RealMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return (a + a.transpose()) / 2.0;
}

}  // namespace oracle
