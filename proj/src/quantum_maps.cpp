#include "otoc/quantum_maps.hpp"

#include "otoc/fft.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace otoc {

namespace {

void require_dim(Index dim) {
  if (dim < 2) throw std::invalid_argument("torus Hilbert dimension must be >= 2, got " + std::to_string(dim));
}

// exp(-i s cos(2 pi j / D)) for j = 0..D-1, the kick exp(-i V / hbar) with
// V = (s / (2 pi D)) cos(2 pi x), hbar = 1/(2 pi D) and x = j / D.
ComplexVector cosine_phase(Index dim, double s) {
  ComplexVector phase(dim);
  const double d = static_cast<double>(dim);
  for (Index j = 0; j < dim; ++j) {
    double arg = s * std::cos(kTwoPi * static_cast<double>(j) / d);
    phase(j) = std::polar(1.0, -std::fmod(arg, kTwoPi));
  }
  return phase;
}

// exp(-i pi k^2 / D); reduce k^2 mod 2D before scaling so large D stays exact.
ComplexVector kinetic_phase(Index dim) {
  ComplexVector phase(dim);
  const long long two_d = 2LL * dim;
  for (Index k = 0; k < dim; ++k) {
    long long k2 = (static_cast<long long>(k) * k) % two_d;
    phase(k) = std::polar(1.0, -kPi * static_cast<double>(k2) / static_cast<double>(dim));
  }
  return phase;
}

// Dense position-basis U = C diag(v), with C = F^dagger diag(t) F circulant:
// C(j, m) = c[(j - m) mod D], c = backward_dft(t) / D.
ComplexMatrix assemble(const ComplexVector& position_phase, const ComplexVector& momentum_phase) {
  const Index dim = position_phase.size();
  ComplexVector c = fft::backward(momentum_phase) / static_cast<double>(dim);
  ComplexMatrix u(dim, dim);
  for (Index m = 0; m < dim; ++m)
    for (Index j = 0; j < dim; ++j) u(j, m) = c((j - m + dim) % dim) * position_phase(m);
  return u;
}

double wrap_phase(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

// Union-find for grouping eigenvectors that the Hermitian split left mixed.
struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(Index a, Index b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

ComplexMatrix dft_matrix(Index dim) {
  require_dim(dim);
  ComplexMatrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Index k = 0; k < dim; ++k)
    for (Index q = 0; q < dim; ++q) {
      long long kq = (static_cast<long long>(k) * q) % dim;
      f(k, q) = std::polar(norm, -kTwoPi * static_cast<double>(kq) / static_cast<double>(dim));
    }
  return f;
}

UnitaryEigen diagonalize_unitary(const ComplexMatrix& u) {
  const Index dim = u.rows();
  if (dim != u.cols() || dim == 0) throw std::invalid_argument("diagonalize_unitary needs a nonempty square matrix");

  // Rotating by an arbitrary angle avoids the exact cos(phi) = cos(-phi)
  // pairing that parity-symmetric maps would otherwise produce.
  const cplx rot = std::polar(1.0, -0.5);
  ComplexMatrix herm = (rot * u + std::conj(rot) * u.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed in diagonalize_unitary");
  ComplexMatrix v = solver.eigenvectors();

  ComplexMatrix reduced = v.adjoint() * (u * v);
  const double tol = 1e-10;
  DisjointSets sets(dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i)
      if (i != j && std::abs(reduced(i, j)) > tol) sets.unite(i, j);

  std::vector<std::vector<Index>> clusters(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) clusters[static_cast<std::size_t>(sets.find(i))].push_back(i);

  ComplexVector eigvals = reduced.diagonal();
  for (const auto& members : clusters) {
    if (members.size() < 2) continue;
    const auto n = static_cast<Index>(members.size());
    ComplexMatrix block(n, n);
    ComplexMatrix cols(dim, n);
    for (Index a = 0; a < n; ++a) {
      cols.col(a) = v.col(members[static_cast<std::size_t>(a)]);
      for (Index b = 0; b < n; ++b)
        block(a, b) = reduced(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
    }
    Eigen::ComplexSchur<ComplexMatrix> schur(block);
    if (schur.info() != Eigen::Success) throw std::runtime_error("Schur step failed in diagonalize_unitary");
    ComplexMatrix rotated = cols * schur.matrixU();
    for (Index a = 0; a < n; ++a) {
      v.col(members[static_cast<std::size_t>(a)]) = rotated.col(a);
      eigvals(members[static_cast<std::size_t>(a)]) = schur.matrixT()(a, a);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(dim));
  RealVector raw(dim);
  for (Index i = 0; i < dim; ++i) raw(i) = wrap_phase(std::arg(eigvals(i)));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return raw(a) < raw(b); });

  UnitaryEigen out;
  out.phases.resize(dim);
  out.vectors.resize(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    out.phases(i) = raw(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }

  ComplexVector lambda(dim);
  for (Index i = 0; i < dim; ++i) lambda(i) = std::polar(1.0, out.phases(i));
  double residual = (u * out.vectors - out.vectors * lambda.asDiagonal()).cwiseAbs().maxCoeff();
  if (residual > 1e-8)
    throw std::runtime_error("diagonalize_unitary residual too large: " + std::to_string(residual));
  return out;
}

struct FloquetOperator::Cache {
  std::once_flag once;
  UnitaryEigen eigen;
};

FloquetOperator::FloquetOperator(ComplexVector position_phase, ComplexVector momentum_phase)
    : position_phase_(std::move(position_phase)),
      momentum_phase_(std::move(momentum_phase)),
      cache_(std::make_shared<Cache>()) {
  require_dim(position_phase_.size());
  if (momentum_phase_.size() != position_phase_.size())
    throw std::invalid_argument("Floquet factors must have equal dimension");
  matrix_ = assemble(position_phase_, momentum_phase_);
}

FloquetOperator FloquetOperator::standard(Index dim, double k) {
  require_dim(dim);
  if (!(k >= 0.0)) throw std::invalid_argument("standard map K must be >= 0");
  // V = K cos(2 pi x) / (2 pi)^2 gives p' = p + (K / 2 pi) sin(2 pi x)
  return {cosine_phase(dim, static_cast<double>(dim) * k / kTwoPi), kinetic_phase(dim)};
}

FloquetOperator FloquetOperator::harper(Index dim, double k) {
  require_dim(dim);
  if (!(k >= 0.0)) throw std::invalid_argument("Harper map K must be >= 0");
  // V = -K cos(2 pi x) / 2 pi gives p' = p - K sin(2 pi x); likewise for x' in p
  const double s = -static_cast<double>(dim) * k;
  return {cosine_phase(dim, s), cosine_phase(dim, s)};
}

FloquetOperator FloquetOperator::build(MapFamily family, Index dim, double k) {
  return family == MapFamily::Standard ? standard(dim, k) : harper(dim, k);
}

FloquetOperator build_standard_floquet(Index dim, double k) { return FloquetOperator::standard(dim, k); }
FloquetOperator build_harper_floquet(Index dim, double k) { return FloquetOperator::harper(dim, k); }

double FloquetOperator::unitarity_defect() const {
  ComplexMatrix defect = matrix_.adjoint() * matrix_ - ComplexMatrix::Identity(dim(), dim());
  // Hermitian, so the spectral norm is the largest |eigenvalue|.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(defect, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

const UnitaryEigen& FloquetOperator::eigen() const {
  std::call_once(cache_->once, [this] { cache_->eigen = diagonalize_unitary(matrix_); });
  return cache_->eigen;
}

SchwingerPair build_schwinger_pair(Index dim) {
  require_dim(dim);
  SchwingerPair pair;
  pair.x = ComplexMatrix::Zero(dim, dim);
  pair.p = ComplexMatrix::Zero(dim, dim);
  const cplx half_over_i(0.0, -0.5);  // 1 / (2i)
  for (Index q = 0; q < dim; ++q) {
    pair.x(q, q) = std::sin(kTwoPi * static_cast<double>(q) / static_cast<double>(dim));
    // V_S(q+1, q) = 1 and V_S^dagger(q-1, q) = 1
    pair.p((q + 1) % dim, q) += half_over_i;
    pair.p((q - 1 + dim) % dim, q) -= half_over_i;
  }
  return pair;
}

namespace {

// B = W P for the Schwinger P: column k of B is (W[:, k+1] - W[:, k-1]) / 2i.
void multiply_by_schwinger_p(const Eigen::Ref<const ComplexMatrix>& w, ComplexMatrix& out) {
  const Index dim = w.rows();
  const cplx half_over_i(0.0, -0.5);
  for (Index k = 0; k < dim; ++k)
    out.col(k) = (w.col((k + 1) % dim) - w.col((k - 1 + dim) % dim)) * half_over_i;
}

double commutator_norm2(const ComplexMatrix& b) {
  // [X(t), P] = X(t) P - P X(t) = B - B^dagger for Hermitian X(t), P.
  return (b - b.adjoint()).squaredNorm();
}

OtocSeries make_series(int n_steps) {
  OtocSeries series;
  series.times = RealVector::LinSpaced(n_steps + 1, 0.0, static_cast<double>(n_steps));
  series.values.resize(n_steps + 1);
  series.dt = 1.0;
  return series;
}

OtocSeries split_step_otoc(const FloquetOperator& u, const SchwingerPair& pair, int n_steps) {
  const Index dim = u.dim();
  const double d = static_cast<double>(dim);
  {
    const SchwingerPair reference = build_schwinger_pair(dim);
    if ((reference.p - pair.p).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("split-step OTOC requires the Schwinger P operator");
  }

  // W <- U^dagger W U with U = F^dagger T F V:
  //   W1 = F W F^dagger, W1 .*= conj(T_j) T_k, W2 = F^dagger W1 F, W <- conj(V_j) V_k W2.
  const ComplexVector& v = u.position_phase();
  const ComplexVector& t = u.momentum_phase();
  ComplexMatrix kinetic_weight = t.conjugate() * t.transpose() / (d * d);
  ComplexMatrix kick_weight = v.conjugate() * v.transpose();

  fft::MatrixDft work(dim);
  auto w = work.matrix();
  w = pair.x;

  OtocSeries series = make_series(n_steps);
  ComplexMatrix b(dim, dim);
  for (int step = 0; step <= n_steps; ++step) {
    if (step > 0) {
      work.columns_forward();
      work.rows_backward();
      w.array() *= kinetic_weight.array();
      work.columns_backward();
      work.rows_forward();
      w.array() *= kick_weight.array();
    }
    multiply_by_schwinger_p(w, b);
    series.values(step) = commutator_norm2(b) / d;
  }
  return series;
}

OtocSeries eigenbasis_otoc(const FloquetOperator& u, const SchwingerPair& pair, int n_steps) {
  const Index dim = u.dim();
  const double d = static_cast<double>(dim);
  const UnitaryEigen& eig = u.eigen();
  const ComplexMatrix x_eig = eig.vectors.adjoint() * pair.x * eig.vectors;
  const ComplexMatrix p_eig = eig.vectors.adjoint() * pair.p * eig.vectors;

  OtocSeries series = make_series(n_steps);
  ComplexVector rot(dim);
  ComplexMatrix xt(dim, dim), b(dim, dim);
  for (int step = 0; step <= n_steps; ++step) {
    // X(t)_{jk} = X_{jk} exp(i (phi_k - phi_j) t) in the eigenbasis
    for (Index j = 0; j < dim; ++j) rot(j) = std::polar(1.0, std::fmod(eig.phases(j) * step, kTwoPi));
    xt = rot.conjugate().asDiagonal() * x_eig * rot.asDiagonal();
    b.noalias() = xt * p_eig;
    series.values(step) = commutator_norm2(b) / d;
  }
  return series;
}

}  // namespace

OtocSeries map_otoc_series(const FloquetOperator& u, const SchwingerPair& pair, int n_steps, MapEvolution method,
                           OtocScale scale) {
  if (n_steps < 1) throw std::invalid_argument("map_otoc_series needs n_steps >= 1");
  if (pair.x.rows() != u.dim() || pair.p.rows() != u.dim())
    throw std::invalid_argument("Schwinger pair dimension does not match the Floquet operator");
  if (u.unitarity_defect() > 1e-8) throw std::invalid_argument("Floquet operator is not unitary");

  OtocSeries series = method == MapEvolution::SplitStep ? split_step_otoc(u, pair, n_steps)
                                                         : eigenbasis_otoc(u, pair, n_steps);
  series.metadata["dim"] = std::to_string(u.dim());
  series.metadata["evolution"] = method == MapEvolution::SplitStep ? "split-step" : "eigenbasis";
  series.metadata["operators"] = "X,P";
  if (scale == OtocScale::Saturation) {
    const double d = static_cast<double>(u.dim());
    const double norm = 2.0 * (pair.x.squaredNorm() / d) * (pair.p.squaredNorm() / d);
    if (norm > 0.0) series.values /= norm;
    series.metadata["scale"] = "saturation";
  } else {
    series.metadata["scale"] = "raw";
  }
  return series;
}

RealVector eigenphase_spectrum(const FloquetOperator& u) { return u.eigen().phases; }

namespace {

void require_reflection_symmetric(const ComplexMatrix& m) {
  const Index dim = m.rows();
  auto reflect = [dim](Index q) { return (dim - q) % dim; };
  double asym = 0.0;
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) asym = std::max(asym, std::abs(m(reflect(i), reflect(j)) - m(i, j)));
  if (asym > 1e-10) throw std::invalid_argument("Floquet operator does not commute with q -> -q");
}

// Orthonormal bases of the even and odd subspaces of q -> -q.
// Even: |0>, (|q> + |-q>)/sqrt2 for 0 < q < D/2, |D/2> if D even.
// Odd:  (|q> - |-q>)/sqrt2 for 0 < q < D/2.
std::pair<ComplexMatrix, ComplexMatrix> reflection_bases(Index dim) {
  const Index half = (dim - 1) / 2;
  const bool has_mid = dim % 2 == 0;
  const Index n_even = 1 + half + (has_mid ? 1 : 0);
  ComplexMatrix even = ComplexMatrix::Zero(dim, n_even);
  ComplexMatrix odd = ComplexMatrix::Zero(dim, half);
  const double s = 1.0 / std::sqrt(2.0);
  even(0, 0) = 1.0;
  for (Index q = 1; q <= half; ++q) {
    even(q, q) = s;
    even(dim - q, q) = s;
    odd(q, q - 1) = s;
    odd(dim - q, q - 1) = -s;
  }
  if (has_mid) even(dim / 2, n_even - 1) = 1.0;
  return {even, odd};
}

RealVector sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return Eigen::Map<RealVector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

ParityPhases eigenphases_by_reflection(const FloquetOperator& u) {
  const ComplexMatrix& m = u.matrix();
  require_reflection_symmetric(m);
  const auto [even, odd] = reflection_bases(u.dim());
  ParityPhases out;
  out.even = diagonalize_unitary(even.adjoint() * m * even).phases;
  if (odd.cols() > 0) out.odd = diagonalize_unitary(odd.adjoint() * m * odd).phases;
  return out;
}

std::vector<RealVector> symmetry_resolved_phases(const FloquetOperator& u) {
  const bool self_dual = (u.position_phase() - u.momentum_phase()).cwiseAbs().maxCoeff() < 1e-14;
  std::vector<RealVector> blocks;
  if (!self_dual) {
    ParityPhases p = eigenphases_by_reflection(u);
    for (RealVector* b : {&p.even, &p.odd})
      if (b->size() > 0) blocks.push_back(std::move(*b));
    return blocks;
  }

  const Index dim = u.dim();
  require_reflection_symmetric(u.matrix());
  const ComplexMatrix w = u.position_phase().conjugate().asDiagonal() * dft_matrix(dim);
  const auto [even, odd] = reflection_bases(dim);
  // U = +-W^-2 on the even / odd block: phi = -2 theta (+ pi).
  for (int sector = 0; sector < 2; ++sector) {
    const ComplexMatrix& basis = sector == 0 ? even : odd;
    if (basis.cols() == 0) continue;
    const RealVector theta = diagonalize_unitary(basis.adjoint() * w * basis).phases;
    std::vector<double> lower, upper;
    for (Index i = 0; i < theta.size(); ++i) {
      double phi = std::fmod(-2.0 * theta(i) + (sector == 0 ? 0.0 : kPi), kTwoPi);
      if (phi < 0.0) phi += kTwoPi;
      if (phi >= kTwoPi) phi -= kTwoPi;
      (theta(i) < kPi ? lower : upper).push_back(phi);
    }
    for (auto* half : {&lower, &upper})
      if (!half->empty()) blocks.push_back(sorted(std::move(*half)));
  }
  return blocks;
}

}  // namespace otoc
