#pragma once

#include "otoc/classical_maps.hpp"
#include "otoc/types.hpp"

#include <memory>
#include <vector>

namespace otoc {

/// Torus Hilbert space of dimension D: positions q = 0..D-1 (x = q/D),
/// momenta k = 0..D-1, with <k|q> = exp(-2 pi i q k / D) / sqrt(D).
struct TorusHilbert {
  Index dim = 2;
  double hbar_eff() const { return 1.0 / (kTwoPi * static_cast<double>(dim)); }
};

/// Unitary DFT F with F(k, q) = exp(-2 pi i k q / D) / sqrt(D); maps
/// position-basis coefficients to momentum-basis coefficients.
ComplexMatrix dft_matrix(Index dim);

/// Eigendecomposition U = V diag(exp(i phases)) V^dagger with V unitary and
/// phases sorted ascending in [0, 2 pi).
struct UnitaryEigen {
  RealVector phases;
  ComplexMatrix vectors;
};

/// Diagonalizes a unitary through the Hermitian part of exp(-i a) U, then
/// resolves any residual mixing inside near-degenerate clusters with a
/// small Schur decomposition. Throws std::runtime_error when the final
/// residual ||U V - V Lambda|| exceeds 1e-8.
UnitaryEigen diagonalize_unitary(const ComplexMatrix& u);

/// One period of a kicked map, U = F^dagger diag(momentum_phase) F diag(position_phase),
/// stored both in factored form (for split-step propagation) and as a dense
/// position-basis matrix. The eigendecomposition is computed on first use and
/// shared between copies; the object is immutable otherwise.
class FloquetOperator {
 public:
  FloquetOperator(ComplexVector position_phase, ComplexVector momentum_phase);

  /// exp(-i p^2 / 2 hbar) exp(-i V(x) / hbar), V = K cos(2 pi x) / (2 pi)^2,
  /// the quantization of p' = p + (K / 2 pi) sin(2 pi x), x' = x + p'.
  static FloquetOperator standard(Index dim, double k);
  /// exp(i K cos(2 pi p) / 2 pi hbar) exp(i K cos(2 pi x) / 2 pi hbar), the
  /// quantization of p' = p - K sin(2 pi x), x' = x + K sin(2 pi p').
  static FloquetOperator harper(Index dim, double k);
  static FloquetOperator build(MapFamily family, Index dim, double k);

  Index dim() const { return position_phase_.size(); }
  const ComplexVector& position_phase() const { return position_phase_; }
  const ComplexVector& momentum_phase() const { return momentum_phase_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  /// Spectral norm of U^dagger U - 1.
  double unitarity_defect() const;

  const UnitaryEigen& eigen() const;

 private:
  struct Cache;
  ComplexVector position_phase_;
  ComplexVector momentum_phase_;
  ComplexMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

FloquetOperator build_standard_floquet(Index dim, double k);
FloquetOperator build_harper_floquet(Index dim, double k);

/// Hermitian parts of the Schwinger clock and shift operators, both in the
/// position basis: X = diag(sin(2 pi q / D)), P = (V_S - V_S^dagger) / 2i
/// with V_S |q> = |q + 1>.
struct SchwingerPair {
  ComplexMatrix x;
  ComplexMatrix p;
};

SchwingerPair build_schwinger_pair(Index dim);

enum class MapEvolution {
  /// FFT conjugation X -> U^dagger X U once per step, O(D^2 log D).
  SplitStep,
  /// Phase evolution in the eigenbasis of U, one O(D^3) product per step.
  Eigenbasis,
};

enum class OtocScale {
  /// (1/D) Tr(A^dagger A); saturates at 2 <X^2><P^2> = 1/2 for the Schwinger pair.
  Raw,
  /// Raw / (2 <X^2><P^2>), so a Haar-random X(t) gives 1. Same convention as C_zz.
  Saturation,
};

/// C(t) from A = [X(t), P] for t = 0..n_steps with X(t) = (U^dagger)^t X U^t.
/// SplitStep requires `pair` to be the Schwinger pair of matching dimension
/// (its P is applied as a cyclic shift).
OtocSeries map_otoc_series(const FloquetOperator& u, const SchwingerPair& pair, int n_steps,
                           MapEvolution method = MapEvolution::SplitStep, OtocScale scale = OtocScale::Saturation);

/// Eigenphases of U in [0, 2 pi), ascending.
RealVector eigenphase_spectrum(const FloquetOperator& u);

/// Site parity q -> -q mod D. Returns the eigenphases of U restricted to the
/// even and odd subspaces. Requires U to commute with the reflection.
struct ParityPhases {
  RealVector even;
  RealVector odd;
};
ParityPhases eigenphases_by_reflection(const FloquetOperator& u);

/// Eigenphases split by every unitary symmetry the family carries. Always the
/// two reflection blocks. When the kick and kinetic factors coincide (Harper
/// with K1 = K2), W = V^dagger F satisfies U R = W^-2, so each parity block
/// splits again by which half of the circle the W eigenphase falls in.
/// Empty blocks are dropped.
std::vector<RealVector> symmetry_resolved_phases(const FloquetOperator& u);

}  // namespace otoc
