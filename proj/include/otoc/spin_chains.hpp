#pragma once

#include "otoc/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace otoc {

enum class SpinFamily { PerturbedXXZ, TiltedIsing, RandomFieldHeisenberg };
enum class Parity { None, Even, Odd };

const char* to_string(SpinFamily family);
SpinFamily spin_family_from_string(const std::string& name);
const char* to_string(Parity parity);
Parity parity_from_string(const std::string& name);

/// Open spin-1/2 chain; site i is bit i of a basis state, bit set = spin up.
/// Spin operators are S = sigma / 2 and hbar = 1.
struct SpinChainSpec {
  SpinFamily family = SpinFamily::PerturbedXXZ;
  int sites = 2;
  // perturbed XXZ
  double lambda = 0.0;  // next-nearest-neighbour strength
  double mu = 0.5;      // zz anisotropy (NN and NNN)
  // tilted Ising
  double coupling_j = 2.0;
  double field_b = 2.0;
  double theta = 0.0;
  // random-field Heisenberg
  double disorder = 0.0;  // fields uniform in [-h, h]
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;

  std::optional<int> up_spins;  // fixed-N sector
  Parity parity = Parity::None;

  static SpinChainSpec xxz(int sites, double lambda, std::optional<int> up_spins = std::nullopt);
  static SpinChainSpec tilted_ising(int sites, double theta);
  static SpinChainSpec heisenberg(int sites, double disorder, std::uint64_t seed, std::uint64_t realization,
                                  std::optional<int> up_spins = std::nullopt);

  bool conserves_sz() const;
  void validate() const;
};

/// Local fields h_i for the random-field Heisenberg chain, a pure function of
/// (seed, realization).
std::vector<double> random_fields(const SpinChainSpec& spec);

/// Computational basis states spanning a sector, sorted ascending.
class SectorBasis {
 public:
  SectorBasis(int sites, std::vector<std::uint64_t> states);

  int sites() const { return sites_; }
  Index dim() const { return static_cast<Index>(states_.size()); }
  const std::vector<std::uint64_t>& states() const { return states_; }
  std::uint64_t state(Index i) const { return states_[static_cast<std::size_t>(i)]; }

  /// Position of `state` in the basis, or -1 if it lies outside the sector.
  Index index_of(std::uint64_t state) const;

  /// +1 / -1 eigenvalue of sigma^z_site on each basis state.
  RealVector sigma_z(int site) const;

 private:
  int sites_;
  std::vector<std::uint64_t> states_;
};

SectorBasis sector_basis(int sites, int up_spins);
SectorBasis full_basis(int sites);

/// Basis implied by the spec: fixed-N sector when `up_spins` is set.
SectorBasis basis_for(const SpinChainSpec& spec);

/// Dense real symmetric Hamiltonian on `basis`. The parity field of the spec
/// is ignored here; use parity_reduce for that.
RealMatrix build_hamiltonian(const SpinChainSpec& spec, const SectorBasis& basis);
RealMatrix build_hamiltonian(const SpinChainSpec& spec);

/// Reverse the order of the lowest `sites` bits.
std::uint64_t reflect_sites(std::uint64_t state, int sites);

struct ParityBlocks {
  RealMatrix even;
  RealMatrix odd;
};

/// Blocks of H in the symmetric / antisymmetric combinations of each
/// basis state with its mirror image. Throws if the reflection does not map
/// the basis onto itself or ||[H, Pi]|| > 1e-10.
ParityBlocks parity_reduce(const RealMatrix& hamiltonian, const SectorBasis& basis);

/// Hamiltonian for the spec's sector and parity choice, ready for
/// spectral statistics.
RealMatrix reduced_hamiltonian(const SpinChainSpec& spec);

struct SpinOtocRequest {
  int separation = 1;  // operators on sites 0 and l
  char axis_w = 'z';
  char axis_v = 'z';
  double t_start = 0.0;
  double t_end = 1100.0;
  double dt = 0.1;

  Index n_points() const;
  void validate(int sites) const;
};

/// Eigendecomposition H = Q diag(E) Q^T reused over a whole time grid.
struct SpinDiagonalization {
  RealVector energies;
  RealMatrix vectors;
};

SpinDiagonalization diagonalize(const RealMatrix& hamiltonian);

/// C_zz(l, t) = 1 - Re Tr[s0(t) sl s0(t) sl] / D, evaluated as
/// ||[s0(t), sl]||_F^2 / (2D) in the eigenbasis. Only the (z, z) pair is
/// supported; sigma^x would leave a fixed-N sector.
OtocSeries spin_otoc_series(const SpinDiagonalization& eig, const SectorBasis& basis, const SpinOtocRequest& req);
OtocSeries spin_otoc_series(const RealMatrix& hamiltonian, const SectorBasis& basis, const SpinOtocRequest& req);

/// Same quantity at explicit (not necessarily uniform) times.
RealVector spin_otoc_at(const SpinDiagonalization& eig, const SectorBasis& basis, int separation,
                        const RealVector& times);

}  // namespace otoc
