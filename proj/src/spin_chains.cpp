#include "otoc/spin_chains.hpp"

#include "otoc/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace otoc {

const char* to_string(SpinFamily family) {
  switch (family) {
    case SpinFamily::PerturbedXXZ: return "xxz";
    case SpinFamily::TiltedIsing: return "tilted_ising";
    case SpinFamily::RandomFieldHeisenberg: return "heisenberg";
  }
  return "?";
}

SpinFamily spin_family_from_string(const std::string& name) {
  if (name == "xxz") return SpinFamily::PerturbedXXZ;
  if (name == "tilted_ising" || name == "ising") return SpinFamily::TiltedIsing;
  if (name == "heisenberg" || name == "random_field_heisenberg") return SpinFamily::RandomFieldHeisenberg;
  throw std::invalid_argument("unknown spin chain family: " + name);
}

const char* to_string(Parity parity) {
  switch (parity) {
    case Parity::None: return "none";
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
  }
  return "?";
}

Parity parity_from_string(const std::string& name) {
  if (name == "none" || name.empty()) return Parity::None;
  if (name == "even") return Parity::Even;
  if (name == "odd") return Parity::Odd;
  throw std::invalid_argument("unknown parity: " + name);
}

SpinChainSpec SpinChainSpec::xxz(int sites, double lambda, std::optional<int> up_spins) {
  SpinChainSpec spec;
  spec.family = SpinFamily::PerturbedXXZ;
  spec.sites = sites;
  spec.lambda = lambda;
  spec.up_spins = up_spins;
  return spec;
}

SpinChainSpec SpinChainSpec::tilted_ising(int sites, double theta) {
  SpinChainSpec spec;
  spec.family = SpinFamily::TiltedIsing;
  spec.sites = sites;
  spec.theta = theta;
  return spec;
}

SpinChainSpec SpinChainSpec::heisenberg(int sites, double disorder, std::uint64_t seed, std::uint64_t realization,
                                        std::optional<int> up_spins) {
  SpinChainSpec spec;
  spec.family = SpinFamily::RandomFieldHeisenberg;
  spec.sites = sites;
  spec.disorder = disorder;
  spec.seed = seed;
  spec.realization = realization;
  spec.up_spins = up_spins;
  return spec;
}

bool SpinChainSpec::conserves_sz() const {
  return family != SpinFamily::TiltedIsing || std::sin(theta) == 0.0;
}

void SpinChainSpec::validate() const {
  if (sites < 2 || sites > 30) throw std::invalid_argument("spin chain needs 2 <= L <= 30");
  if (up_spins && (*up_spins < 0 || *up_spins > sites)) throw std::invalid_argument("sector N must satisfy 0 <= N <= L");
  if (up_spins && !conserves_sz())
    throw std::invalid_argument("fixed-N sector requested for a tilted Ising chain with theta != 0");
  if (disorder < 0.0) throw std::invalid_argument("disorder width h must be >= 0");
}

std::vector<double> random_fields(const SpinChainSpec& spec) {
  std::vector<double> fields(static_cast<std::size_t>(spec.sites), 0.0);
  if (spec.family != SpinFamily::RandomFieldHeisenberg) return fields;
  CounterRng rng(spec.seed, spec.realization);
  for (double& h : fields) h = spec.disorder * (2.0 * rng.uniform() - 1.0);
  return fields;
}

SectorBasis::SectorBasis(int sites, std::vector<std::uint64_t> states) : sites_(sites), states_(std::move(states)) {
  if (!std::is_sorted(states_.begin(), states_.end())) std::sort(states_.begin(), states_.end());
}

Index SectorBasis::index_of(std::uint64_t state) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) return -1;
  return static_cast<Index>(it - states_.begin());
}

RealVector SectorBasis::sigma_z(int site) const {
  RealVector z(dim());
  for (Index i = 0; i < dim(); ++i) z(i) = (state(i) >> site) & 1U ? 1.0 : -1.0;
  return z;
}

SectorBasis sector_basis(int sites, int up_spins) {
  if (sites < 1 || sites > 62) throw std::invalid_argument("sector_basis: unsupported L");
  if (up_spins < 0 || up_spins > sites) throw std::invalid_argument("sector_basis: need 0 <= N <= L");
  std::vector<std::uint64_t> states;
  if (up_spins == 0) {
    states.push_back(0);
  } else {
    // Gosper's hack enumerates masks with fixed popcount in increasing order.
    std::uint64_t s = (std::uint64_t{1} << up_spins) - 1;
    const std::uint64_t limit = std::uint64_t{1} << sites;
    while (s < limit) {
      states.push_back(s);
      std::uint64_t c = s & (~s + 1);
      std::uint64_t r = s + c;
      s = (((r ^ s) >> 2) / c) | r;
    }
  }
  return SectorBasis(sites, std::move(states));
}

SectorBasis full_basis(int sites) {
  if (sites < 1 || sites > 30) throw std::invalid_argument("full_basis: unsupported L");
  std::vector<std::uint64_t> states(std::size_t{1} << sites);
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = i;
  return SectorBasis(sites, std::move(states));
}

SectorBasis basis_for(const SpinChainSpec& spec) {
  spec.validate();
  return spec.up_spins ? sector_basis(spec.sites, *spec.up_spins) : full_basis(spec.sites);
}

namespace {

double zz(std::uint64_t s, int i, int j) {
  return (((s >> i) ^ (s >> j)) & 1U) ? -1.0 : 1.0;
}

// Adds c (S^x S^x + S^y S^y + anis S^z S^z) on bond (i, j) acting on column `col`.
void add_bond(RealMatrix& h, const SectorBasis& basis, Index col, int i, int j, double c, double anis) {
  const std::uint64_t s = basis.state(col);
  h(col, col) += c * anis * 0.25 * zz(s, i, j);
  if ((((s >> i) ^ (s >> j)) & 1U) != 0U) {
    Index row = basis.index_of(s ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j)));
    if (row >= 0) h(row, col) += 0.5 * c;
  }
}

}  // namespace

RealMatrix build_hamiltonian(const SpinChainSpec& spec, const SectorBasis& basis) {
  spec.validate();
  if (basis.sites() != spec.sites) throw std::invalid_argument("basis length differs from the chain length");
  const int l = spec.sites;
  const Index dim = basis.dim();
  RealMatrix h = RealMatrix::Zero(dim, dim);

  switch (spec.family) {
    case SpinFamily::PerturbedXXZ:
      for (Index col = 0; col < dim; ++col) {
        for (int i = 0; i + 1 < l; ++i) add_bond(h, basis, col, i, i + 1, 1.0, spec.mu);
        if (spec.lambda != 0.0)
          for (int i = 0; i + 2 < l; ++i) add_bond(h, basis, col, i, i + 2, spec.lambda, spec.mu);
      }
      break;
    case SpinFamily::RandomFieldHeisenberg: {
      const std::vector<double> fields = random_fields(spec);
      for (Index col = 0; col < dim; ++col) {
        for (int i = 0; i + 1 < l; ++i) add_bond(h, basis, col, i, i + 1, 1.0, 1.0);
        const std::uint64_t s = basis.state(col);
        for (int i = 0; i < l; ++i) h(col, col) += 0.5 * fields[static_cast<std::size_t>(i)] * ((s >> i) & 1U ? 1.0 : -1.0);
      }
      break;
    }
    case SpinFamily::TiltedIsing: {
      const double bz = spec.field_b * std::cos(spec.theta);
      const double bx = spec.field_b * std::sin(spec.theta);
      for (Index col = 0; col < dim; ++col) {
        const std::uint64_t s = basis.state(col);
        for (int i = 0; i + 1 < l; ++i) h(col, col) += 0.25 * spec.coupling_j * zz(s, i, i + 1);
        for (int i = 0; i < l; ++i) {
          h(col, col) += 0.5 * bz * ((s >> i) & 1U ? 1.0 : -1.0);
          if (bx != 0.0) {
            Index row = basis.index_of(s ^ (std::uint64_t{1} << i));
            if (row < 0) throw std::invalid_argument("transverse field leaves the basis; use the full space");
            h(row, col) += 0.5 * bx;
          }
        }
      }
      break;
    }
  }
  return h;
}

RealMatrix build_hamiltonian(const SpinChainSpec& spec) { return build_hamiltonian(spec, basis_for(spec)); }

std::uint64_t reflect_sites(std::uint64_t state, int sites) {
  std::uint64_t out = 0;
  for (int i = 0; i < sites; ++i)
    if ((state >> i) & 1U) out |= std::uint64_t{1} << (sites - 1 - i);
  return out;
}

ParityBlocks parity_reduce(const RealMatrix& hamiltonian, const SectorBasis& basis) {
  const Index dim = basis.dim();
  if (hamiltonian.rows() != dim || hamiltonian.cols() != dim)
    throw std::invalid_argument("parity_reduce: Hamiltonian does not match the basis");

  std::vector<Index> mirror(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    Index m = basis.index_of(reflect_sites(basis.state(i), basis.sites()));
    if (m < 0) throw std::invalid_argument("parity_reduce: reflection leaves the sector");
    mirror[static_cast<std::size_t>(i)] = m;
  }

  double comm2 = 0.0;
  for (Index b = 0; b < dim; ++b)
    for (Index a = 0; a < dim; ++a) {
      double d = hamiltonian(mirror[static_cast<std::size_t>(a)], mirror[static_cast<std::size_t>(b)]) - hamiltonian(a, b);
      comm2 += d * d;
    }
  if (std::sqrt(comm2) > 1e-10) throw std::invalid_argument("parity_reduce: Hamiltonian does not commute with parity");

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> even_entries, odd_entries;
  Index n_even = 0, n_odd = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < dim; ++i) {
    Index m = mirror[static_cast<std::size_t>(i)];
    if (m == i) {
      even_entries.emplace_back(i, n_even++, 1.0);
    } else if (m > i) {
      even_entries.emplace_back(i, n_even, s);
      even_entries.emplace_back(m, n_even++, s);
      odd_entries.emplace_back(i, n_odd, s);
      odd_entries.emplace_back(m, n_odd++, -s);
    }
  }
  Eigen::SparseMatrix<double> even(dim, n_even), odd(dim, n_odd);
  even.setFromTriplets(even_entries.begin(), even_entries.end());
  odd.setFromTriplets(odd_entries.begin(), odd_entries.end());

  ParityBlocks blocks;
  RealMatrix tmp = hamiltonian * even;
  blocks.even = even.transpose() * tmp;
  tmp = hamiltonian * odd;
  blocks.odd = odd.transpose() * tmp;
  return blocks;
}

RealMatrix reduced_hamiltonian(const SpinChainSpec& spec) {
  const SectorBasis basis = basis_for(spec);
  RealMatrix h = build_hamiltonian(spec, basis);
  if (spec.parity == Parity::None) return h;
  ParityBlocks blocks = parity_reduce(h, basis);
  return spec.parity == Parity::Even ? std::move(blocks.even) : std::move(blocks.odd);
}

Index SpinOtocRequest::n_points() const {
  return static_cast<Index>(std::llround((t_end - t_start) / dt)) + 1;
}

void SpinOtocRequest::validate(int sites) const {
  if (separation < 0 || separation > sites - 1) throw std::invalid_argument("OTOC separation must satisfy 0 <= l <= L-1");
  if (!(dt > 0.0)) throw std::invalid_argument("OTOC time step must be positive");
  if (!(t_end >= t_start)) throw std::invalid_argument("OTOC time grid is empty");
  if (axis_w != 'z' || axis_v != 'z') throw std::invalid_argument("only the (z, z) OTOC is supported");
}

SpinDiagonalization diagonalize(const RealMatrix& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spin Hamiltonian diagonalization failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector spin_otoc_at(const SpinDiagonalization& eig, const SectorBasis& basis, int separation,
                        const RealVector& times) {
  const Index dim = basis.dim();
  if (eig.vectors.rows() != dim) throw std::invalid_argument("diagonalization does not match the basis");
  const RealMatrix& q = eig.vectors;
  const RealMatrix w_eig = q.transpose() * basis.sigma_z(0).asDiagonal() * q;
  const RealMatrix v_eig = q.transpose() * basis.sigma_z(separation).asDiagonal() * q;

  RealVector out(times.size());
  RealVector c(dim), s(dim);
  RealMatrix stacked(2 * dim, dim), prod(2 * dim, dim);
  for (Index n = 0; n < times.size(); ++n) {
    const double t = times(n);
    for (Index j = 0; j < dim; ++j) {
      c(j) = std::cos(eig.energies(j) * t);
      s(j) = std::sin(eig.energies(j) * t);
    }
    // W(t)_{jk} = W_{jk} exp(i (E_j - E_k) t), split into real and imaginary parts.
    stacked.topRows(dim) = c.asDiagonal() * w_eig * c.asDiagonal();
    stacked.topRows(dim) += s.asDiagonal() * w_eig * s.asDiagonal();
    stacked.bottomRows(dim) = s.asDiagonal() * w_eig * c.asDiagonal();
    stacked.bottomRows(dim) -= c.asDiagonal() * w_eig * s.asDiagonal();
    prod.noalias() = stacked * v_eig;
    // [W(t), V] = B - B^dagger with B = W(t) V.
    auto br = prod.topRows(dim);
    auto bi = prod.bottomRows(dim);
    double norm2 = (br - br.transpose()).squaredNorm() + (bi + bi.transpose()).squaredNorm();
    out(n) = norm2 / (2.0 * static_cast<double>(dim));
  }
  return out;
}

OtocSeries spin_otoc_series(const SpinDiagonalization& eig, const SectorBasis& basis, const SpinOtocRequest& req) {
  req.validate(basis.sites());
  OtocSeries series;
  const Index n = req.n_points();
  series.times.resize(n);
  for (Index i = 0; i < n; ++i) series.times(i) = req.t_start + static_cast<double>(i) * req.dt;
  series.values = spin_otoc_at(eig, basis, req.separation, series.times);
  series.dt = req.dt;
  series.metadata["l"] = std::to_string(req.separation);
  series.metadata["axes"] = "zz";
  series.metadata["dim"] = std::to_string(basis.dim());
  return series;
}

OtocSeries spin_otoc_series(const RealMatrix& hamiltonian, const SectorBasis& basis, const SpinOtocRequest& req) {
  return spin_otoc_series(diagonalize(hamiltonian), basis, req);
}

}  // namespace otoc
