#pragma once

#include "otoc/classical_maps.hpp"
#include "otoc/spin_chains.hpp"
#include "otoc/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace otoc {

enum class Experiment { Classical, QuantumMap, Spin };

const char* to_string(Experiment experiment);
Experiment experiment_from_string(const std::string& name);

struct SpectralSettings {
  bool enabled = true;
  Index dim = 1000;               // maps
  bool desymmetrize = true;       // maps: fit each symmetry block separately
  double trim = 0.1;              // spin chains: unfolding
  int degree = 7;
  double center_fraction = 0.1;   // spin chains: IPR over the central states
  std::optional<int> sites;       // spin chains: overrides the model
  std::optional<int> up_spins;
  Parity parity = Parity::Even;  // ignored for the random-field chain
};

struct OtocSettings {
  bool enabled = true;
  Index dim = 600;                // maps
  int steps = 6000;               // maps
  int separation = 1;             // spin chains
  double t_end = 1100.0;
  double dt = 0.1;
  std::optional<double> t0;       // default: 100 for spin chains, 20% of the run for maps
  std::optional<int> sites;
  std::optional<int> up_spins;
  bool full_space = false;        // spin chains: ignore the sector and use all 2^L states
  int detrend_window = 0;
  bool hann = false;
  bool save_series = false;       // write one (t, C) CSV per point into the output directory
};

struct ClassicalSettings {
  bool enabled = false;
  int n_tot = 35000;
  int t_max_first = 0;            // 0: family default
  int t_max_count = 20;
  double delta = 0.0;             // 0: family default
};

/// One experiment over a grid of one model parameter.
struct SweepConfig {
  Experiment experiment = Experiment::QuantumMap;
  MapFamily map_family = MapFamily::Standard;
  double map_k = 1.0;
  SpinChainSpec spin;
  std::string parameter = "k";
  std::vector<double> values;
  SpectralSettings spectral;
  OtocSettings otoc;
  ClassicalSettings classical;
  int realizations = 100;         // random-field Heisenberg only
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output = "out";

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Parses and schema-checks a JSON config; unknown keys are errors and
/// missing keys take the defaults above.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

/// Canonical JSON of every field (defaults included), sorted keys.
std::string canonical_config(const SweepConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical config without the
/// run-local fields (workers, output).
std::string config_hash(const SweepConfig& cfg);

struct ResultRow {
  double parameter = 0.0;
  std::string indicator;
  double value = 0.0;
  double diag_residual = 0.0;
  std::string config_hash;
};

struct PointError {
  double parameter = 0.0;
  std::string message;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<PointError> errors;
  std::string config_json;  // canonical echo, empty when parsed from CSV

  bool ok() const { return errors.empty(); }
  /// Values of one indicator in row order, with their parameters.
  std::vector<std::pair<double, double>> column(const std::string& indicator) const;
};

using SweepProgress = std::function<void(double parameter, const std::string& status)>;

/// Runs the configured pipeline at every grid point on a pool of
/// cfg.workers threads, then appends the within-sweep normalized
/// indicators. A failing point becomes an "error" row; the others go on.
ResultTable run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {});

enum class TableFormat { Csv, Json };

/// Fixed columns parameter, indicator, value, diag_residual, config_hash;
/// numbers at 17 significant digits.
std::string serialize(const ResultTable& table, TableFormat format);
ResultTable parse_table(const std::string& text, TableFormat format);

/// Writes `serialize(table, format)` to `path`, creating parent directories.
/// Throws std::runtime_error carrying the path on I/O failure.
void write_table(const ResultTable& table, const std::string& path, TableFormat format);

/// Two-column (t, C) CSV at 17 significant digits.
std::string series_csv(const OtocSeries& series);
void write_text(const std::string& path, const std::string& text);

}  // namespace otoc
