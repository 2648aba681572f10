// Command-line front end: one subcommand per module plus the sweep runner.
#include "otoc/classical_maps.hpp"
#include "otoc/otoc_indicators.hpp"
#include "otoc/quantum_maps.hpp"
#include "otoc/short_time.hpp"
#include "otoc/spectral_indicators.hpp"
#include "otoc/spin_chains.hpp"
#include "otoc/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace otoc;
using nlohmann::json;

namespace {

struct Global {
  std::string config;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "out";
};

// Flat JSON defaults for a subcommand: keys are long option names, either
// at top level or under a section named after the subcommand. Flags given
// on the command line win.
void apply_config_defaults(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j = json::parse(in);
  if (j.contains(sub->get_name()) && j.at(sub->get_name()).is_object()) j = j.at(sub->get_name());
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw std::invalid_argument("config: '" + key + "' is not an option of '" + sub->get_name() + "'");
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> items;
    auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array())
      for (const json& v : value) items.push_back(text(v));
    else
      items.push_back(text(value));
    opt->clear();
    for (const std::string& s : items) opt->add_result(s);
    opt->run_callback();
  }
}

std::string path_in(const Global& g, const std::string& name) {
  return (std::filesystem::path(g.out) / name).string();
}

// One row per grid point, one column per indicator, in first-seen order.
std::string wide_csv(const ResultTable& table, const std::string& parameter) {
  std::vector<std::string> columns;
  std::map<double, std::map<std::string, double>> grid;
  for (const ResultRow& r : table.rows) {
    if (r.indicator == "error") {
      grid[r.parameter];
      continue;
    }
    if (std::find(columns.begin(), columns.end(), r.indicator) == columns.end()) columns.push_back(r.indicator);
    grid[r.parameter][r.indicator] = r.value;
  }
  std::ostringstream out;
  out.precision(17);
  out << parameter;
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& [p, row] : grid) {
    out << p;
    for (const auto& c : columns) {
      auto it = row.find(c);
      out << ',';
      if (it != row.end()) out << it->second;
    }
    out << '\n';
  }
  return out.str();
}

int finish(const ResultTable& table, const Global& g, const std::string& stem, const std::string& parameter) {
  write_table(table, path_in(g, stem + "_table.csv"), TableFormat::Csv);
  write_table(table, path_in(g, stem + "_table.json"), TableFormat::Json);
  write_text(path_in(g, stem + "_summary.csv"), wide_csv(table, parameter));
  for (const PointError& e : table.errors) std::cerr << "point " << e.parameter << " failed: " << e.message << '\n';
  std::cout << "wrote " << path_in(g, stem + "_summary.csv") << " (" << table.rows.size() << " rows, "
            << table.errors.size() << " failed points)\n";
  return table.ok() ? 0 : 1;
}

SweepProgress stderr_progress(const std::string& parameter) {
  return [parameter](double v, const std::string& status) {
    std::fprintf(stderr, "%s = %.6g: %s\n", parameter.c_str(), v, status.c_str());
  };
}

std::vector<double> grid_from(const std::vector<double>& list, const std::vector<double>& range) {
  if (!list.empty()) return list;
  if (range.size() == 3) {
    const int count = static_cast<int>(range[2]);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? range[0] : range[0] + (range[1] - range[0]) * i / (count - 1));
    return out;
  }
  return {};
}

RealVector read_column(const std::string& path, int column, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first && skip_header) {
      first = false;
      if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '.') continue;
    }
    std::stringstream ls(line);
    std::string cell;
    for (int c = 0; c <= column; ++c)
      if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ": missing column in '" + line + "'");
    values.push_back(std::stod(cell));
  }
  return Eigen::Map<RealVector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OTOC and quantum-chaos indicators for kicked maps and spin chains"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config, "JSON config (sweep schema for 'sweep', flat option defaults otherwise)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  // classical
  auto* classical = app.add_subcommand("classical", "Chaotic area fraction of the classical maps");
  std::string c_family = "standard";
  std::vector<double> c_k, c_range;
  int c_ntot = 35000, c_first = 0, c_count = 20;
  double c_delta = 0.0;
  classical->add_option("--family", c_family, "standard | harper");
  classical->add_option("--k", c_k, "Kick strengths");
  classical->add_option("--k-range", c_range, "start stop count")->expected(3);
  classical->add_option("--n-tot", c_ntot, "Initial conditions");
  classical->add_option("--t-max-first", c_first, "First return-time cap (0: family default)");
  classical->add_option("--t-max-count", c_count, "Number of consecutive caps averaged");
  classical->add_option("--delta", c_delta, "Return radius (0: family default)");

  // qmap
  auto* qmap = app.add_subcommand("qmap", "Quantum map spectra and OTOC indicators");
  std::string q_family = "standard";
  std::vector<double> q_k, q_range;
  Index q_dim = 600, q_sdim = 1000;
  int q_steps = 6000;
  bool q_no_spec = false, q_no_otoc = false, q_raw = false, q_classical = false;
  qmap->add_option("--family", q_family, "standard | harper");
  qmap->add_option("--k", q_k, "Kick strengths");
  qmap->add_option("--k-range", q_range, "start stop count")->expected(3);
  qmap->add_option("--dim", q_dim, "Hilbert dimension for the OTOC");
  qmap->add_option("--spectral-dim", q_sdim, "Hilbert dimension for spectra");
  qmap->add_option("--steps", q_steps, "Map iterations");
  qmap->add_flag("--no-spectral", q_no_spec, "Skip spectral indicators");
  qmap->add_flag("--no-otoc", q_no_otoc, "Skip the OTOC");
  qmap->add_flag("--raw-spectrum", q_raw, "Fit the full spectrum without splitting it by symmetry");
  qmap->add_flag("--classical", q_classical, "Also sample the classical area fraction");

  // spin
  auto* spin = app.add_subcommand("spin", "Spin-chain OTOC and spectral indicators at one parameter point");
  std::string s_family = "xxz", s_parity = "even";
  int s_sites = 10, s_l = 1, s_real = 100;
  std::optional<int> s_up, s_spec_sites, s_spec_up;
  double s_lambda = 0.0, s_mu = 0.5, s_theta = 0.0, s_h = 0.0, s_j = 2.0, s_b = 2.0;
  double s_tend = 1100.0, s_dt = 0.1;
  std::optional<double> s_t0;
  bool s_full = false, s_no_spec = false;
  spin->add_option("--family", s_family, "xxz | tilted_ising | heisenberg");
  spin->add_option("--sites", s_sites, "Chain length L for the OTOC");
  spin->add_option("--up-spins", s_up, "Sector N for the OTOC (conserving chains)");
  spin->add_flag("--full-space", s_full, "Use all 2^L states for the OTOC");
  spin->add_option("--l", s_l, "Separation of the two sigma^z operators");
  spin->add_option("--lambda", s_lambda, "XXZ next-nearest-neighbour strength");
  spin->add_option("--mu", s_mu, "XXZ anisotropy");
  spin->add_option("--theta", s_theta, "Tilted Ising field angle (radians)");
  spin->add_option("--j", s_j, "Tilted Ising coupling");
  spin->add_option("--b", s_b, "Tilted Ising field");
  spin->add_option("--disorder", s_h, "Heisenberg random-field width h");
  spin->add_option("--t-end", s_tend, "Final time");
  spin->add_option("--dt", s_dt, "Time step");
  spin->add_option("--t0", s_t0, "Transient cutoff for long-time indicators");
  spin->add_option("--realizations", s_real, "Disorder realizations");
  spin->add_option("--spectral-sites", s_spec_sites, "Chain length for spectra (default: --sites)");
  spin->add_option("--spectral-up-spins", s_spec_up, "Sector for spectra (default: --up-spins)");
  spin->add_option("--parity", s_parity, "Parity block for spectra: even | odd | none (ignored for heisenberg)");
  spin->add_flag("--no-spectral", s_no_spec, "Skip spectral indicators");

  // indicators
  auto* ind = app.add_subcommand("indicators", "Indicators from files: an OTOC series or a level list");
  std::string i_series, i_levels;
  bool i_phases = false;
  std::optional<double> i_t0;
  int i_detrend = 0;
  ind->add_option("--series", i_series, "CSV with columns t,C (uniform grid)");
  ind->add_option("--levels", i_levels, "One level (or eigenphase) per line, first column");
  ind->add_flag("--phases", i_phases, "Levels are eigenphases in [0, 2 pi)");
  ind->add_option("--t0", i_t0, "Transient cutoff (default: 20% of the series)");
  ind->add_option("--detrend", i_detrend, "Moving-average detrend window in samples");

  // shorttime
  auto* st = app.add_subcommand("shorttime", "Short-time power-law fit against the nested-commutator prediction");
  std::string t_family = "heisenberg";
  int t_sites = 9;
  std::optional<int> t_up;
  std::vector<int> t_ls{1, 2, 3};
  double t_lambda = 0.0, t_theta = 0.25 * kPi, t_h = 0.5;
  double t_floor = ShortTimeOptions{}.c_floor, t_cap = ShortTimeOptions{}.prediction_cap;
  st->add_option("--family", t_family, "xxz | tilted_ising | heisenberg");
  st->add_option("--sites", t_sites, "Chain length");
  st->add_option("--up-spins", t_up, "Sector N (conserving chains)");
  st->add_option("--l", t_ls, "Separations");
  st->add_option("--lambda", t_lambda, "XXZ next-nearest-neighbour strength");
  st->add_option("--theta", t_theta, "Tilted Ising angle (radians)");
  st->add_option("--disorder", t_h, "Heisenberg random-field width");
  st->add_option("--c-floor", t_floor, "Smallest leading-term C in the fit window");
  st->add_option("--c-cap", t_cap, "Largest leading-term C in the fit window");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a JSON-configured parameter sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (active != sweep) apply_config_defaults(active, g.config);

    if (active == classical) {
      SweepConfig cfg;
      cfg.experiment = Experiment::Classical;
      cfg.map_family = map_family_from_string(c_family);
      cfg.values = grid_from(c_k, c_range);
      cfg.spectral.enabled = cfg.otoc.enabled = false;
      cfg.classical = {true, c_ntot, c_first, c_count, c_delta};
      cfg.seed = g.seed;
      cfg.workers = g.workers;
      cfg.output = g.out;
      return finish(run_sweep(cfg, stderr_progress("k")), g, "classical", "k");
    }

    if (active == qmap) {
      SweepConfig cfg;
      cfg.experiment = Experiment::QuantumMap;
      cfg.map_family = map_family_from_string(q_family);
      cfg.values = grid_from(q_k, q_range);
      cfg.spectral.enabled = !q_no_spec;
      cfg.spectral.dim = q_sdim;
      cfg.spectral.desymmetrize = !q_raw;
      cfg.otoc.enabled = !q_no_otoc;
      cfg.otoc.dim = q_dim;
      cfg.otoc.steps = q_steps;
      cfg.otoc.save_series = true;
      cfg.classical.enabled = q_classical;
      cfg.seed = g.seed;
      cfg.workers = g.workers;
      cfg.output = g.out;
      return finish(run_sweep(cfg, stderr_progress("k")), g, "qmap", "k");
    }

    if (active == spin) {
      SweepConfig cfg;
      cfg.experiment = Experiment::Spin;
      SpinChainSpec& m = cfg.spin;
      m.family = spin_family_from_string(s_family);
      m.sites = s_sites;
      m.up_spins = s_up;
      m.lambda = s_lambda;
      m.mu = s_mu;
      m.theta = s_theta;
      m.coupling_j = s_j;
      m.field_b = s_b;
      m.disorder = s_h;
      switch (m.family) {
        case SpinFamily::PerturbedXXZ: cfg.parameter = "lambda"; cfg.values = {s_lambda}; break;
        case SpinFamily::TiltedIsing: cfg.parameter = "theta"; cfg.values = {s_theta}; break;
        case SpinFamily::RandomFieldHeisenberg: cfg.parameter = "disorder"; cfg.values = {s_h}; break;
      }
      cfg.spectral.enabled = !s_no_spec;
      cfg.spectral.sites = s_spec_sites;
      cfg.spectral.up_spins = s_spec_up ? s_spec_up : s_up;
      cfg.spectral.parity = parity_from_string(s_parity);
      cfg.otoc.separation = s_l;
      cfg.otoc.t_end = s_tend;
      cfg.otoc.dt = s_dt;
      cfg.otoc.t0 = s_t0;
      cfg.otoc.full_space = s_full;
      cfg.otoc.save_series = true;
      cfg.realizations = s_real;
      cfg.seed = g.seed;
      cfg.workers = g.workers;
      cfg.output = g.out;
      return finish(run_sweep(cfg, stderr_progress(cfg.parameter)), g, "spin", cfg.parameter);
    }

    if (active == ind) {
      if (i_series.empty() == i_levels.empty()) throw std::invalid_argument("give exactly one of --series or --levels");
      std::ostringstream out;
      out.precision(17);
      out << "indicator,value\n";
      if (!i_series.empty()) {
        OtocSeries s;
        s.times = read_column(i_series, 0, true);
        s.values = read_column(i_series, 1, true);
        if (s.size() < 2) throw std::invalid_argument("series needs at least 2 samples");
        s.dt = s.times(1) - s.times(0);
        const double t0 = i_t0 ? *i_t0 : default_t0(s);
        const double sigma = sigma_otoc(s, t0);
        out << "sigma_otoc," << sigma << "\nsigma_otoc_inv," << 1.0 / sigma << "\nxi_otoc,"
            << xi_otoc(s, t0, {i_detrend, false}) << '\n';
      } else {
        RealVector levels = read_column(i_levels, 0, true);
        std::sort(levels.data(), levels.data() + levels.size());
        const RealVector spacings = i_phases ? unfold_phases(levels) : unfold(levels);
        out << "beta," << brody_fit(spacings).value << "\nrho2," << berry_robnik_fit(spacings).value << "\neta,"
            << ratio_eta(levels).eta << '\n';
      }
      write_text(path_in(g, "indicators.csv"), out.str());
      std::cout << out.str();
      return 0;
    }

    if (active == st) {
      SpinChainSpec spec;
      spec.family = spin_family_from_string(t_family);
      spec.sites = t_sites;
      spec.up_spins = t_up;
      spec.lambda = t_lambda;
      spec.theta = t_theta;
      spec.disorder = t_h;
      spec.seed = g.seed;
      ShortTimeOptions opts;
      opts.c_floor = t_floor;
      opts.prediction_cap = t_cap;
      std::ostringstream out;
      out.precision(17);
      out << "l,predicted_exponent,fitted_exponent,prefactor_ratio,exact_ratio\n";
      for (int l : t_ls) {
        const ShortTimeReport r = short_time_check(spec, l, opts);
        out << l << ',' << r.predicted_exponent << ',' << r.fit.exponent << ',' << r.prefactor_ratio << ','
            << r.exact_ratio << '\n';
      }
      write_text(path_in(g, "shorttime.csv"), out.str());
      std::cout << out.str();
      return 0;
    }

    if (active == sweep) {
      if (g.config.empty()) throw std::invalid_argument("sweep needs --config");
      SweepConfig cfg = load_sweep_config(g.config);
      if (app.get_option("--seed")->count()) cfg.seed = g.seed;
      if (app.get_option("--workers")->count()) cfg.workers = g.workers;
      if (app.get_option("--out")->count()) cfg.output = g.out;
      cfg.validate();
      g.out = cfg.output;
      const ResultTable table = run_sweep(cfg, stderr_progress(cfg.parameter));
      return finish(table, g, "sweep", cfg.parameter);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
