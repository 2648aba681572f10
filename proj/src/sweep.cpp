#include "otoc/sweep.hpp"

#include "otoc/otoc_indicators.hpp"
#include "otoc/quantum_maps.hpp"
#include "otoc/spectral_indicators.hpp"

#include <Eigen/Eigenvalues>
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace otoc {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// --- config -----------------------------------------------------------------

void reject_unknown(const json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw std::invalid_argument("config: section '" + section + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: bad value for '" + section + "." + key + "': " + e.what());
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& section) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  read(j, key, value, section);
  out = value;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const std::set<std::string>& spin_parameters() {
  static const std::set<std::string> names = {"lambda", "mu", "theta", "coupling_j", "field_b", "disorder"};
  return names;
}

double& spin_parameter(SpinChainSpec& spec, const std::string& name) {
  if (name == "lambda") return spec.lambda;
  if (name == "mu") return spec.mu;
  if (name == "theta") return spec.theta;
  if (name == "coupling_j") return spec.coupling_j;
  if (name == "field_b") return spec.field_b;
  if (name == "disorder") return spec.disorder;
  throw std::invalid_argument("unknown spin-chain parameter '" + name + "'");
}

bool parameter_used(SpinFamily family, const std::string& name) {
  switch (family) {
    case SpinFamily::PerturbedXXZ: return name == "lambda" || name == "mu";
    case SpinFamily::TiltedIsing: return name == "theta" || name == "coupling_j" || name == "field_b";
    case SpinFamily::RandomFieldHeisenberg: return name == "disorder";
  }
  return false;
}

json to_json(const SweepConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  json model;
  if (c.experiment == Experiment::Spin) {
    model["family"] = to_string(c.spin.family);
    model["sites"] = c.spin.sites;
    model["up_spins"] = optional_json(c.spin.up_spins);
    model["lambda"] = c.spin.lambda;
    model["mu"] = c.spin.mu;
    model["coupling_j"] = c.spin.coupling_j;
    model["field_b"] = c.spin.field_b;
    model["theta"] = c.spin.theta;
    model["disorder"] = c.spin.disorder;
  } else {
    model["family"] = to_string(c.map_family);
    model["k"] = c.map_k;
  }
  j["model"] = model;
  j["sweep"] = {{"parameter", c.parameter}, {"values", c.values}};
  j["spectral"] = {{"enabled", c.spectral.enabled},
                   {"dim", c.spectral.dim},
                   {"desymmetrize", c.spectral.desymmetrize},
                   {"trim", c.spectral.trim},
                   {"degree", c.spectral.degree},
                   {"center_fraction", c.spectral.center_fraction},
                   {"sites", optional_json(c.spectral.sites)},
                   {"up_spins", optional_json(c.spectral.up_spins)},
                   {"parity", to_string(c.spectral.parity)}};
  j["otoc"] = {{"enabled", c.otoc.enabled},
               {"dim", c.otoc.dim},
               {"steps", c.otoc.steps},
               {"separation", c.otoc.separation},
               {"t_end", c.otoc.t_end},
               {"dt", c.otoc.dt},
               {"t0", optional_json(c.otoc.t0)},
               {"sites", optional_json(c.otoc.sites)},
               {"up_spins", optional_json(c.otoc.up_spins)},
               {"full_space", c.otoc.full_space},
               {"detrend_window", c.otoc.detrend_window},
               {"hann", c.otoc.hann},
               {"save_series", c.otoc.save_series}};
  j["classical"] = {{"enabled", c.classical.enabled},
                    {"n_tot", c.classical.n_tot},
                    {"t_max_first", c.classical.t_max_first},
                    {"t_max_count", c.classical.t_max_count},
                    {"delta", c.classical.delta}};
  j["realizations"] = c.realizations;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output"] = c.output;
  return j;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// --- number formatting ------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("table: bad number '" + s + "'");
  return v;
}

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from_json(const json& j) { return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>(); }

// --- pipelines --------------------------------------------------------------

struct PointRows {
  std::vector<std::pair<std::string, std::pair<double, double>>> values;  // name -> (value, residual)
  std::string error;

  void add(const std::string& name, double value, double residual) { values.push_back({name, {value, residual}}); }
};

double t0_for(const OtocSettings& s, const OtocSeries& series, double spin_default) {
  if (s.t0) return *s.t0;
  return spin_default >= 0.0 ? spin_default : default_t0(series);
}

std::string series_name(const SweepConfig& cfg, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "series_%s_%.6g.csv", cfg.parameter.c_str(), value);
  return (std::filesystem::path(cfg.output) / buf).string();
}

void map_point(const SweepConfig& cfg, double value, int inner_workers, PointRows& out) {
  const double k = value;
  if (cfg.spectral.enabled) {
    const FloquetOperator u = FloquetOperator::build(cfg.map_family, cfg.spectral.dim, k);
    const UnitaryEigen& eig = u.eigen();
    const ComplexVector lambda = eig.phases.unaryExpr([](double p) { return std::polar(1.0, p); });
    const double residual =
        (u.matrix() * eig.vectors - eig.vectors * lambda.asDiagonal()).cwiseAbs().maxCoeff();

    std::vector<RealVector> blocks;
    if (cfg.spectral.desymmetrize) {
      try {
        blocks = symmetry_resolved_phases(u);
      } catch (const std::invalid_argument&) {
        // no reflection symmetry: fall back to the full spectrum
      }
    }
    if (blocks.empty()) blocks = {eig.phases};

    std::vector<double> pooled;
    double ratio_sum = 0.0;
    int ratio_used = 0;
    for (const RealVector& phases : blocks) {
      if (phases.size() < 3) continue;
      RealVector s = unfold_phases(phases);
      pooled.insert(pooled.end(), s.data(), s.data() + s.size());
      RatioResult r = ratio_eta(phases);
      ratio_sum += r.mean_ratio * r.used;
      ratio_used += r.used;
    }
    const RealVector spacings = Eigen::Map<RealVector>(pooled.data(), static_cast<Index>(pooled.size()));
    out.add("beta", brody_fit(spacings).value, residual);
    out.add("rho2", berry_robnik_fit(spacings).value, residual);
    const double mean_ratio = ratio_used > 0 ? ratio_sum / ratio_used : kNaN;
    out.add("eta", (mean_ratio - kRatioPoisson) / (kRatioWignerDyson - kRatioPoisson), residual);
    out.add("xi_E_bar", eigenstate_ipr(eig.vectors), residual);
  }
  if (cfg.otoc.enabled) {
    const FloquetOperator u = FloquetOperator::build(cfg.map_family, cfg.otoc.dim, k);
    const OtocSeries series = map_otoc_series(u, build_schwinger_pair(cfg.otoc.dim), cfg.otoc.steps);
    const double defect = u.unitarity_defect();
    const double t0 = t0_for(cfg.otoc, series, -1.0);
    SpectrumOptions opts{cfg.otoc.detrend_window, cfg.otoc.hann};
    const double sigma = sigma_otoc(series, t0);
    const RealVector tail = series.values.tail(series.size() / 2);
    out.add("otoc_mean", tail.mean(), defect);
    out.add("sigma_otoc", sigma, defect);
    out.add("xi_otoc", xi_otoc(series, t0, opts), defect);
    if (cfg.otoc.save_series) write_text(series_name(cfg, value), series_csv(series));
  }
  if (cfg.classical.enabled) {
    AreaSamplerConfig area = AreaSamplerConfig::defaults_for(cfg.map_family);
    area.n_tot = cfg.classical.n_tot;
    if (cfg.classical.t_max_first > 0) area.t_max_list = AreaSamplerConfig::window(cfg.classical.t_max_first, cfg.classical.t_max_count);
    if (cfg.classical.delta > 0.0) area.delta = cfg.classical.delta;
    area.seed = cfg.seed;
    area.workers = inner_workers;
    const ClassicalMapSpec spec = cfg.map_family == MapFamily::Standard ? ClassicalMapSpec::standard(k)
                                                                        : ClassicalMapSpec::harper(k);
    const AreaRatio ratio = chaotic_area_ratio(spec, area);
    out.add("r_ch", ratio.r_ch, ratio.stderr_);
    out.add("r_reg", ratio.r_reg, ratio.stderr_);
  }
}

void spin_point(const SweepConfig& cfg, double value, PointRows& out) {
  SpinChainSpec base = cfg.spin;
  spin_parameter(base, cfg.parameter) = value;
  const int realizations = base.family == SpinFamily::RandomFieldHeisenberg ? cfg.realizations : 1;

  struct Acc {
    double sum = 0.0, resid = 0.0;
    void add(double v, double r) {
      sum += v;
      resid = std::max(resid, r);
    }
  };
  std::map<std::string, Acc> acc;
  const char* order[] = {"beta", "rho2", "eta", "xi_E_bar", "otoc_mean", "sigma_otoc", "xi_otoc"};

  for (int r = 0; r < realizations; ++r) {
    SpinChainSpec spec = base;
    spec.seed = cfg.seed;
    spec.realization = static_cast<std::uint64_t>(r);

    if (cfg.spectral.enabled) {
      SpinChainSpec s = spec;
      if (cfg.spectral.sites) s.sites = *cfg.spectral.sites;
      if (cfg.spectral.up_spins) s.up_spins = *cfg.spectral.up_spins;
      // random fields break reflection symmetry
      s.parity = s.family == SpinFamily::RandomFieldHeisenberg ? Parity::None : cfg.spectral.parity;
      const RealMatrix h = reduced_hamiltonian(s);
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
      if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
      const RealVector& e = es.eigenvalues();
      const RealMatrix& v = es.eigenvectors();
      const double residual = (h * v - v * e.asDiagonal()).cwiseAbs().maxCoeff();
      const RealVector spacings = unfold(e, cfg.spectral.trim, cfg.spectral.degree);
      acc["beta"].add(brody_fit(spacings).value, residual);
      acc["rho2"].add(berry_robnik_fit(spacings).value, residual);
      acc["eta"].add(ratio_eta(e).eta, residual);
      acc["xi_E_bar"].add(eigenstate_ipr(v, cfg.spectral.center_fraction), residual);
    }
    if (cfg.otoc.enabled) {
      SpinChainSpec s = spec;
      if (cfg.otoc.sites) s.sites = *cfg.otoc.sites;
      if (cfg.otoc.up_spins) s.up_spins = *cfg.otoc.up_spins;
      if (cfg.otoc.full_space) s.up_spins.reset();
      s.parity = Parity::None;
      const SectorBasis basis = basis_for(s);
      const RealMatrix h = build_hamiltonian(s, basis);
      SpinOtocRequest req;
      req.separation = cfg.otoc.separation;
      req.t_end = cfg.otoc.t_end;
      req.dt = cfg.otoc.dt;
      const OtocSeries series = spin_otoc_series(h, basis, req);
      const double t0 = t0_for(cfg.otoc, series, 100.0);
      SpectrumOptions opts{cfg.otoc.detrend_window, cfg.otoc.hann};
      Index first = 0;
      while (first < series.size() && !(series.times(first) > t0)) ++first;
      acc["otoc_mean"].add(series.values.tail(series.size() - first).mean(), 0.0);
      acc["sigma_otoc"].add(sigma_otoc(series, t0), 0.0);
      acc["xi_otoc"].add(xi_otoc(series, t0, opts), 0.0);
      if (cfg.otoc.save_series && r == 0) write_text(series_name(cfg, value), series_csv(series));
    }
  }
  for (const char* name : order) {
    auto it = acc.find(name);
    if (it != acc.end()) out.add(name, it->second.sum / realizations, it->second.resid);
  }
}

void run_point(const SweepConfig& cfg, double value, int inner_workers, PointRows& out) {
  switch (cfg.experiment) {
    case Experiment::QuantumMap: map_point(cfg, value, inner_workers, out); break;
    case Experiment::Classical: map_point(cfg, value, inner_workers, out); break;
    case Experiment::Spin: spin_point(cfg, value, out); break;
  }
}

}  // namespace

const char* to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Classical: return "classical";
    case Experiment::QuantumMap: return "qmap";
    case Experiment::Spin: return "spin";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "classical") return Experiment::Classical;
  if (name == "qmap") return Experiment::QuantumMap;
  if (name == "spin") return Experiment::Spin;
  throw std::invalid_argument("unknown experiment '" + name + "' (expected classical, qmap or spin)");
}

void SweepConfig::validate() const {
  if (values.empty()) throw std::invalid_argument("config: sweep.values is empty");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("config: sweep.values must be finite");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw std::invalid_argument("config: sweep.values must be strictly increasing");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");

  if (experiment == Experiment::Spin) {
    if (!spin_parameters().count(parameter) || !parameter_used(spin.family, parameter))
      throw std::invalid_argument("config: parameter '" + parameter + "' does not exist on the " +
                                  to_string(spin.family) + " chain");
    SpinChainSpec probe = spin;
    for (double v : values) {
      spin_parameter(probe, parameter) = v;
      probe.validate();
    }
    if (!spectral.enabled && !otoc.enabled) throw std::invalid_argument("config: nothing to compute");
    if (otoc.enabled) {
      SpinOtocRequest req;
      req.separation = otoc.separation;
      req.t_end = otoc.t_end;
      req.dt = otoc.dt;
      req.validate(otoc.sites.value_or(spin.sites));
    }
  } else {
    if (parameter != "k") throw std::invalid_argument("config: maps sweep parameter must be 'k'");
    for (double v : values)
      if (v < 0.0) throw std::invalid_argument("config: map kick strength must be >= 0");
    if (experiment == Experiment::Classical && !classical.enabled)
      throw std::invalid_argument("config: classical experiment with classical.enabled = false");
    if (experiment == Experiment::QuantumMap) {
      if (!spectral.enabled && !otoc.enabled && !classical.enabled)
        throw std::invalid_argument("config: nothing to compute");
      if (spectral.enabled && spectral.dim < 2) throw std::invalid_argument("config: spectral.dim must be >= 2");
      if (otoc.enabled && (otoc.dim < 2 || otoc.steps < 1)) throw std::invalid_argument("config: bad otoc.dim/steps");
    }
    if (classical.enabled) {
      if (classical.n_tot < 1) throw std::invalid_argument("config: classical.n_tot must be >= 1");
      if (classical.delta < 0.0 || classical.delta >= 0.5) throw std::invalid_argument("config: classical.delta out of range");
    }
  }
}

SweepConfig parse_sweep_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  reject_unknown(j, "", {"experiment", "model", "sweep", "spectral", "otoc", "classical", "realizations", "seed",
                         "workers", "output"});
  SweepConfig c;
  if (!j.contains("experiment")) throw std::invalid_argument("config: 'experiment' is required");
  c.experiment = experiment_from_string(j.at("experiment").get<std::string>());

  const json model = j.value("model", json::object());
  std::string family;
  if (c.experiment == Experiment::Spin) {
    reject_unknown(model, "model", {"family", "sites", "up_spins", "lambda", "mu", "coupling_j", "field_b", "theta", "disorder"});
    read(model, "family", family, "model");
    if (!family.empty()) c.spin.family = spin_family_from_string(family);
    read(model, "sites", c.spin.sites, "model");
    read(model, "up_spins", c.spin.up_spins, "model");
    read(model, "lambda", c.spin.lambda, "model");
    read(model, "mu", c.spin.mu, "model");
    read(model, "coupling_j", c.spin.coupling_j, "model");
    read(model, "field_b", c.spin.field_b, "model");
    read(model, "theta", c.spin.theta, "model");
    read(model, "disorder", c.spin.disorder, "model");
  } else {
    reject_unknown(model, "model", {"family", "k"});
    read(model, "family", family, "model");
    if (!family.empty()) c.map_family = map_family_from_string(family);
    read(model, "k", c.map_k, "model");
  }

  if (!j.contains("sweep")) throw std::invalid_argument("config: 'sweep' section is required");
  const json& sw = j.at("sweep");
  reject_unknown(sw, "sweep", {"parameter", "values", "range"});
  read(sw, "parameter", c.parameter, "sweep");
  if (sw.contains("values") && sw.contains("range"))
    throw std::invalid_argument("config: give sweep.values or sweep.range, not both");
  if (sw.contains("values")) read(sw, "values", c.values, "sweep");
  if (sw.contains("range")) {
    const json& r = sw.at("range");
    reject_unknown(r, "sweep.range", {"start", "stop", "count"});
    double start = 0, stop = 0;
    int count = 0;
    read(r, "start", start, "sweep.range");
    read(r, "stop", stop, "sweep.range");
    read(r, "count", count, "sweep.range");
    if (count < 1) throw std::invalid_argument("config: sweep.range.count must be >= 1");
    for (int i = 0; i < count; ++i) c.values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  }

  if (c.experiment == Experiment::Classical) {
    c.spectral.enabled = false;
    c.otoc.enabled = false;
    c.classical.enabled = true;
  }
  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    reject_unknown(s, "spectral", {"enabled", "dim", "desymmetrize", "trim", "degree", "center_fraction", "sites",
                                   "up_spins", "parity"});
    read(s, "enabled", c.spectral.enabled, "spectral");
    read(s, "dim", c.spectral.dim, "spectral");
    read(s, "desymmetrize", c.spectral.desymmetrize, "spectral");
    read(s, "trim", c.spectral.trim, "spectral");
    read(s, "degree", c.spectral.degree, "spectral");
    read(s, "center_fraction", c.spectral.center_fraction, "spectral");
    read(s, "sites", c.spectral.sites, "spectral");
    read(s, "up_spins", c.spectral.up_spins, "spectral");
    std::string parity;
    read(s, "parity", parity, "spectral");
    if (!parity.empty()) c.spectral.parity = parity_from_string(parity);
  }
  if (j.contains("otoc")) {
    const json& o = j.at("otoc");
    reject_unknown(o, "otoc", {"enabled", "dim", "steps", "separation", "t_end", "dt", "t0", "sites", "up_spins",
                               "full_space", "detrend_window", "hann", "save_series"});
    read(o, "enabled", c.otoc.enabled, "otoc");
    read(o, "dim", c.otoc.dim, "otoc");
    read(o, "steps", c.otoc.steps, "otoc");
    read(o, "separation", c.otoc.separation, "otoc");
    read(o, "t_end", c.otoc.t_end, "otoc");
    read(o, "dt", c.otoc.dt, "otoc");
    read(o, "t0", c.otoc.t0, "otoc");
    read(o, "sites", c.otoc.sites, "otoc");
    read(o, "up_spins", c.otoc.up_spins, "otoc");
    read(o, "full_space", c.otoc.full_space, "otoc");
    read(o, "detrend_window", c.otoc.detrend_window, "otoc");
    read(o, "hann", c.otoc.hann, "otoc");
    read(o, "save_series", c.otoc.save_series, "otoc");
  }
  if (j.contains("classical")) {
    const json& k = j.at("classical");
    reject_unknown(k, "classical", {"enabled", "n_tot", "t_max_first", "t_max_count", "delta"});
    read(k, "enabled", c.classical.enabled, "classical");
    read(k, "n_tot", c.classical.n_tot, "classical");
    read(k, "t_max_first", c.classical.t_max_first, "classical");
    read(k, "t_max_count", c.classical.t_max_count, "classical");
    read(k, "delta", c.classical.delta, "classical");
  }
  read(j, "realizations", c.realizations, "");
  read(j, "seed", c.seed, "");
  read(j, "workers", c.workers, "");
  read(j, "output", c.output, "");
  c.validate();
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_sweep_config(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string canonical_config(const SweepConfig& cfg) { return to_json(cfg).dump(); }

std::string config_hash(const SweepConfig& cfg) {
  json j = to_json(cfg);
  j.erase("workers");
  j.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::vector<std::pair<double, double>> ResultTable::column(const std::string& indicator) const {
  std::vector<std::pair<double, double>> out;
  for (const ResultRow& row : rows)
    if (row.indicator == indicator) out.push_back({row.parameter, row.value});
  return out;
}

ResultTable run_sweep(const SweepConfig& cfg, const SweepProgress& progress) {
  cfg.validate();
  const std::size_t n = cfg.values.size();
  const int pool = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n));
  const int inner = pool > 1 ? 1 : cfg.workers;

  std::vector<PointRows> results(n);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        run_point(cfg, cfg.values[i], inner, results[i]);
      } catch (const std::exception& e) {
        results[i].values.clear();
        results[i].error = e.what();
      }
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(cfg.values[i], results[i].error.empty() ? "ok" : results[i].error);
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    for (int w = 1; w < pool; ++w) threads.emplace_back(worker);
    worker();
  }

  // within-sweep normalization over the successful points
  struct Norm {
    const char* source;
    const char* target;
    NormalizeMode mode;
  };
  const Norm norms[] = {{"sigma_otoc", "sigma_otoc_inv_bar", NormalizeMode::InvMin},
                        {"xi_otoc", "xi_otoc_bar", NormalizeMode::Max},
                        {"r_reg", "r_reg_inv_bar", NormalizeMode::InvMin}};
  for (const Norm& norm : norms) {
    std::vector<std::size_t> idx;
    std::vector<double> vals, resid;
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [name, vr] : results[i].values)
        if (name == norm.source) {
          idx.push_back(i);
          vals.push_back(vr.first);
          resid.push_back(vr.second);
        }
    if (vals.empty()) continue;
    std::vector<double> scaled;
    try {
      scaled = normalize_sweep(vals, norm.mode);
    } catch (const std::invalid_argument&) {
      continue;  // e.g. r_reg = 0 somewhere: the normalized column is undefined
    }
    for (std::size_t m = 0; m < idx.size(); ++m) results[idx[m]].add(norm.target, scaled[m], resid[m]);
  }

  ResultTable table;
  table.config_json = canonical_config(cfg);
  const std::string hash = config_hash(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i].error.empty()) {
      table.rows.push_back({cfg.values[i], "error", kNaN, kNaN, hash});
      table.errors.push_back({cfg.values[i], results[i].error});
      continue;
    }
    for (const auto& [name, vr] : results[i].values) table.rows.push_back({cfg.values[i], name, vr.first, vr.second, hash});
  }
  return table;
}

std::string serialize(const ResultTable& table, TableFormat format) {
  if (table.rows.empty()) throw std::invalid_argument("serialize: empty table");
  if (format == TableFormat::Csv) {
    std::string out = "parameter,indicator,value,diag_residual,config_hash\n";
    for (const ResultRow& r : table.rows) {
      out += format_double(r.parameter) + "," + r.indicator + "," + format_double(r.value) + "," +
             format_double(r.diag_residual) + "," + r.config_hash + "\n";
    }
    return out;
  }
  json j;
  j["columns"] = {"parameter", "indicator", "value", "diag_residual", "config_hash"};
  json rows = json::array();
  for (const ResultRow& r : table.rows)
    rows.push_back({number_json(r.parameter), r.indicator, number_json(r.value), number_json(r.diag_residual), r.config_hash});
  j["rows"] = rows;
  json errors = json::array();
  for (const PointError& e : table.errors) errors.push_back({{"parameter", number_json(e.parameter)}, {"message", e.message}});
  j["errors"] = errors;
  j["config"] = table.config_json.empty() ? json(nullptr) : json::parse(table.config_json);
  // default dump prints doubles with 17 significant digits when needed
  return j.dump(1) + "\n";
}

ResultTable parse_table(const std::string& text, TableFormat format) {
  ResultTable table;
  if (format == TableFormat::Csv) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "parameter,indicator,value,diag_residual,config_hash")
      throw std::invalid_argument("table: missing or wrong CSV header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      if (f.size() != 5) throw std::invalid_argument("table: expected 5 columns in '" + line + "'");
      table.rows.push_back({parse_double(f[0]), f[1], parse_double(f[2]), parse_double(f[3]), f[4]});
    }
    return table;
  }
  const json j = json::parse(text);
  for (const json& r : j.at("rows"))
    table.rows.push_back({number_from_json(r.at(0)), r.at(1).get<std::string>(), number_from_json(r.at(2)),
                          number_from_json(r.at(3)), r.at(4).get<std::string>()});
  for (const json& e : j.value("errors", json::array()))
    table.errors.push_back({number_from_json(e.at("parameter")), e.at("message").get<std::string>()});
  if (j.contains("config") && !j.at("config").is_null()) table.config_json = j.at("config").dump();
  return table;
}

void write_text(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    fs::create_directories(parent, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + parent.string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_table(const ResultTable& table, const std::string& path, TableFormat format) {
  write_text(path, serialize(table, format));
}

std::string series_csv(const OtocSeries& series) {
  std::string out = "t,C\n";
  for (Index i = 0; i < series.size(); ++i)
    out += format_double(series.times(i)) + "," + format_double(series.values(i)) + "\n";
  return out;
}

}  // namespace otoc
