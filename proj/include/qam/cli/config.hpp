#pragma once

// Run configuration: one JSON document per run. Every object is checked for
// unknown keys before anything is computed.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qam/ensemble.hpp"
#include "qam/params.hpp"

namespace qam::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { simulate, scan_tau, portrait, bands, farey, husimi, beta_scan };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::scan_tau: return "scan-tau";
    case Experiment::portrait: return "portrait";
    case Experiment::bands: return "bands";
    case Experiment::farey: return "farey";
    case Experiment::husimi: return "husimi";
    case Experiment::beta_scan: return "beta-scan";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::simulate, Experiment::scan_tau, Experiment::portrait, Experiment::bands,
                 Experiment::farey, Experiment::husimi, Experiment::beta_scan})
    if (s == to_string(e)) return e;
  throw ConfigError("unknown experiment '" + s + "'");
}

/// Read-only view of a JSON object that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": required key missing");
    return convert<T>(j_.at(key), path_ + "." + key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), path_ + "." + key);
  }

  Section sub(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": required section missing");
    return Section(j_.at(key), path_ + "." + key);
  }

  std::optional<Section> optional_sub(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": required key missing");
    return j_.at(key);
  }

  /// Throws on any key that was never asked for.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

  const std::string& path() const { return path_; }

 private:
  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

/// A 1D grid given either as an explicit list or as {start, stop, count}
/// (inclusive end points) or {start, step, count}.
inline std::vector<double> read_grid(const json& v, const std::string& where) {
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where + ": grid entries must be numbers");
      out.push_back(x.get<double>());
    }
    if (out.empty()) throw ConfigError(where + ": empty grid");
    return out;
  }
  Section s(v, where);
  const double start = s.get<double>("start");
  const auto count = s.get<std::size_t>("count");
  if (count < 1) throw ConfigError(where + ".count: must be >= 1");
  double step = 0.0;
  if (s.has("stop") && s.has("step")) throw ConfigError(where + ": give either stop or step");
  if (s.has("stop")) {
    const double stop = s.get<double>("stop");
    step = count > 1 ? (stop - start) / static_cast<double>(count - 1) : 0.0;
  } else {
    step = s.get<double>("step");
  }
  s.finish();
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  return out;
}

struct SystemConfig {
  double k = 1.0;
  double tau_over_2pi = 1.455;
  double g = 0.0;
  int p = 1, q = 1, nu = 0;
  double beta = 0.0;

  SystemParams build() const { return build_params(k, tau_over_2pi, g, p, q, nu, beta); }
};

inline SystemConfig read_system(Section s) {
  SystemConfig c;
  c.k = s.get<double>("k");
  c.tau_over_2pi = s.get<double>("tau_over_2pi");
  c.g = s.get<double>("g", 0.0);
  c.p = s.get<int>("p");
  c.q = s.get<int>("q");
  c.nu = s.get<int>("nu", 0);
  c.beta = s.get<double>("beta", 0.0);
  s.finish();
  try {
    (void)c.build();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  return c;
}

enum class InitialKind { plane_wave, coherent, band_packet, gaussian_ensemble };

struct InitialConfig {
  InitialKind kind = InitialKind::plane_wave;
  long n0 = 0;                 // plane_wave
  double vartheta0 = 0.0;      // coherent, band_packet
  double I0 = 0.0;             // coherent
  double N0 = 0.0;             // band_packet
  int band = 0;                // band_packet; orbit search band
  std::optional<std::array<long, 2>> orbit;  // launch on a stable (r, s) orbit
  double fwhm = 9.0;           // ensemble
  std::size_t count = 100;
  std::string beta_policy = "fractional";
  double mean = 0.0;
  std::size_t ladder_size = 1024;
};

inline std::array<long, 2> read_pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(where + ": expected [r, s]");
  return {v[0].get<long>(), v[1].get<long>()};
}

inline InitialConfig read_initial(Section s) {
  InitialConfig c;
  const auto kind = s.get<std::string>("kind");
  if (kind == "plane_wave") {
    c.kind = InitialKind::plane_wave;
    c.n0 = s.get<long>("n0", 0);
  } else if (kind == "coherent") {
    c.kind = InitialKind::coherent;
    c.vartheta0 = s.get<double>("vartheta0", 0.0);
    c.I0 = s.get<double>("I0", 0.0);
    c.band = s.get<int>("band", 0);
    if (s.has("orbit")) c.orbit = read_pair(s.raw("orbit"), s.path() + ".orbit");
  } else if (kind == "band_packet") {
    c.kind = InitialKind::band_packet;
    c.vartheta0 = s.get<double>("vartheta0", 0.0);
    c.N0 = s.get<double>("N0", 0.0);
    c.band = s.get<int>("band", 0);
    if (s.has("orbit")) c.orbit = read_pair(s.raw("orbit"), s.path() + ".orbit");
  } else if (kind == "gaussian_ensemble") {
    c.kind = InitialKind::gaussian_ensemble;
    c.fwhm = s.get<double>("fwhm", 9.0);
    c.count = s.get<std::size_t>("count", 100);
    c.beta_policy = s.get<std::string>("beta_policy", std::string("fractional"));
    if (c.beta_policy != "fractional" && c.beta_policy != "fixed")
      throw ConfigError(s.path() + ".beta_policy: expected 'fractional' or 'fixed'");
    c.mean = s.get<double>("mean", 0.0);
  } else {
    throw ConfigError(s.path() + ".kind: unknown initial state '" + kind + "'");
  }
  c.ladder_size = s.get<std::size_t>("ladder_size", 1024);
  s.finish();
  return c;
}

inline qkp::Gauge read_gauge(const std::string& g, const std::string& where) {
  if (g == "falling") return qkp::Gauge::falling;
  if (g == "lab") return qkp::Gauge::lab;
  throw ConfigError(where + ": expected 'falling' or 'lab'");
}

struct HusimiGridConfig {
  std::size_t vartheta_points = 128;
  double I_min = -1.0, I_max = 1.0;
  std::size_t I_points = 128;
};

inline HusimiGridConfig read_husimi_grid(Section s) {
  HusimiGridConfig h;
  h.vartheta_points = s.get<std::size_t>("vartheta_points", 128);
  h.I_min = s.get<double>("I_min");
  h.I_max = s.get<double>("I_max");
  h.I_points = s.get<std::size_t>("I_points", 128);
  s.finish();
  if (h.vartheta_points < 2 || h.I_points < 2 || !(h.I_max > h.I_min))
    throw ConfigError(s.path() + ": invalid Husimi grid");
  return h;
}

/// Fully parsed configuration. `canonical` is the document re-serialized
/// with sorted keys; it is what output headers echo.
struct RunConfig {
  Experiment experiment = Experiment::simulate;
  SystemConfig system;
  std::uint64_t seed = 1;
  std::string canonical;

  // simulate / husimi
  std::optional<InitialConfig> initial;
  long kicks = 100;
  std::vector<long> record;
  double bin_width = qkp::kDefaultBinWidth;
  qkp::Gauge gauge = qkp::Gauge::falling;
  std::optional<std::array<double, 2>> momentum_range;
  std::optional<HusimiGridConfig> husimi;

  // scan-tau
  std::vector<double> tau_grid;
  std::vector<std::array<long, 2>> modes;
  int mode_band = 0;

  // portrait
  int band = 0;
  long iterations = 500;
  std::array<int, 2> seed_grid{16, 16};
  std::vector<std::array<double, 2>> seeds;
  std::vector<std::array<long, 2>> orbits;

  // bands
  std::vector<double> k_values;
  std::size_t band_grid = 0;

  // farey
  std::vector<std::array<long, 2>> resonances;
  int max_terms = 8;
  double threshold = 0.25;
  std::vector<std::array<std::array<long, 2>, 2>> mediants;
  int mediant_steps = 3;

  // beta-scan
  std::vector<double> beta_grid;
  double box_width = 6.0;
  std::array<long, 2> mode{1, 1};
  double N0 = 0.0;
  std::vector<long> windings{0, 1, 2};
};

inline std::vector<std::array<long, 2>> read_pairs(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected a list of [a, b] pairs");
  std::vector<std::array<long, 2>> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(read_pair(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Parse and validate. `expected` is the subcommand; the document may name
/// its experiment too, and then the two must agree.
inline RunConfig parse_config(const json& doc, Experiment expected) {
  RunConfig c;
  Section root(doc, "config");
  c.experiment = expected;
  if (root.has("experiment")) {
    const auto named = parse_experiment(root.get<std::string>("experiment"));
    if (named != expected)
      throw ConfigError(std::string("config is for '") + to_string(named) + "', not '" +
                        to_string(expected) + "'");
  }
  if (expected != Experiment::farey) c.system = read_system(root.sub("system"));
  c.seed = root.get<std::uint64_t>("seed", 1);

  switch (expected) {
    case Experiment::simulate:
    case Experiment::husimi: {
      c.initial = read_initial(root.sub("initial"));
      c.kicks = root.get<long>("kicks", 100);
      if (c.kicks < 0) throw ConfigError("config.kicks: must be >= 0");
      c.record = root.get<std::vector<long>>("record", std::vector<long>{c.kicks});
      for (long t : c.record)
        if (t < 0 || t > c.kicks) throw ConfigError("config.record: times must lie in [0, kicks]");
      if (expected == Experiment::simulate) {
        c.bin_width = root.get<double>("bin_width", qkp::kDefaultBinWidth);
        c.gauge = read_gauge(root.get<std::string>("gauge", std::string("falling")), "config.gauge");
        if (root.has("momentum_range")) {
          const auto r = root.get<std::vector<double>>("momentum_range");
          if (r.size() != 2 || !(r[1] > r[0])) throw ConfigError("config.momentum_range: expected [lo, hi]");
          c.momentum_range = std::array<double, 2>{r[0], r[1]};
        }
        if (auto h = root.optional_sub("husimi")) c.husimi = read_husimi_grid(*h);
      } else {
        c.husimi = read_husimi_grid(root.sub("grid"));
      }
      if (c.husimi && c.initial->kind == InitialKind::gaussian_ensemble)
        throw ConfigError("config: Husimi grids need a single initial state");
      break;
    }
    case Experiment::scan_tau: {
      c.tau_grid = read_grid(root.raw("tau_over_2pi"), "config.tau_over_2pi");
      c.initial = read_initial(root.sub("ensemble_initial"));
      if (c.initial->kind != InitialKind::gaussian_ensemble)
        throw ConfigError("config.ensemble_initial.kind: scan-tau needs gaussian_ensemble");
      c.kicks = root.get<long>("kicks", 100);
      if (c.kicks < 0) throw ConfigError("config.kicks: must be >= 0");
      c.bin_width = root.get<double>("bin_width", qkp::kDefaultBinWidth);
      c.gauge = read_gauge(root.get<std::string>("gauge", std::string("falling")), "config.gauge");
      const auto r = root.get<std::vector<double>>("momentum_range");
      if (r.size() != 2 || !(r[1] > r[0])) throw ConfigError("config.momentum_range: expected [lo, hi]");
      c.momentum_range = std::array<double, 2>{r[0], r[1]};
      if (root.has("modes")) c.modes = read_pairs(root.raw("modes"), "config.modes");
      break;
    }
    case Experiment::portrait: {
      c.band = root.get<int>("band", 0);
      c.iterations = root.get<long>("iterations", 500);
      if (c.iterations < 1) throw ConfigError("config.iterations: must be >= 1");
      if (root.has("seed_grid")) {
        const auto g = root.get<std::vector<int>>("seed_grid");
        if (g.size() != 2 || g[0] < 1 || g[1] < 1) throw ConfigError("config.seed_grid: expected [nx, ny]");
        c.seed_grid = {g[0], g[1]};
      }
      if (root.has("seeds")) {
        const auto& v = root.raw("seeds");
        if (!v.is_array()) throw ConfigError("config.seeds: expected a list of [vartheta, J]");
        for (const auto& p : v) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError("config.seeds: expected [vartheta, J] pairs");
          c.seeds.push_back({p[0].get<double>(), p[1].get<double>()});
        }
      }
      if (root.has("orbits")) c.orbits = read_pairs(root.raw("orbits"), "config.orbits");
      break;
    }
    case Experiment::bands: {
      c.k_values = root.get<std::vector<double>>("k_values", std::vector<double>{c.system.k});
      c.band_grid = root.get<std::size_t>("grid", 0);
      break;
    }
    case Experiment::farey: {
      c.system.g = root.get<double>("g");
      if (!(c.system.g >= 0.0)) throw ConfigError("config.g: must be >= 0");
      c.resonances = read_pairs(root.raw("resonances"), "config.resonances");
      for (const auto& r : c.resonances)
        if (r[0] < 1 || r[1] < 1) throw ConfigError("config.resonances: p and q must be positive");
      c.max_terms = root.get<int>("max_terms", 8);
      if (c.max_terms < 1) throw ConfigError("config.max_terms: must be >= 1");
      c.threshold = root.get<double>("threshold", 0.25);
      if (root.has("mediants")) {
        const auto& v = root.raw("mediants");
        if (!v.is_array()) throw ConfigError("config.mediants: expected a list of [[r1,s1],[r2,s2]]");
        for (const auto& m : v) {
          const auto pr = read_pairs(m, "config.mediants");
          if (pr.size() != 2) throw ConfigError("config.mediants: expected two fractions per entry");
          for (const auto& f : pr)
            if (f[1] < 1) throw ConfigError("config.mediants: denominators must be >= 1");
          c.mediants.push_back({pr[0], pr[1]});
        }
      }
      c.mediant_steps = root.get<int>("mediant_steps", 3);
      break;
    }
    case Experiment::beta_scan: {
      if (root.has("beta")) {
        c.beta_grid = read_grid(root.raw("beta"), "config.beta");
        for (double b : c.beta_grid)
          if (!(b >= 0.0 && b < 1.0)) throw ConfigError("config.beta: values must lie in [0, 1)");
      } else {
        for (int i = 0; i < 64; ++i) c.beta_grid.push_back(i / 64.0);
      }
      c.kicks = root.get<long>("kicks", 100);
      if (c.kicks < 0) throw ConfigError("config.kicks: must be >= 0");
      c.box_width = root.get<double>("box_width", 6.0);
      if (!(c.box_width > 0.0)) throw ConfigError("config.box_width: must be positive");
      c.band = root.get<int>("band", 0);
      if (root.has("mode")) c.mode = read_pair(root.raw("mode"), "config.mode");
      c.N0 = root.get<double>("N0", 0.0);
      c.windings = root.get<std::vector<long>>("windings", c.windings);
      break;
    }
  }
  root.finish();
  if (expected != Experiment::farey && expected != Experiment::bands &&
      (c.band < 0 || c.band >= c.system.q))
    throw ConfigError("config.band: must lie in [0, q)");
  if (c.initial && (c.initial->band < 0 || c.initial->band >= c.system.q))
    throw ConfigError("config.initial.band: must lie in [0, q)");
  c.canonical = doc.dump();
  return c;
}

inline json read_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace qam::cli
