#pragma once
// qsep/config_io.hpp — JSON configuration plumbing for the command-line
// tools: strict key-checked parsing (unknown keys are configuration errors,
// so typos fail loudly), schedule (de)serialization, canonical config
// hashing, and the run manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsep/errors.hpp"
#include "qsep/model.hpp"
#include "qsep/schedule.hpp"

namespace qsep {

using nlohmann::json;

// ===== Strict object view =====

/// View over one JSON object that records which keys were consumed; finish()
/// rejects any leftovers. Nested objects get their own view.
class strict_json {
 public:
  explicit strict_json(json obj, std::string where = "config")
      : obj_(std::move(obj)), where_(std::move(where)) {
    if (!obj_.is_object())
      throw config_error(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& take(const std::string& key) {
    const auto it = obj_.find(key);
    if (it == obj_.end())
      throw config_error(where_ + ": missing required key \"" + key + "\"");
    used_.insert(key);
    return *it;
  }

  template <typename T>
  T take_or(const std::string& key, T fallback) {
    const auto it = obj_.find(key);
    if (it == obj_.end()) return fallback;
    used_.insert(key);
    try {
      return it->get<T>();
    } catch (const json::exception& e) {
      throw config_error(where_ + ": bad value for \"" + key + "\": " + e.what());
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key()))
        throw config_error(where_ + ": unknown key \"" + it.key() + "\"");
  }

 private:
  json obj_;  // owned copy, so views over temporaries stay valid
  std::string where_;
  std::set<std::string> used_;
};

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("cannot parse " + path.string() + ": " + e.what());
  }
}

// ===== Schedules =====

/// Accepted forms: a bare number (constant over the horizon); an object
/// {"shape": "constant"|"linear"|"cosine", "from": v, "to": v} spanning the
/// whole horizon; or an array of segment objects {"t0","t1","shape","from",
/// "to"} tiling [0, horizon].
inline schedule schedule_from_json(const json& j, double horizon,
                                   const std::string& where) {
  const auto shape_of = [&](const std::string& s) {
    if (s == "constant") return segment_shape::constant;
    if (s == "linear") return segment_shape::linear_ramp;
    if (s == "cosine") return segment_shape::cosine_ramp;
    throw config_error(where + ": unknown shape \"" + s + "\"");
  };
  if (j.is_number()) return schedule::constant(j.get<double>(), horizon);
  if (j.is_object()) {
    strict_json v(j, where);
    const std::string shape = v.take_or<std::string>("shape", "linear");
    if (shape == "constant") {
      const double value = v.take_or<double>("value", v.take_or<double>("from", 0.0));
      v.finish();
      return schedule::constant(value, horizon);
    }
    const double from = v.take_or<double>("from", 0.0);
    const double to = v.take_or<double>("to", from);
    v.finish();
    return schedule({{0.0, horizon, shape_of(shape), from, to}});
  }
  if (j.is_array()) {
    std::vector<schedule_segment> segs;
    for (const auto& e : j) {
      strict_json v(e, where + " segment");
      schedule_segment s;
      s.t_begin = v.take_or<double>("t0", 0.0);
      s.t_end = v.take_or<double>("t1", horizon);
      s.shape = shape_of(v.take_or<std::string>("shape", "constant"));
      s.v0 = v.take_or<double>("from", 0.0);
      // Consume "to" regardless of shape (serialized constants carry it too).
      const double to_value = v.take_or<double>("to", s.v0);
      s.v1 = s.shape == segment_shape::constant ? s.v0 : to_value;
      v.finish();
      segs.push_back(s);
    }
    return schedule(std::move(segs));
  }
  throw config_error(where + ": expected a number, object, or segment array");
}

inline json schedule_to_json(const schedule& s) {
  if (s.is_constant()) return json(s.segments().front().v0);
  json arr = json::array();
  for (const auto& seg : s.segments()) {
    json e;
    e["t0"] = seg.t_begin;
    e["t1"] = seg.t_end;
    e["shape"] = seg.shape == segment_shape::constant ? "constant"
                 : seg.shape == segment_shape::linear_ramp ? "linear"
                                                           : "cosine";
    e["from"] = seg.v0;
    e["to"] = seg.v1;
    arr.push_back(e);
  }
  return arr;
}

// ===== Model configuration =====

/// Flat model description shared by the simulation-facing subcommands.
struct model_config {
  std::string family = "liggett";  // or "reversible"
  int n = 128;
  double a = 1.0;
  double p_bar = 1.0;
  double horizon = 1.0;
  schedule rho_minus = schedule::constant(0.3, 1.0);
  schedule rho_plus = schedule::constant(0.6, 1.0);
  double sigma = 0.0;        // reversible only; 0 = default n^(1/4)
  double sigma_tilde = 0.0;  // reversible only; 0 = default n^(1/2)
  double lambda_bar_minus = 1.0;
  double lambda_bar_plus = 1.0;

  /// Consumes the model keys from an open strict view (the caller may have
  /// verb-specific keys of its own in the same object).
  void read(strict_json& v) {
    family = v.take_or<std::string>("family", family);
    if (family != "liggett" && family != "reversible")
      throw config_error("config: family must be \"liggett\" or \"reversible\"");
    n = v.take_or<int>("n", n);
    a = v.take_or<double>("a", a);
    p_bar = v.take_or<double>("pbar", p_bar);
    horizon = v.take_or<double>("horizon", horizon);
    sigma = v.take_or<double>("sigma", sigma);
    sigma_tilde = v.take_or<double>("sigma_tilde", sigma_tilde);
    lambda_bar_minus = v.take_or<double>("lambda_bar_minus", lambda_bar_minus);
    lambda_bar_plus = v.take_or<double>("lambda_bar_plus", lambda_bar_plus);
    if (v.has("rho_minus"))
      rho_minus = schedule_from_json(v.take("rho_minus"), horizon, "rho_minus");
    else if (std::abs(rho_minus.horizon() - horizon) > 1e-12)
      rho_minus = schedule::constant(rho_minus.value(0.0), horizon);
    if (v.has("rho_plus"))
      rho_plus = schedule_from_json(v.take("rho_plus"), horizon, "rho_plus");
    else if (std::abs(rho_plus.horizon() - horizon) > 1e-12)
      rho_plus = schedule::constant(rho_plus.value(0.0), horizon);
  }

  json to_json() const {
    json j;
    j["family"] = family;
    j["n"] = n;
    j["a"] = a;
    j["pbar"] = p_bar;
    j["horizon"] = horizon;
    j["rho_minus"] = schedule_to_json(rho_minus);
    j["rho_plus"] = schedule_to_json(rho_plus);
    if (family == "reversible") {
      j["sigma"] = sigma;
      j["sigma_tilde"] = sigma_tilde;
      j["lambda_bar_minus"] = lambda_bar_minus;
      j["lambda_bar_plus"] = lambda_bar_plus;
    }
    return j;
  }

  model_spec to_spec() const {
    if (family == "liggett")
      return make_liggett_spec(n, a, p_bar, rho_minus, rho_plus, horizon);
    return make_reversible_spec(n, a, p_bar, rho_minus, rho_plus, horizon, sigma,
                                sigma_tilde, lambda_bar_minus, lambda_bar_plus);
  }
};

// ===== Hashing and manifest =====

/// FNV-1a 64-bit hash, rendered as 16 hex digits; applied to the canonical
/// (sorted-key) JSON dump of the effective configuration.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

inline std::string config_hash(const json& effective_config) {
  return fnv1a_hex(effective_config.dump());
}

/// Writes manifest.json next to the data files. Wall-clock information lives
/// only here, never in the CSVs, so data files stay byte-reproducible.
inline void write_manifest(const std::filesystem::path& dir, const json& effective_config,
                           std::uint64_t seed, double wall_seconds,
                           const std::string& started_at_utc) {
  json m;
  m["config_hash"] = config_hash(effective_config);
  m["seed"] = seed;
  m["versions"]["qsep"] = version_string;
  m["wall_time_seconds"] = wall_seconds;
  m["started_at_utc"] = started_at_utc;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write manifest.json in " + dir.string());
  out << m.dump(2) << '\n';
}

}  // namespace qsep
