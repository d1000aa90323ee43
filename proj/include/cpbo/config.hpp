#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace cpbo {

enum class Scenario { sampling, pool };

enum class Classifier {
  label_propagation,
  label_spreading,
  nadaraya_watson_control,  // propagation with an empty unlabeled set
  random_search
};

enum class SamplerKind { truncnorm, uniform, halton, sobol };

inline const char* to_string(Scenario s) {
  return s == Scenario::sampling ? "sampling" : "pool";
}

inline const char* to_string(Classifier c) {
  switch (c) {
    case Classifier::label_propagation: return "label_propagation";
    case Classifier::label_spreading: return "label_spreading";
    case Classifier::nadaraya_watson_control: return "nadaraya_watson_control";
    default: return "random_search";
  }
}

inline const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::truncnorm: return "truncnorm";
    case SamplerKind::uniform: return "uniform";
    case SamplerKind::halton: return "halton";
    default: return "sobol";
  }
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "sampling") return Scenario::sampling;
  if (s == "pool") return Scenario::pool;
  throw std::invalid_argument("unknown scenario: " + s);
}

inline Classifier classifier_from_string(const std::string& s) {
  if (s == "label_propagation" || s == "lp") return Classifier::label_propagation;
  if (s == "label_spreading" || s == "ls") return Classifier::label_spreading;
  if (s == "nadaraya_watson_control" || s == "nw") return Classifier::nadaraya_watson_control;
  if (s == "random_search" || s == "random") return Classifier::random_search;
  throw std::invalid_argument("unknown classifier: " + s);
}

inline SamplerKind sampler_from_string(const std::string& s) {
  if (s == "truncnorm") return SamplerKind::truncnorm;
  if (s == "uniform") return SamplerKind::uniform;
  if (s == "halton") return SamplerKind::halton;
  if (s == "sobol") return SamplerKind::sobol;
  throw std::invalid_argument("unknown sampler: " + s);
}

// Per-run configuration. Defaults follow the experiment protocol; every field
// maps to one flat config-file key and one CLI flag of the same name.
// Precedence is flag > file > default.
struct RunConfig {
  double zeta = 0.33;                  // threshold ratio, (0, 1)
  Scenario scenario = Scenario::sampling;
  Classifier classifier = Classifier::label_propagation;
  int n_unlabeled = 100;               // sampling scenario only
  std::optional<int> pool_subset;      // pool scenario: unlabeled subset size
  double alpha = 0.2;                  // spreading clamp factor, (0, 1)
  bool learn_beta = true;              // beta_mode: learned vs fixed(beta)
  double beta = 0.5;                   // fixed value; also the search start
  int max_prop_iters = 1000;           // tau
  double prop_tol = 1e-6;              // eps
  int n_starts = 1000;                 // acquisition multi-start count
  int iterations = 100;                // T
  int n_init = 5;                      // initial design size
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::truncnorm;
  double truncnorm_stddev = 1.0;       // per-dimension sd of unlabeled sampling
  double tie_tol = 1e-9;               // acquisition tie / flatness tolerance
  int max_ascent_steps = 200;
  double ascent_tol = 1e-6;

  void validate() const {
    if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("config: zeta must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must be in (0,1)");
    if (n_unlabeled < 0) throw std::invalid_argument("config: n_unlabeled must be >= 0");
    if (pool_subset && *pool_subset <= 0) throw std::invalid_argument("config: pool_subset must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be > 0");
    if (max_prop_iters <= 0) throw std::invalid_argument("config: max_prop_iters must be > 0");
    if (!(prop_tol > 0.0)) throw std::invalid_argument("config: prop_tol must be > 0");
    if (n_starts <= 0) throw std::invalid_argument("config: n_starts must be > 0");
    if (iterations < 0) throw std::invalid_argument("config: iterations must be >= 0");
    if (n_init <= 0) throw std::invalid_argument("config: n_init must be > 0");
    if (!(truncnorm_stddev > 0.0)) throw std::invalid_argument("config: truncnorm_stddev must be > 0");
    if (!(tie_tol >= 0.0)) throw std::invalid_argument("config: tie_tol must be >= 0");
    if (max_ascent_steps <= 0) throw std::invalid_argument("config: max_ascent_steps must be > 0");
    if (!(ascent_tol > 0.0)) throw std::invalid_argument("config: ascent_tol must be > 0");
  }

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad real value: '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer value: '" + s + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline std::map<std::string, std::string> config_to_map(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["zeta"] = detail::format_double(c.zeta);
  m["scenario"] = to_string(c.scenario);
  m["classifier"] = to_string(c.classifier);
  m["n_unlabeled"] = std::to_string(c.n_unlabeled);
  if (c.pool_subset) m["pool_subset"] = std::to_string(*c.pool_subset);
  m["alpha"] = detail::format_double(c.alpha);
  m["beta_mode"] = c.learn_beta ? "learned" : "fixed";
  m["beta"] = detail::format_double(c.beta);
  m["max_prop_iters"] = std::to_string(c.max_prop_iters);
  m["prop_tol"] = detail::format_double(c.prop_tol);
  m["n_starts"] = std::to_string(c.n_starts);
  m["iterations"] = std::to_string(c.iterations);
  m["n_init"] = std::to_string(c.n_init);
  m["seed"] = std::to_string(c.seed);
  m["sampler"] = to_string(c.sampler);
  m["truncnorm_stddev"] = detail::format_double(c.truncnorm_stddev);
  m["tie_tol"] = detail::format_double(c.tie_tol);
  m["max_ascent_steps"] = std::to_string(c.max_ascent_steps);
  m["ascent_tol"] = detail::format_double(c.ascent_tol);
  return m;
}

inline RunConfig config_from_map(const std::map<std::string, std::string>& m) {
  RunConfig c;
  for (const auto& [key, val] : m) {
    if (key == "zeta") c.zeta = detail::parse_double(val);
    else if (key == "scenario") c.scenario = scenario_from_string(val);
    else if (key == "classifier") c.classifier = classifier_from_string(val);
    else if (key == "n_unlabeled") c.n_unlabeled = static_cast<int>(detail::parse_int(val));
    else if (key == "pool_subset") c.pool_subset = static_cast<int>(detail::parse_int(val));
    else if (key == "alpha") c.alpha = detail::parse_double(val);
    else if (key == "beta_mode") {
      if (val == "learned") c.learn_beta = true;
      else if (val == "fixed") c.learn_beta = false;
      else throw std::invalid_argument("beta_mode must be 'learned' or 'fixed'");
    }
    else if (key == "beta") c.beta = detail::parse_double(val);
    else if (key == "max_prop_iters") c.max_prop_iters = static_cast<int>(detail::parse_int(val));
    else if (key == "prop_tol") c.prop_tol = detail::parse_double(val);
    else if (key == "n_starts") c.n_starts = static_cast<int>(detail::parse_int(val));
    else if (key == "iterations") c.iterations = static_cast<int>(detail::parse_int(val));
    else if (key == "n_init") c.n_init = static_cast<int>(detail::parse_int(val));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_int(val));
    else if (key == "sampler") c.sampler = sampler_from_string(val);
    else if (key == "truncnorm_stddev") c.truncnorm_stddev = detail::parse_double(val);
    else if (key == "tie_tol") c.tie_tol = detail::parse_double(val);
    else if (key == "max_ascent_steps") c.max_ascent_steps = static_cast<int>(detail::parse_int(val));
    else if (key == "ascent_tol") c.ascent_tol = detail::parse_double(val);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return c;
}

// Flat key=value file, one entry per line, '#' comments.
inline void write_config_file(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  for (const auto& [key, val] : config_to_map(c)) out << key << "=" << val << "\n";
}

inline RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::map<std::string, std::string> m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    m[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
  }
  return config_from_map(m);
}

}  // namespace cpbo
