#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbf/errors.hpp"
#include "cbf/params.hpp"
#include "cbf/solver.hpp"
#include "cbf/verification.hpp"

namespace cbf {

struct GridConfig {
  int dim = 2;
  int n = 64;
  double period = 2.0 * std::numbers::pi;
};

struct IcConfig {
  std::string family = "taylor_green";  // taylor_green | random | snapshot
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  int band_limit = 8;
  double slope = 2.0;
  std::string path;
};

struct ForcingConfig {
  /// zero | kolmogorov | oscillating_kolmogorov | steady_snapshot | manufactured
  std::string kind = "zero";
  double amplitude = 1.0;
  int wavenumber = 1;
  double omega = 1.0;
  std::string path;
};

struct OutputConfig {
  std::string directory = "cbf_out";
  bool extended_diagnostics = false;
};

struct VerifyConfig {
  std::vector<std::string> checks;  // empty: every check
  std::uint64_t seed = 42;
  int samples = 500;
  int n_points = 32;
  int band_limit = 8;
  double slope = 2.0;
  double amplitude = 1.0;
  double amplitude_spread = 3.0;
  std::vector<double> interpolation{2.0, 4.0, 6.0};
  std::vector<double> filter_n{1.0, 10.0, 100.0, 1000.0, 10000.0};
  std::optional<double> theta;
  int identity_n_points = 64;
  int identity_upsample = 4;
  std::string trajectory_ic = "random";
  double perturbation = 1e-3;
  std::string rho_formula = "standard";
  std::map<std::string, double> tolerances;
};

struct ConvergenceConfig {
  std::string target = "taylor_green";  // taylor_green | energy_residual | linear_decay
  std::vector<double> dt_ladder{4e-3, 2e-3, 1e-3};
  std::vector<int> n_ladder;
  std::optional<double> order_min;
  std::optional<double> order_max;
};

struct RunConfig {
  GridConfig grid;
  CbfParams params{1.0, 0.0, 1.0, 3.0};
  SolverConfig solver;
  IcConfig ic;
  ForcingConfig forcing;
  OutputConfig output;
  VerifyConfig verify;
  ConvergenceConfig convergence;
  /// Directory of the loaded file; relative paths resolve against it.
  std::string base_dir;
};

namespace detail {

inline std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  std::size_t a = 0;
  while (a < s.size() && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  std::size_t b = s.size();
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  if (lead) *lead = a;
  return s.substr(a, b - a);
}

struct RawValue {
  std::string text;
  int line = 0;
  int column = 0;
};

/// Strict number parsing; "pi" and "<number>pi" / "<number>*pi" are accepted.
inline std::optional<double> parse_double(const std::string& text) {
  std::string t = text;
  double factor = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    t.resize(t.size() - 2);
    if (!t.empty() && t.back() == '*') t.pop_back();
    if (t.empty()) return factor;
  }
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
  return v * factor;
}

inline std::optional<long long> parse_int(const std::string& t) {
  long long v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(const std::string& t) {
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  return std::nullopt;
}

inline std::vector<std::string> split_list(const std::string& t) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(t);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

/// Typed accessors over parsed entries; every consumed key is marked.
class Entries {
 public:
  explicit Entries(std::map<std::string, RawValue> values) : values_(std::move(values)) {}

  const RawValue* find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const RawValue* v = find(key);
    throw ConfigError(key + ": " + what + (v ? " (line " + std::to_string(v->line) + ")" : ""), key,
                      v ? v->line : 0, v ? v->column : 0);
  }

  void get(const std::string& key, double& out) const {
    if (auto* v = find(key)) {
      auto d = parse_double(v->text);
      if (!d || !std::isfinite(*d)) fail(key, "expected a finite number, got '" + v->text + "'");
      out = *d;
    }
  }
  void get(const std::string& key, std::optional<double>& out) const {
    if (find(key)) {
      double d = 0.0;
      get(key, d);
      out = d;
    }
  }
  void get(const std::string& key, int& out) const {
    if (auto* v = find(key)) {
      auto d = parse_int(v->text);
      if (!d || *d < -2147483647LL || *d > 2147483647LL) fail(key, "expected an integer, got '" + v->text + "'");
      out = static_cast<int>(*d);
    }
  }
  void get(const std::string& key, std::uint64_t& out) const {
    if (auto* v = find(key)) {
      auto d = parse_int(v->text);
      if (!d || *d < 0) fail(key, "expected a non-negative integer, got '" + v->text + "'");
      out = static_cast<std::uint64_t>(*d);
    }
  }
  void get(const std::string& key, bool& out) const {
    if (auto* v = find(key)) {
      auto b = parse_bool(v->text);
      if (!b) fail(key, "expected true or false, got '" + v->text + "'");
      out = *b;
    }
  }
  void get(const std::string& key, std::string& out) const {
    if (auto* v = find(key)) out = v->text;
  }
  void get(const std::string& key, std::vector<double>& out) const {
    if (auto* v = find(key)) {
      out.clear();
      for (const auto& item : split_list(v->text)) {
        auto d = parse_double(item);
        if (!d || !std::isfinite(*d)) fail(key, "expected a list of numbers, got '" + v->text + "'");
        out.push_back(*d);
      }
    }
  }
  void get(const std::string& key, std::vector<int>& out) const {
    if (auto* v = find(key)) {
      out.clear();
      for (const auto& item : split_list(v->text)) {
        auto d = parse_int(item);
        if (!d) fail(key, "expected a list of integers, got '" + v->text + "'");
        out.push_back(static_cast<int>(*d));
      }
    }
  }
  void get(const std::string& key, std::vector<std::string>& out) const {
    if (auto* v = find(key)) out = split_list(v->text);
  }

  const std::map<std::string, RawValue>& all() const { return values_; }

 private:
  std::map<std::string, RawValue> values_;
};

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"dim", "n", "L"}},
      {"params", {"mu", "alpha", "beta", "r"}},
      {"solver",
       {"dt", "t_end", "scheme", "galerkin_n", "truncation", "dealias", "diagnostics_every", "snapshot_every",
        "substeps"}},
      {"ic", {"family", "amplitude", "seed", "band_limit", "slope", "path"}},
      {"forcing", {"kind", "amplitude", "wavenumber", "omega", "path"}},
      {"output", {"directory", "extended_diagnostics"}},
      {"verify",
       {"checks", "seed", "samples", "n_points", "band_limit", "slope", "amplitude", "amplitude_spread",
        "interpolation", "filter_n", "theta", "identity_n_points", "identity_upsample", "trajectory_ic",
        "perturbation", "rho_formula"}},
      {"convergence", {"target", "dt_ladder", "n_ladder", "order_min", "order_max"}},
  };
  return keys;
}

inline std::map<std::string, RawValue> parse_ini(std::istream& in) {
  std::map<std::string, RawValue> out;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t lead = 0;
    const std::string t = trim(line, &lead);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const int col = static_cast<int>(lead) + 1;
    if (t[0] == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header", "", lineno, col);
      section = trim(t.substr(1, t.size() - 2));
      if (!known_keys().count(section))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]", section, lineno,
                          col);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ", column " + std::to_string(col) +
                            ": expected 'key = value'",
                        "", lineno, col);
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside of any section", "", lineno, col);
    const std::string key = trim(t.substr(0, eq));
    std::string value = t.substr(eq + 1);
    // Trailing comments need whitespace before the marker.
    for (std::size_t i = 1; i < value.size(); ++i) {
      if ((value[i] == '#' || value[i] == ';') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
        value.resize(i);
        break;
      }
    }
    std::size_t vlead = 0;
    const std::string untrimmed = value;
    value = trim(value, &vlead);
    const int vcol = col + static_cast<int>(eq) + 1 + static_cast<int>(vlead);
    const std::string full = section + "." + key;
    const auto& allowed = known_keys().at(section);
    const bool tol_key = section == "verify" && key.rfind("tol.", 0) == 0;
    if (!allowed.count(key) && !tol_key)
      throw ConfigError("line " + std::to_string(lineno) + ", column " + std::to_string(col) + ": unknown key '" +
                            full + "'",
                        full, lineno, col);
    if (tol_key && !is_check_name(key.substr(4)))
      throw ConfigError("line " + std::to_string(lineno) + ", column " + std::to_string(col) +
                            ": tolerance for unknown check '" + key.substr(4) + "'",
                        full, lineno, col);
    if (value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ", column " + std::to_string(vcol) + ": empty value for '" +
                            full + "'",
                        full, lineno, vcol);
    if (out.count(full))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'", full, lineno, col);
    out[full] = RawValue{value, lineno, vcol};
  }
  return out;
}

}  // namespace detail

/// Checks parameter domains; errors name the offending key.
inline void validate_config(const RunConfig& c, const detail::Entries* src = nullptr) {
  auto fail = [&](const std::string& key, const std::string& what) {
    if (src) src->fail(key, what);
    throw ConfigError(key + ": " + what, key);
  };
  if (c.grid.dim != 2 && c.grid.dim != 3) fail("grid.dim", "must be 2 or 3");
  if (c.grid.n < 8 || c.grid.n % 2 != 0) fail("grid.n", "must be even and >= 8");
  if (!(c.grid.period > 0.0)) fail("grid.L", "must be positive");
  if (!(c.params.mu > 0.0)) fail("params.mu", "must be positive");
  if (!(c.params.alpha >= 0.0)) fail("params.alpha", "must be non-negative");
  if (!(c.params.beta >= 0.0)) fail("params.beta", "must be non-negative");
  if (!(c.params.r >= 1.0)) fail("params.r", "must be >= 1");
  if (!(c.solver.dt > 0.0)) fail("solver.dt", "must be positive");
  if (!(c.solver.t_end >= 0.0)) fail("solver.t_end", "must be non-negative");
  if (c.solver.galerkin_n < 0) fail("solver.galerkin_n", "must be >= 0");
  if (c.solver.diagnostics_every < 1) fail("solver.diagnostics_every", "must be >= 1");
  if (c.solver.snapshot_every < 0) fail("solver.snapshot_every", "must be >= 0");
  if (c.solver.substeps < 1) fail("solver.substeps", "must be >= 1");
  const std::set<std::string> families{"taylor_green", "random", "snapshot"};
  if (!families.count(c.ic.family)) fail("ic.family", "must be taylor_green, random or snapshot");
  if (!(c.ic.amplitude >= 0.0)) fail("ic.amplitude", "must be non-negative");
  if (c.ic.family == "random" && (c.ic.band_limit < 0 || c.ic.band_limit >= c.grid.n / 2))
    fail("ic.band_limit", "must lie in [0, n/2)");
  if (c.ic.family == "snapshot" && c.ic.path.empty()) fail("ic.path", "required for the snapshot family");
  const std::set<std::string> kinds{"zero", "kolmogorov", "oscillating_kolmogorov", "steady_snapshot",
                                    "manufactured"};
  if (!kinds.count(c.forcing.kind)) fail("forcing.kind", "unknown forcing kind '" + c.forcing.kind + "'");
  if ((c.forcing.kind == "kolmogorov" || c.forcing.kind == "oscillating_kolmogorov") &&
      (c.forcing.wavenumber < 1 || c.forcing.wavenumber >= c.grid.n / 2))
    fail("forcing.wavenumber", "must lie in [1, n/2)");
  if (c.forcing.kind == "steady_snapshot" && c.forcing.path.empty())
    fail("forcing.path", "required for steady_snapshot forcing");
  if (c.output.directory.empty()) fail("output.directory", "must not be empty");
  for (const auto& name : c.verify.checks)
    if (!is_check_name(name)) fail("verify.checks", "unknown check '" + name + "'");
  if (c.verify.samples < 1) fail("verify.samples", "must be >= 1");
  if (c.verify.n_points < 8 || c.verify.n_points % 2 != 0) fail("verify.n_points", "must be even and >= 8");
  if (c.verify.band_limit < 0 || c.verify.band_limit >= c.verify.n_points / 2)
    fail("verify.band_limit", "must lie in [0, n_points/2)");
  if (!(c.verify.amplitude >= 0.0)) fail("verify.amplitude", "must be non-negative");
  if (!(c.verify.amplitude_spread >= 1.0)) fail("verify.amplitude_spread", "must be >= 1");
  if (c.verify.interpolation.size() != 3) fail("verify.interpolation", "expects three exponents s, rho, t");
  if (c.verify.theta && !(*c.verify.theta > 0.0 && *c.verify.theta < 1.0)) fail("verify.theta", "must lie in (0, 1)");
  if (c.verify.identity_n_points < 8 || c.verify.identity_n_points % 2 != 0)
    fail("verify.identity_n_points", "must be even and >= 8");
  if (c.verify.identity_upsample < 1) fail("verify.identity_upsample", "must be >= 1");
  if (c.verify.trajectory_ic != "random" && c.verify.trajectory_ic != "taylor_green")
    fail("verify.trajectory_ic", "must be random or taylor_green");
  if (!(c.verify.perturbation > 0.0)) fail("verify.perturbation", "must be positive");
  if (c.verify.rho_formula != "standard" && c.verify.rho_formula != "alternative")
    fail("verify.rho_formula", "must be standard or alternative");
  for (const auto& [name, tol] : c.verify.tolerances)
    if (!(tol > 0.0)) fail("verify.tol." + name, "must be positive");
  const std::set<std::string> targets{"taylor_green", "energy_residual", "linear_decay"};
  if (!targets.count(c.convergence.target)) fail("convergence.target", "unknown target '" + c.convergence.target + "'");
  for (double dt : c.convergence.dt_ladder)
    if (!(dt > 0.0)) fail("convergence.dt_ladder", "entries must be positive");
  for (int n : c.convergence.n_ladder)
    if (n < 1) fail("convergence.n_ladder", "entries must be >= 1");
}

/// Parses INI text; `base_dir` anchors relative paths.
inline RunConfig parse_config(std::istream& in, const std::string& base_dir = ".") {
  detail::Entries e(detail::parse_ini(in));
  RunConfig c;
  c.base_dir = base_dir;
  e.get("grid.dim", c.grid.dim);
  e.get("grid.n", c.grid.n);
  e.get("grid.L", c.grid.period);
  e.get("params.mu", c.params.mu);
  e.get("params.alpha", c.params.alpha);
  e.get("params.beta", c.params.beta);
  e.get("params.r", c.params.r);
  e.get("solver.dt", c.solver.dt);
  e.get("solver.t_end", c.solver.t_end);
  if (auto* v = e.find("solver.scheme")) {
    if (v->text == "imex_euler") c.solver.scheme = Scheme::imex_euler;
    else if (v->text == "imex_cnab2" || v->text == "cnab2") c.solver.scheme = Scheme::imex_cnab2;
    else e.fail("solver.scheme", "must be imex_euler or imex_cnab2");
  }
  e.get("solver.galerkin_n", c.solver.galerkin_n);
  if (auto* v = e.find("solver.truncation")) {
    if (v->text == "box") c.solver.truncation = Truncation::box;
    else if (v->text == "ball") c.solver.truncation = Truncation::ball;
    else e.fail("solver.truncation", "must be box or ball");
  }
  e.get("solver.dealias", c.solver.dealias);
  e.get("solver.diagnostics_every", c.solver.diagnostics_every);
  e.get("solver.snapshot_every", c.solver.snapshot_every);
  e.get("solver.substeps", c.solver.substeps);
  e.get("ic.family", c.ic.family);
  e.get("ic.amplitude", c.ic.amplitude);
  e.get("ic.seed", c.ic.seed);
  e.get("ic.band_limit", c.ic.band_limit);
  e.get("ic.slope", c.ic.slope);
  e.get("ic.path", c.ic.path);
  e.get("forcing.kind", c.forcing.kind);
  e.get("forcing.amplitude", c.forcing.amplitude);
  e.get("forcing.wavenumber", c.forcing.wavenumber);
  e.get("forcing.omega", c.forcing.omega);
  e.get("forcing.path", c.forcing.path);
  e.get("output.directory", c.output.directory);
  e.get("output.extended_diagnostics", c.output.extended_diagnostics);
  e.get("verify.checks", c.verify.checks);
  e.get("verify.seed", c.verify.seed);
  e.get("verify.samples", c.verify.samples);
  e.get("verify.n_points", c.verify.n_points);
  e.get("verify.band_limit", c.verify.band_limit);
  e.get("verify.slope", c.verify.slope);
  e.get("verify.amplitude", c.verify.amplitude);
  e.get("verify.amplitude_spread", c.verify.amplitude_spread);
  e.get("verify.interpolation", c.verify.interpolation);
  e.get("verify.filter_n", c.verify.filter_n);
  e.get("verify.theta", c.verify.theta);
  e.get("verify.identity_n_points", c.verify.identity_n_points);
  e.get("verify.identity_upsample", c.verify.identity_upsample);
  e.get("verify.trajectory_ic", c.verify.trajectory_ic);
  e.get("verify.perturbation", c.verify.perturbation);
  e.get("verify.rho_formula", c.verify.rho_formula);
  for (const auto& [key, raw] : e.all()) {
    if (key.rfind("verify.tol.", 0) == 0) {
      double v = 0.0;
      e.get(key, v);
      c.verify.tolerances[key.substr(11)] = v;
    }
  }
  e.get("convergence.target", c.convergence.target);
  e.get("convergence.dt_ladder", c.convergence.dt_ladder);
  e.get("convergence.n_ladder", c.convergence.n_ladder);
  e.get("convergence.order_min", c.convergence.order_min);
  e.get("convergence.order_max", c.convergence.order_max);
  c.solver.extended_diagnostics = c.output.extended_diagnostics;
  validate_config(c, &e);
  return c;
}

inline RunConfig parse_config_string(const std::string& text, const std::string& base_dir = ".") {
  std::istringstream in(text);
  return parse_config(in, base_dir);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  const auto slash = path.find_last_of('/');
  return parse_config(in, slash == std::string::npos ? "." : path.substr(0, slash));
}

/// Fully resolved configuration as INI text; parsing it yields the same configuration.
inline std::string to_ini(const RunConfig& c) {
  using detail::fmt_double;
  std::ostringstream o;
  auto num = [](double v) { return fmt_double(v); };
  o << "[grid]\n"
    << "dim = " << c.grid.dim << "\n"
    << "n = " << c.grid.n << "\n"
    << "L = " << num(c.grid.period) << "\n\n";
  o << "[params]\n"
    << "mu = " << num(c.params.mu) << "\n"
    << "alpha = " << num(c.params.alpha) << "\n"
    << "beta = " << num(c.params.beta) << "\n"
    << "r = " << num(c.params.r) << "\n\n";
  o << "[solver]\n"
    << "dt = " << num(c.solver.dt) << "\n"
    << "t_end = " << num(c.solver.t_end) << "\n"
    << "scheme = " << to_string(c.solver.scheme) << "\n"
    << "galerkin_n = " << c.solver.galerkin_n << "\n"
    << "truncation = " << (c.solver.truncation == Truncation::box ? "box" : "ball") << "\n"
    << "dealias = " << (c.solver.dealias ? "true" : "false") << "\n"
    << "diagnostics_every = " << c.solver.diagnostics_every << "\n"
    << "snapshot_every = " << c.solver.snapshot_every << "\n"
    << "substeps = " << c.solver.substeps << "\n\n";
  o << "[ic]\n"
    << "family = " << c.ic.family << "\n"
    << "amplitude = " << num(c.ic.amplitude) << "\n"
    << "seed = " << c.ic.seed << "\n"
    << "band_limit = " << c.ic.band_limit << "\n"
    << "slope = " << num(c.ic.slope) << "\n";
  if (!c.ic.path.empty()) o << "path = " << c.ic.path << "\n";
  o << "\n[forcing]\n"
    << "kind = " << c.forcing.kind << "\n"
    << "amplitude = " << num(c.forcing.amplitude) << "\n"
    << "wavenumber = " << c.forcing.wavenumber << "\n"
    << "omega = " << num(c.forcing.omega) << "\n";
  if (!c.forcing.path.empty()) o << "path = " << c.forcing.path << "\n";
  o << "\n[output]\n"
    << "directory = " << c.output.directory << "\n"
    << "extended_diagnostics = " << (c.output.extended_diagnostics ? "true" : "false") << "\n\n";
  o << "[verify]\n";
  if (!c.verify.checks.empty()) o << "checks = " << detail::join(c.verify.checks, [](const std::string& s) { return s; }) << "\n";
  o << "seed = " << c.verify.seed << "\n"
    << "samples = " << c.verify.samples << "\n"
    << "n_points = " << c.verify.n_points << "\n"
    << "band_limit = " << c.verify.band_limit << "\n"
    << "slope = " << num(c.verify.slope) << "\n"
    << "amplitude = " << num(c.verify.amplitude) << "\n"
    << "amplitude_spread = " << num(c.verify.amplitude_spread) << "\n"
    << "interpolation = " << detail::join(c.verify.interpolation, num) << "\n"
    << "filter_n = " << detail::join(c.verify.filter_n, num) << "\n";
  if (c.verify.theta) o << "theta = " << num(*c.verify.theta) << "\n";
  o << "identity_n_points = " << c.verify.identity_n_points << "\n"
    << "identity_upsample = " << c.verify.identity_upsample << "\n"
    << "trajectory_ic = " << c.verify.trajectory_ic << "\n"
    << "perturbation = " << num(c.verify.perturbation) << "\n"
    << "rho_formula = " << c.verify.rho_formula << "\n";
  for (const auto& [name, tol] : c.verify.tolerances) o << "tol." << name << " = " << num(tol) << "\n";
  o << "\n[convergence]\n"
    << "target = " << c.convergence.target << "\n"
    << "dt_ladder = " << detail::join(c.convergence.dt_ladder, num) << "\n";
  if (!c.convergence.n_ladder.empty())
    o << "n_ladder = " << detail::join(c.convergence.n_ladder, [](int v) { return std::to_string(v); }) << "\n";
  if (c.convergence.order_min) o << "order_min = " << num(*c.convergence.order_min) << "\n";
  if (c.convergence.order_max) o << "order_max = " << num(*c.convergence.order_max) << "\n";
  return o.str();
}

/// Resolves a path from the config against its directory.
inline std::string resolve_path(const RunConfig& c, const std::string& p) {
  if (p.empty() || p[0] == '/' || c.base_dir.empty() || c.base_dir == ".") return p;
  return c.base_dir + "/" + p;
}

/// Verification inputs derived from a configuration.
inline VerifySettings verify_settings(const RunConfig& c) {
  VerifySettings s;
  s.grid = TorusGrid(c.grid.dim, c.verify.n_points, c.grid.period);
  s.seed = c.verify.seed;
  s.samples = c.verify.samples;
  s.sampler.band_limit = c.verify.band_limit;
  s.sampler.slope = c.verify.slope;
  s.sampler.amplitude = c.verify.amplitude;
  s.sampler.amplitude_spread = c.verify.amplitude_spread;
  s.params = c.params;
  s.rho_formula = c.verify.rho_formula == "alternative" ? RhoFormula::alternative : RhoFormula::standard;
  s.interp_s = c.verify.interpolation[0];
  s.interp_rho = c.verify.interpolation[1];
  s.interp_t = c.verify.interpolation[2];
  s.filter_n = c.verify.filter_n;
  s.theta = c.verify.theta;
  s.identity_n_points = c.verify.identity_n_points;
  s.identity_upsample = c.verify.identity_upsample;
  s.solver = c.solver;
  s.trajectory_ic = c.verify.trajectory_ic;
  s.perturbation = c.verify.perturbation;
  s.tolerances = c.verify.tolerances;
  return s;
}

}  // namespace cbf
