#include "bolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "bolab/error.hpp"
#include "bolab/functionals.hpp"
#include "bolab/state.hpp"

namespace bolab {

bool is_stochastic(std::string_view subcommand) {
  return subcommand == "sample" || subcommand == "renorm" || subcommand == "invariance" ||
         subcommand == "weakconv" || subcommand == "gibbs";
}

RadialLaw ExperimentConfig::radial_law() const {
  RadialLaw base = RadialLaw::from_name(law, law_scale);
  return normalize_law ? base.normalized() : base;
}

AmplitudeSequence ExperimentConfig::amplitude_sequence() const {
  if (amps == "power") return AmplitudeSequence::power(amp_p);
  return AmplitudeSequence::power_log(amp_p, amp_q);
}

bool ConfigKey::applies(std::string_view subcommand) const {
  return applies_to.empty() || std::find(applies_to.begin(), applies_to.end(), subcommand) != applies_to.end();
}

std::optional<std::string> ConfigKey::default_for(std::string_view subcommand) const {
  std::optional<std::string> fallback;
  for (const auto& [sub, value] : defaults) {
    if (sub == subcommand) return value;
    if (sub == "*") fallback = value;
  }
  return fallback;
}

namespace {

std::string_view trim(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
  return v;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  v = trim(v);
  if (v.empty()) return out;
  for (;;) {
    const auto pos = v.find(',');
    out.push_back(trim(v.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    v.remove_prefix(pos + 1);
  }
  return out;
}

std::optional<double> to_real(std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

std::optional<std::uint64_t> to_u64(std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) return std::nullopt;
  return out;
}

std::optional<bool> to_bool(std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  return std::nullopt;
}

std::string mismatch(std::string_view type, std::string_view value) {
  return "expected " + std::string(type) + ", got '" + std::string(value) + "'";
}

using Subs = std::vector<std::string>;
using Defaults = std::vector<std::pair<std::string, std::string>>;

ConfigKey real_key(std::string name, std::string flag, std::string help, double ExperimentConfig::*field,
                   Subs applies, Defaults defaults) {
  ConfigKey k;
  k.name = std::move(name);
  k.flag = std::move(flag);
  k.value_type = "real";
  k.help = std::move(help);
  k.applies_to = std::move(applies);
  k.defaults = std::move(defaults);
  k.set = [field](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto x = to_real(v);
    if (!x) return mismatch("a finite real", v);
    c.*field = *x;
    return std::nullopt;
  };
  k.get = [field](const ExperimentConfig& c) { return format_double(c.*field); };
  return k;
}

ConfigKey size_key(std::string name, std::string flag, std::string help, std::size_t ExperimentConfig::*field,
                   Subs applies, Defaults defaults) {
  ConfigKey k;
  k.name = std::move(name);
  k.flag = std::move(flag);
  k.value_type = "int";
  k.help = std::move(help);
  k.applies_to = std::move(applies);
  k.defaults = std::move(defaults);
  k.set = [field](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto x = to_u64(v);
    if (!x) return mismatch("a nonnegative integer", v);
    c.*field = static_cast<std::size_t>(*x);
    return std::nullopt;
  };
  k.get = [field](const ExperimentConfig& c) { return std::to_string(c.*field); };
  return k;
}

ConfigKey bool_key(std::string name, std::string flag, std::string help, bool ExperimentConfig::*field,
                   Subs applies) {
  ConfigKey k;
  k.name = std::move(name);
  k.flag = std::move(flag);
  k.value_type = "bool";
  k.help = std::move(help);
  k.applies_to = std::move(applies);
  k.defaults = {{"*", "false"}};
  k.set = [field](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto x = to_bool(v);
    if (!x) return mismatch("true or false", v);
    c.*field = *x;
    return std::nullopt;
  };
  k.get = [field](const ExperimentConfig& c) { return std::string(c.*field ? "true" : "false"); };
  return k;
}

ConfigKey text_key(std::string name, std::string flag, std::string help, std::string ExperimentConfig::*field,
                   Subs applies, Defaults defaults, std::vector<std::string> choices = {}) {
  ConfigKey k;
  k.name = std::move(name);
  k.flag = std::move(flag);
  k.help = std::move(help);
  k.applies_to = std::move(applies);
  k.defaults = std::move(defaults);
  if (choices.empty()) {
    k.value_type = "text";
  } else {
    k.value_type.clear();
    for (const auto& c : choices) k.value_type += (k.value_type.empty() ? "" : "|") + c;
  }
  k.set = [field, choices](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    const std::string value(trim(v));
    if (!choices.empty() && std::find(choices.begin(), choices.end(), value) == choices.end()) {
      std::string allowed;
      for (const auto& ch : choices) allowed += (allowed.empty() ? "" : ", ") + ch;
      return "expected one of {" + allowed + "}, got '" + value + "'";
    }
    c.*field = value;
    return std::nullopt;
  };
  k.get = [field](const ExperimentConfig& c) { return c.*field; };
  return k;
}

ConfigKey size_list_key(std::string name, std::string flag, std::string help,
                        std::vector<std::size_t> ExperimentConfig::*field, Subs applies, Defaults defaults) {
  ConfigKey k;
  k.name = std::move(name);
  k.flag = std::move(flag);
  k.value_type = "list<int>";
  k.help = std::move(help);
  k.applies_to = std::move(applies);
  k.defaults = std::move(defaults);
  k.set = [field](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    std::vector<std::size_t> out;
    for (const auto item : split_list(v)) {
      const auto x = to_u64(item);
      if (!x) return mismatch("a comma separated list of integers", v);
      out.push_back(static_cast<std::size_t>(*x));
    }
    c.*field = std::move(out);
    return std::nullopt;
  };
  k.get = [field](const ExperimentConfig& c) {
    std::string out;
    for (const auto x : c.*field) out += (out.empty() ? "" : ",") + std::to_string(x);
    return out;
  };
  return k;
}

std::string dyadic(std::size_t lo, std::size_t hi) {
  std::string out;
  for (std::size_t x = lo; x <= hi; x *= 2) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

std::vector<ConfigKey> make_schema() {
  const Subs all;
  const Subs sampling = {"flow", "sample", "tailmass", "renorm", "invariance", "weakconv"};
  std::vector<ConfigKey> schema;

  schema.push_back(text_key("law", "--law", "radial law of the coefficients g_n", &ExperimentConfig::law,
                            sampling, {{"*", "gaussian"}}, {"gaussian", "radial_exponential"}));
  schema.push_back(real_key("law_scale", "--law-scale", "scale parameter lambda of the radial law",
                            &ExperimentConfig::law_scale, sampling, {{"*", "1"}}));
  schema.push_back(bool_key("normalize_law", "--normalize-law", "rescale the law so that E|g|^2 = 1",
                            &ExperimentConfig::normalize_law, sampling));
  schema.push_back(text_key("amps", "--amps", "amplitude rule: power n^-p or power_log n^-p/log(n+1)^q",
                            &ExperimentConfig::amps, sampling, {{"*", "power"}}, {"power", "power_log"}));
  {
    ConfigKey k = real_key("amp_p", "--amp-p", "amplitude exponent p", &ExperimentConfig::amp_p, sampling,
                           {{"*", "1"}, {"renorm", "0.5"}});
    k.flag_aliases = {"--alpha-p"};
    schema.push_back(std::move(k));
  }
  schema.push_back(real_key("amp_q", "--amp-q", "logarithmic exponent q (power_log only)",
                            &ExperimentConfig::amp_q, sampling, {{"*", "0"}}));
  schema.push_back(size_key("n", "--n", "truncation level N; for renorm, the mode index n", &ExperimentConfig::n,
                            all, {{"*", "32"}, {"renorm", "1"}, {"gibbs", "16"}}));
  schema.push_back(real_key("t", "--t", "flow time", &ExperimentConfig::t, {"flow", "invariance", "gibbs"},
                            {{"*", "1"}}));
  schema.push_back(real_key("s", "--s", "Sobolev index s of reported norms", &ExperimentConfig::s,
                            {"flow", "sample"}, {{"*", "0"}}));
  schema.push_back(real_key("sigma", "--sigma", "Sobolev index sigma of the tail-mass product",
                            &ExperimentConfig::sigma, {"sample", "tailmass"}, {{"*", "1"}}));
  schema.push_back(size_key("samples", "--samples", "Monte-Carlo sample count", &ExperimentConfig::samples,
                            {"sample", "renorm", "invariance", "weakconv", "gibbs"},
                            {{"*", "10000"}, {"invariance", "100000"}, {"gibbs", "100000"}}));
  {
    ConfigKey k;
    k.name = "seed";
    k.flag = "--seed";
    k.value_type = "int";
    k.help = "master seed (mandatory for stochastic runs)";
    k.set = [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
      const auto x = to_u64(v);
      if (!x) return mismatch("an unsigned 64-bit integer", v);
      c.seed = *x;
      return std::nullopt;
    };
    k.get = [](const ExperimentConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); };
    schema.push_back(std::move(k));
  }
  {
    ConfigKey k = size_key("workers", "--workers", "worker threads (results do not depend on it)",
                           &ExperimentConfig::workers, all, {{"*", "1"}});
    k.echo = false;
    schema.push_back(std::move(k));
  }
  {
    ConfigKey k = text_key("out", "--out", "output path (stdout when empty)", &ExperimentConfig::out, all,
                           {{"*", ""}});
    k.echo = false;
    schema.push_back(std::move(k));
  }
  schema.push_back(text_key("format", "--format", "output format", &ExperimentConfig::format, all,
                            {{"*", "csv"}, {"invariance", "json"}, {"gibbs", "json"}}, {"csv", "json"}));
  schema.push_back(text_key("state", "--state", "initial state file (.csv or .json); sampled when empty",
                            &ExperimentConfig::state, {"flow"}, {{"*", ""}}));
  schema.push_back(size_list_key("profile", "--profile", "truncations for the convergence profile",
                                 &ExperimentConfig::profile, {"flow"}, {{"*", ""}}));
  schema.push_back(size_list_key("grid", "--grid", "increasing truncation grid", &ExperimentConfig::grid,
                                 {"renorm", "weakconv"},
                                 {{"renorm", dyadic(32, 4096)}, {"weakconv", dyadic(1, 64)}}));
  schema.push_back(size_key("n_ref", "--n-ref", "reference truncation for weak convergence",
                            &ExperimentConfig::n_ref, {"weakconv"}, {{"*", "256"}}));
  schema.push_back(text_key("functional", "--functional", "test functional id", &ExperimentConfig::functional,
                            {"weakconv"}, {{"*", "F1"}}, {"F1", "F2", "F3", "F4", "F5"}));
  {
    ConfigKey k;
    k.name = "functionals";
    k.flag = "--functionals";
    k.value_type = "list<F1..F5>";
    k.help = "test functional panel";
    k.applies_to = {"invariance", "gibbs"};
    k.defaults = {{"*", "F1,F2,F3,F4,F5"}};
    k.set = [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
      std::vector<std::string> ids;
      const auto panel = builtin_functionals();
      for (const auto item : split_list(v)) {
        const std::string id(item);
        if (std::none_of(panel.begin(), panel.end(), [&](const TestFunctional& f) { return f.id == id; })) {
          return "unknown functional '" + id + "'";
        }
        ids.push_back(id);
      }
      if (ids.empty()) return std::string("functional panel is empty");
      c.functionals = std::move(ids);
      return std::nullopt;
    };
    k.get = [](const ExperimentConfig& c) {
      std::string out;
      for (const auto& f : c.functionals) out += (out.empty() ? "" : ",") + f;
      return out;
    };
    schema.push_back(std::move(k));
  }
  schema.push_back(text_key("flow", "--flow", "flow under test", &ExperimentConfig::flow, {"invariance"},
                            {{"*", "truncated"}}, {"truncated", "renormalized"}));
  schema.push_back(bool_key("negative_control", "--negative-control",
                            "replace the flow by a broken one that must be detected",
                            &ExperimentConfig::negative_control, {"invariance"}));
  schema.push_back(text_key("cutoff", "--cutoff", "cutoff profile chi", &ExperimentConfig::cutoff, {"gibbs"},
                            {{"*", "triangular"}}, {"triangular", "plateau"}));
  schema.push_back(real_key("cutoff_a", "--cutoff-a", "half width a of the cutoff", &ExperimentConfig::cutoff_a,
                            {"gibbs"}, {{"*", "2"}}));
  schema.push_back(real_key("cutoff_ramp", "--cutoff-ramp", "ramp width of the plateau cutoff",
                            &ExperimentConfig::cutoff_ramp, {"gibbs"}, {{"*", "1"}}));
  schema.push_back(bool_key("dump_trajectories", "--dump-trajectories",
                            "also write per-sample renormalized phase trajectories",
                            &ExperimentConfig::dump_trajectories, {"renorm"}));
  return schema;
}

void check_cross_field(const ExperimentConfig& c, std::vector<std::string>& v) {
  const std::string& sub = c.subcommand;
  if (c.n == 0) v.push_back("n: must be >= 1");
  if (c.workers == 0) v.push_back("workers: must be >= 1");
  if (!(c.law_scale > 0.0)) v.push_back("law_scale: must be > 0");
  if (c.amps == "power" && c.amp_q != 0.0) v.push_back("amp_q: only meaningful with amps = power_log");

  const bool needs_seed = is_stochastic(sub) || (sub == "flow" && c.state.empty());
  if (needs_seed && !c.seed) v.push_back("seed: mandatory for subcommand " + sub);

  if (sub == "sample" || sub == "renorm" || sub == "weakconv") {
    if (c.samples < 2) v.push_back("samples: must be >= 2");
  }
  if (sub == "invariance" && c.samples < 1000) v.push_back("samples: invariance needs >= 1000");
  if (sub == "gibbs" && c.samples < 10000) v.push_back("samples: gibbs needs >= 10000");

  if (sub == "flow") {
    if (!c.profile.empty() && c.s < 0.0) v.push_back("s: the convergence profile requires s >= 0");
    for (const auto N : c.profile) {
      if (N == 0) v.push_back("profile: truncations must be >= 1");
    }
  }
  if (sub == "renorm" || sub == "weakconv") {
    if (c.grid.empty()) v.push_back("grid: must not be empty");
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      if (c.grid[i] == 0 || (i > 0 && c.grid[i] <= c.grid[i - 1])) {
        v.push_back("grid: must be strictly increasing positive integers");
        break;
      }
    }
  }
  if (sub == "renorm") {
    if (c.grid.size() < 2) v.push_back("grid: renorm needs at least two grid points");
    if (!c.grid.empty() && c.grid.front() < c.n) v.push_back("grid: entries must be >= the mode index n");
  }
  if (sub == "weakconv" && !c.grid.empty() && c.n_ref < c.grid.back()) {
    v.push_back("n_ref: must be >= the largest grid point");
  }
  if (sub == "renorm" || (sub == "invariance" && c.flow == "renormalized")) {
    const AmplitudeSequence amps = c.amplitude_sequence();
    if (amps.classify(2.0, 0.0) != SeriesVerdict::diverges) {
      v.push_back("amp_p: sum |alpha_n|^2 converges for " + amps.describe() +
                  "; the renormalized regime requires it to diverge");
    }
    if (amps.classify(4.0, 0.0) != SeriesVerdict::converges) {
      v.push_back("amp_p: sum |alpha_n|^4 diverges for " + amps.describe());
    }
    if (c.law_scale > 0.0 && std::abs(c.radial_law().second_moment() - 1.0) > 1e-12) {
      v.push_back("law: renormalized runs need E|g|^2 = 1 (set normalize_law = true)");
    }
  }
  if (sub == "gibbs") {
    if (!(c.cutoff_a > 0.0)) v.push_back("cutoff_a: must be > 0");
    if (!(c.cutoff_ramp > 0.0)) v.push_back("cutoff_ramp: must be > 0");
  }
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = make_schema();
  return schema;
}

const ConfigKey* find_config_key(std::string_view name) {
  for (const auto& k : config_schema()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::vector<ConfigEntry> parse_entries(std::string_view text, std::vector<std::string>& violations) {
  std::vector<ConfigEntry> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      violations.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) {
      violations.push_back("line " + std::to_string(line_no) + ": missing key");
      continue;
    }
    out.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

ExperimentConfig build_config(std::string_view subcommand, const std::vector<ConfigEntry>& entries) {
  std::vector<std::string> violations;
  ExperimentConfig config;
  config.subcommand = std::string(subcommand);
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    throw ConfigError({"unknown subcommand '" + std::string(subcommand) + "'"});
  }

  auto where = [](const ConfigEntry& e) {
    return e.line == 0 ? std::string("command line") : "line " + std::to_string(e.line);
  };

  std::map<std::string, const ConfigEntry*> seen;
  for (const auto& e : entries) {
    if (e.key == "subcommand") {
      if (e.value != subcommand) {
        violations.push_back(where(e) + ": subcommand '" + e.value + "' does not match '" +
                             std::string(subcommand) + "'");
      }
      continue;
    }
    const ConfigKey* key = find_config_key(e.key);
    if (key == nullptr) {
      violations.push_back(where(e) + ": unknown key '" + e.key + "'");
      continue;
    }
    if (!key->applies(subcommand)) {
      violations.push_back(where(e) + ": key '" + e.key + "' does not apply to subcommand " +
                           std::string(subcommand));
      continue;
    }
    if (const auto it = seen.find(e.key); it != seen.end()) {
      violations.push_back("duplicate key '" + e.key + "' at " + where(*it->second) + " and " + where(e));
      continue;
    }
    seen.emplace(e.key, &e);
  }

  for (const auto& key : config_schema()) {
    if (!key.applies(subcommand)) continue;
    const auto it = seen.find(key.name);
    if (it != seen.end()) {
      if (auto err = key.set(config, it->second->value)) {
        violations.push_back(where(*it->second) + ": " + key.name + ": " + *err);
      }
    } else if (const auto def = key.default_for(subcommand)) {
      if (auto err = key.set(config, *def)) violations.push_back("default for " + key.name + ": " + *err);
    }
  }

  check_cross_field(config, violations);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<std::string> violations;
  const auto entries = parse_entries(text, violations);
  std::vector<const ConfigEntry*> subs;
  for (const auto& e : entries) {
    if (e.key == "subcommand") subs.push_back(&e);
  }
  if (subs.empty()) violations.push_back("missing key 'subcommand'");
  if (subs.size() > 1) {
    violations.push_back("duplicate key 'subcommand' at line " + std::to_string(subs[0]->line) + " and line " +
                         std::to_string(subs[1]->line));
  }
  if (!violations.empty()) {
    // Report entry-level problems together with everything build_config would find.
    if (!subs.empty()) {
      try {
        build_config(subs.front()->value, entries);
      } catch (const ConfigError& e) {
        violations.insert(violations.end(), e.violations().begin(), e.violations().end());
      }
    }
    throw ConfigError(std::move(violations));
  }
  return build_config(subs.front()->value, entries);
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out = "subcommand = " + config.subcommand + "\n";
  for (const auto& key : config_schema()) {
    if (!key.applies(config.subcommand)) continue;
    const std::string value = key.get(config);
    if (key.name == "seed" && !config.seed) continue;
    out += key.name + " = " + value + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("subcommand", config.subcommand);
  for (const auto& key : config_schema()) {
    if (!key.applies(config.subcommand) || !key.echo) continue;
    if (key.name == "seed" && !config.seed) continue;
    out.emplace_back(key.name, key.get(config));
  }
  return out;
}

}  // namespace bolab
