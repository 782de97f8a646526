#include "linbandit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace linbandit {

// ---------------------------------------------------------------------------
// Experiment kinds
// ---------------------------------------------------------------------------

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TwoBridgeLinUCB: return "TwoBridgeLinUCB";
    case ExperimentKind::TwoBridgeImpossibility: return "TwoBridgeImpossibility";
    case ExperimentKind::GreedyVsLinUCB: return "GreedyVsLinUCB";
    case ExperimentKind::ScalingFit: return "ScalingFit";
    case ExperimentKind::ExternalityVanishing: return "ExternalityVanishing";
    case ExperimentKind::SimulationVerify: return "SimulationVerify";
    case ExperimentKind::EigGrowth: return "EigGrowth";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = {
      ExperimentKind::TwoBridgeLinUCB,     ExperimentKind::TwoBridgeImpossibility,
      ExperimentKind::GreedyVsLinUCB,      ExperimentKind::ScalingFit,
      ExperimentKind::ExternalityVanishing, ExperimentKind::SimulationVerify,
      ExperimentKind::EigGrowth,
  };
  return kinds;
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : all_experiments()) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view describe(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TwoBridgeLinUCB:
      return "LinUCB minority regret on the two-bridge instance, full population vs minority alone";
    case ExperimentKind::TwoBridgeImpossibility:
      return "minority regret of several policies with Bernoulli rewards and a uniform prior over both thetas";
    case ExperimentKind::GreedyVsLinUCB:
      return "Bayesian regret of batched greedy policies against LinUCB and baselines on perturbed instances";
    case ExperimentKind::ScalingFit:
      return "log-log regret exponents of LinUCB and batched greedy policies over a horizon grid";
    case ExperimentKind::ExternalityVanishing:
      return "minority Bayesian regret on a two-group perturbed instance, full population vs minority alone";
    case ExperimentKind::SimulationVerify:
      return "KS checks of rewards simulated from a diverse batch against direct draws";
    case ExperimentKind::EigGrowth:
      return "growth of the minimum eigenvalue of Z_t and Bayes/OLS estimate gap under BatchFreqGreedy";
  }
  return "";
}

bool is_two_bridge(ExperimentKind k) {
  return k == ExperimentKind::TwoBridgeLinUCB || k == ExperimentKind::TwoBridgeImpossibility;
}

// ---------------------------------------------------------------------------
// Policy specs
// ---------------------------------------------------------------------------

std::string PolicySpec::label() const {
  std::string s(to_string(type));
  if (population == Population::MinorityOnly) s += ":minority";
  return s;
}

PolicySpec PolicySpec::parse(std::string_view text) {
  PolicySpec spec;
  std::string_view name = text;
  std::string_view pop;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    pop = text.substr(colon + 1);
  }
  const auto type = parse_policy_type(name);
  if (!type) throw ConfigError("policies", "unknown policy '" + std::string(name) + "'");
  spec.type = *type;
  if (pop.empty() || pop == "full") {
    spec.population = Population::Full;
  } else if (pop == "minority") {
    spec.population = Population::MinorityOnly;
  } else {
    throw ConfigError("policies", "unknown population '" + std::string(pop) + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Defaults
// ---------------------------------------------------------------------------

std::int64_t ExperimentConfig::max_horizon() const {
  return horizons.empty() ? 1 : *std::max_element(horizons.begin(), horizons.end());
}

double ExperimentConfig::effective_prior_mean_norm() const {
  if (prior_mean_norm) return *prior_mean_norm;
  return 1.0 + std::sqrt(3.0 * std::log(static_cast<double>(std::max<std::int64_t>(max_horizon(), 2))));
}

ExperimentConfig ExperimentConfig::defaults_for(ExperimentKind kind) {
  using PT = PolicyType;
  auto full = [](PT t) { return PolicySpec{t, Population::Full}; };
  auto minority = [](PT t) { return PolicySpec{t, Population::MinorityOnly}; };

  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::TwoBridgeLinUCB:
      c.horizons = {10000, 40000, 160000};
      c.noise = NoiseModel::GaussianUnit;
      c.dim = 2;
      c.actions = 2;
      c.ridge = 0.0;
      c.policies = {full(PT::LinUCB), minority(PT::LinUCB)};
      break;
    case ExperimentKind::TwoBridgeImpossibility:
      c.horizons = {10000, 40000};
      c.noise = NoiseModel::Bernoulli;
      c.dim = 2;
      c.actions = 2;
      c.ridge = 0.0;
      c.policies = {full(PT::LinUCB), minority(PT::LinUCB), full(PT::UniformRandom),
                    full(PT::BatchFreqGreedy)};
      break;
    case ExperimentKind::GreedyVsLinUCB:
      c.horizons = {100, 20000};
      c.policies = {full(PT::BatchBayesGreedy), full(PT::BatchFreqGreedy), full(PT::LinUCB),
                    full(PT::Oracle), full(PT::UniformRandom)};
      break;
    case ExperimentKind::ScalingFit:
      c.horizons = {5000, 20000, 80000};
      c.policies = {full(PT::LinUCB), full(PT::BatchBayesGreedy), full(PT::BatchFreqGreedy)};
      break;
    case ExperimentKind::ExternalityVanishing:
      c.horizons = {100, 20000};
      c.minority_probability = 0.2;
      c.policies = {full(PT::BatchFreqGreedy), minority(PT::LinUCB), full(PT::LinUCB)};
      break;
    case ExperimentKind::SimulationVerify:
      c.horizons = {1000};
      c.policies = {};
      break;
    case ExperimentKind::EigGrowth:
      c.horizons = {20000};
      c.rho = 0.3;
      c.policies = {full(PT::BatchFreqGreedy)};
      c.gap_checkpoints = {1000, 8000};
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
  };
  require(!horizons.empty(), "horizons", "at least one horizon is required");
  for (auto t : horizons) require(t >= 1, "horizons", "horizons must be >= 1");
  require(std::set<std::int64_t>(horizons.begin(), horizons.end()).size() == horizons.size(),
          "horizons", "horizons must be distinct");
  require(replicates >= 1, "replicates", "must be >= 1");
  require(workers >= 1, "workers", "must be >= 1");

  require(dim >= 1 && dim <= 64, "dim", "must lie in [1, 64]");
  require(actions >= 1, "actions", "must be >= 1");
  require(std::isfinite(rho) && rho >= 0.0, "rho", "must be finite and >= 0");
  require(catalog_size >= 1, "catalog_size", "must be >= 1");
  require(minority_probability >= 0.0 && minority_probability <= 1.0, "minority_probability",
          "must lie in [0, 1]");
  require(std::isfinite(prior_scale) && prior_scale > 0.0, "prior_scale", "must be > 0");
  if (prior_mean_norm) {
    require(std::isfinite(*prior_mean_norm) && *prior_mean_norm >= 0.0, "prior_mean_norm",
            "must be >= 0");
  }
  require(restriction_probability >= 0.0 && restriction_probability <= 1.0,
          "restriction_probability", "must lie in [0, 1]");

  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(std::isfinite(ridge) && ridge >= 0.0, "ridge", "must be >= 0");
  require(std::isfinite(c0) && c0 >= 1.0, "c0", "must be >= 1");
  require(std::isfinite(inflation) && inflation >= 1.0, "inflation", "must be >= 1");

  require(sim_targets >= 1, "sim_targets", "must be >= 1");
  require(sim_samples >= 2, "sim_samples", "must be >= 2");
  require(sim_batch >= 1, "sim_batch", "must be >= 1");
  require(eig_start >= 1, "eig_start", "must be >= 1");
  for (auto t : gap_checkpoints) require(t >= 1, "gap_checkpoints", "checkpoints must be >= 1");
  require(bootstrap >= 1, "bootstrap", "must be >= 1");

  if (is_two_bridge(experiment)) {
    require(dim == 2, "dim", "the two-bridge instance has dimension 2");
    require(actions == 2, "actions", "the two-bridge instance has two action slots");
    for (const auto& p : policies) {
      require(p.type != PolicyType::BatchBayesGreedy, "policies",
              "BatchBayesGreedy needs a Gaussian prior, which the two-bridge instance lacks");
    }
  } else {
    require(rho > 0.0, "rho", "perturbed instances need rho > 0");
    require(rho <= 1.0 / std::sqrt(static_cast<double>(dim)) + 1e-12, "rho",
            "perturbed instances need rho <= 1/sqrt(dim)");
    require(noise == NoiseModel::GaussianUnit, "noise",
            "perturbed instances use Gaussian reward noise");
  }
  if (experiment != ExperimentKind::SimulationVerify) {
    require(!policies.empty(), "policies", "at least one policy is required");
  }
  std::set<std::string> labels;
  for (const auto& p : policies) {
    require(labels.insert(p.label()).second, "policies", "duplicate policy " + p.label());
  }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

template <class T>
T parse_integer(std::string_view v, const std::string& key) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t parse_count(std::string_view v, const std::string& key) {
  // Accept 1e4-style literals for horizons and counts.
  if (v.find_first_of("eE.") != std::string_view::npos) {
    std::string s(v);
    char* endp = nullptr;
    const double d = std::strtod(s.c_str(), &endp);
    if (endp != s.c_str() + s.size() || !std::isfinite(d) || d != std::floor(d) ||
        std::abs(d) > 9.0e15) {
      throw ConfigError(key, "expected an integer, got '" + s + "'");
    }
    return static_cast<std::int64_t>(d);
  }
  return parse_integer<std::int64_t>(v, key);
}

double parse_real(std::string_view v, const std::string& key) {
  std::string s(v);
  char* endp = nullptr;
  const double d = std::strtod(s.c_str(), &endp);
  if (s.empty() || endp != s.c_str() + s.size()) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
  return d;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + std::string(v) + "'");
}

std::size_t parse_size(std::string_view v, const std::string& key) {
  const auto n = parse_count(v, key);
  if (n < 0) throw ConfigError(key, "must be >= 0");
  return static_cast<std::size_t>(n);
}

std::string join_ints(const std::vector<std::int64_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(xs[i]);
  }
  return s;
}

// Shortest decimal that round-trips.
std::string fmt_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct KeySpec {
  const char* section;
  std::function<void(ExperimentConfig&, std::string_view, const std::string&)> apply;
  std::function<std::string(const ExperimentConfig&)> render;
};

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  using C = ExperimentConfig;
  using SV = std::string_view;
  using S = const std::string&;
  static const std::map<std::string, KeySpec, std::less<>> table = {
      {"experiment",
       {"run", [](C&, SV, S) {}, [](const C& c) { return std::string(to_string(c.experiment)); }}},
      {"horizons",
       {"run",
        [](C& c, SV v, S k) {
          c.horizons.clear();
          for (auto item : split_list(v)) c.horizons.push_back(parse_count(item, k));
        },
        [](const C& c) { return join_ints(c.horizons); }}},
      {"replicates",
       {"run", [](C& c, SV v, S k) { c.replicates = parse_count(v, k); },
        [](const C& c) { return std::to_string(c.replicates); }}},
      {"seed",
       {"run", [](C& c, SV v, S k) { c.master_seed = parse_integer<std::uint64_t>(v, k); },
        [](const C& c) { return std::to_string(c.master_seed); }}},
      {"workers",
       {"run",
        [](C& c, SV v, S k) {
          const auto w = parse_count(v, k);
          if (w < 1) throw ConfigError(k, "must be >= 1");
          c.workers = static_cast<unsigned>(w);
        },
        [](const C& c) { return std::to_string(c.workers); }}},
      {"curves",
       {"run", [](C& c, SV v, S k) { c.curves = parse_bool(v, k); },
        [](const C& c) { return std::string(c.curves ? "true" : "false"); }}},

      {"theta_variant",
       {"environment",
        [](C& c, SV v, S k) {
          if (v == "Theta0") {
            c.theta_variant = ThetaVariant::Theta0;
          } else if (v == "Theta1") {
            c.theta_variant = ThetaVariant::Theta1;
          } else {
            throw ConfigError(k, "expected Theta0 or Theta1");
          }
        },
        [](const C& c) {
          return std::string(c.theta_variant == ThetaVariant::Theta0 ? "Theta0" : "Theta1");
        }}},
      {"noise",
       {"environment",
        [](C& c, SV v, S k) {
          if (v == "GaussianUnit") {
            c.noise = NoiseModel::GaussianUnit;
          } else if (v == "Bernoulli") {
            c.noise = NoiseModel::Bernoulli;
          } else {
            throw ConfigError(k, "expected GaussianUnit or Bernoulli");
          }
        },
        [](const C& c) { return std::string(to_string(c.noise)); }}},
      {"dim",
       {"environment", [](C& c, SV v, S k) { c.dim = parse_count(v, k); },
        [](const C& c) { return std::to_string(c.dim); }}},
      {"actions",
       {"environment", [](C& c, SV v, S k) { c.actions = parse_size(v, k); },
        [](const C& c) { return std::to_string(c.actions); }}},
      {"rho",
       {"environment", [](C& c, SV v, S k) { c.rho = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.rho); }}},
      {"catalog_size",
       {"environment", [](C& c, SV v, S k) { c.catalog_size = parse_size(v, k); },
        [](const C& c) { return std::to_string(c.catalog_size); }}},
      {"minority_probability",
       {"environment", [](C& c, SV v, S k) { c.minority_probability = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.minority_probability); }}},
      {"prior_scale",
       {"environment", [](C& c, SV v, S k) { c.prior_scale = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.prior_scale); }}},
      {"prior_mean_norm",
       {"environment", [](C& c, SV v, S k) { c.prior_mean_norm = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.effective_prior_mean_norm()); }}},
      {"restriction_probability",
       {"environment", [](C& c, SV v, S k) { c.restriction_probability = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.restriction_probability); }}},

      {"policies",
       {"policy",
        [](C& c, SV v, S) {
          c.policies.clear();
          if (trim(v).empty()) return;
          for (auto item : split_list(v)) c.policies.push_back(PolicySpec::parse(item));
        },
        [](const C& c) {
          std::string s;
          for (std::size_t i = 0; i < c.policies.size(); ++i) {
            if (i) s += ", ";
            s += c.policies[i].label();
          }
          return s;
        }}},
      {"batch_size",
       {"policy", [](C& c, SV v, S k) { c.batch_size = parse_count(v, k); },
        [](const C& c) { return std::to_string(c.batch_size); }}},
      {"ridge",
       {"policy", [](C& c, SV v, S k) { c.ridge = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.ridge); }}},
      {"c0",
       {"policy", [](C& c, SV v, S k) { c.c0 = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.c0); }}},
      {"inflation",
       {"policy", [](C& c, SV v, S k) { c.inflation = parse_real(v, k); },
        [](const C& c) { return fmt_real(c.inflation); }}},

      {"sim_targets",
       {"diagnostics", [](C& c, SV v, S k) { c.sim_targets = parse_size(v, k); },
        [](const C& c) { return std::to_string(c.sim_targets); }}},
      {"sim_samples",
       {"diagnostics", [](C& c, SV v, S k) { c.sim_samples = parse_size(v, k); },
        [](const C& c) { return std::to_string(c.sim_samples); }}},
      {"sim_batch",
       {"diagnostics", [](C& c, SV v, S k) { c.sim_batch = parse_count(v, k); },
        [](const C& c) { return std::to_string(c.sim_batch); }}},
      {"eig_start",
       {"diagnostics", [](C& c, SV v, S k) { c.eig_start = parse_count(v, k); },
        [](const C& c) { return std::to_string(c.eig_start); }}},
      {"gap_checkpoints",
       {"diagnostics",
        [](C& c, SV v, S k) {
          c.gap_checkpoints.clear();
          if (trim(v).empty()) return;
          for (auto item : split_list(v)) c.gap_checkpoints.push_back(parse_count(item, k));
        },
        [](const C& c) { return join_ints(c.gap_checkpoints); }}},
      {"bootstrap",
       {"diagnostics", [](C& c, SV v, S k) { c.bootstrap = parse_size(v, k); },
        [](const C& c) { return std::to_string(c.bootstrap); }}},
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  std::string section;
  int line;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  static const std::set<std::string, std::less<>> sections = {"run", "environment", "policy",
                                                              "diagnostics"};
  const auto& table = key_table();
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::string section;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("[" + std::string(line), "malformed section header on line " +
                                                        std::to_string(line_no));
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.contains(section)) {
        throw ConfigError("[" + section + "]", "unknown section");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "expected 'key = value' on line " + std::to_string(line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    if (!section.empty() && section != it->second.section) {
      throw ConfigError(key, "belongs in section [" + std::string(it->second.section) + "], found in [" +
                                 section + "]");
    }
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    entries.push_back({key, value, section, line_no});
  }

  const auto exp_it = std::find_if(entries.begin(), entries.end(),
                                   [](const Entry& e) { return e.key == "experiment"; });
  if (exp_it == entries.end()) throw ConfigError("experiment", "missing required key");
  const auto kind = parse_experiment_kind(exp_it->value);
  if (!kind) throw ConfigError("experiment", "unknown experiment '" + exp_it->value + "'");

  ExperimentConfig cfg = ExperimentConfig::defaults_for(*kind);
  for (const auto& e : entries) table.at(e.key).apply(cfg, e.value, e.key);
  cfg.validate();
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  const auto& table = key_table();
  std::ostringstream os;
  for (const char* section : {"run", "environment", "policy", "diagnostics"}) {
    os << '[' << section << "]\n";
    if (std::string_view(section) == "run") {
      os << "experiment = " << to_string(cfg.experiment) << '\n';
    }
    for (const auto& [key, spec] : table) {
      if (key == "experiment" || std::string_view(spec.section) != section) continue;
      os << key << " = " << spec.render(cfg) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace linbandit
