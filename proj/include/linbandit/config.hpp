// Experiment configuration and its plain-text key = value format.
//
// Grammar (one item per line):
//
//   # comment            ; also after a value: `rho = 0.3  # note`
//   [section]            ; one of: run, environment, policy, diagnostics
//   key = value          ; lists are comma separated
//
// Keys are globally unique. A key may appear before any section header, or
// under its own section; a key under a different section is rejected, as
// are unknown and duplicated keys. See `print-defaults` for every key with
// its default.
#pragma once

#include "linbandit/environments.hpp"
#include "linbandit/policies.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linbandit {

enum class ExperimentKind : std::uint8_t {
  TwoBridgeLinUCB,
  TwoBridgeImpossibility,
  GreedyVsLinUCB,
  ScalingFit,
  ExternalityVanishing,
  SimulationVerify,
  EigGrowth,
};

std::string_view to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();
/// One-line description for `list-experiments`.
std::string_view describe(ExperimentKind k);

bool is_two_bridge(ExperimentKind k);

enum class Population : std::uint8_t { Full, MinorityOnly };

struct PolicySpec {
  PolicyType type = PolicyType::Oracle;
  Population population = Population::Full;

  /// "LinUCB", "LinUCB:minority", ...
  std::string label() const;
  static PolicySpec parse(std::string_view text);  // throws ConfigError("policies", ...)
  bool operator==(const PolicySpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::GreedyVsLinUCB;

  // [run]
  std::vector<std::int64_t> horizons;
  std::int64_t replicates = 200;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  bool curves = false;

  // [environment]
  ThetaVariant theta_variant = ThetaVariant::Theta0;
  NoiseModel noise = NoiseModel::GaussianUnit;
  Eigen::Index dim = 2;
  std::size_t actions = 5;
  double rho = 0.1;
  std::size_t catalog_size = 50;
  double minority_probability = 0.2;
  double prior_scale = 1.0;
  /// Defaults to 1 + sqrt(3 ln T_max).
  std::optional<double> prior_mean_norm;
  double restriction_probability = 0.5;

  // [policy]
  std::vector<PolicySpec> policies;
  std::int64_t batch_size = 200;
  double ridge = 1.0;
  double c0 = 1.0;
  double inflation = 1.0;

  // [diagnostics]
  std::size_t sim_targets = 20;
  std::size_t sim_samples = 100000;
  std::int64_t sim_batch = 100;
  std::int64_t eig_start = 2000;
  std::vector<std::int64_t> gap_checkpoints;
  std::size_t bootstrap = 200;

  std::int64_t max_horizon() const;
  double effective_prior_mean_norm() const;

  /// Checks every invariant; errors name the offending key.
  void validate() const;

  /// Defaults for `kind` before any key is applied.
  static ExperimentConfig defaults_for(ExperimentKind kind);
};

ExperimentConfig parse_config(std::string_view text);

/// Canonical key = value rendering (round-trips through parse_config).
std::string render_config(const ExperimentConfig& cfg);

}  // namespace linbandit
