// Problem instances: the two-bridge instance, perturbed context generation,
// prior draws of the latent vector and reward realization.
#pragma once

#include "linbandit/rng.hpp"
#include "linbandit/types.hpp"

#include <optional>
#include <random>
#include <vector>

namespace linbandit {

enum class NoiseModel : std::uint8_t { GaussianUnit, Bernoulli };

const char* to_string(NoiseModel n);

struct LatentModel {
  Vector theta;
  Vector prior_mean;
  Matrix prior_cov;
  double perturbation = 0.0;
  NoiseModel noise = NoiseModel::GaussianUnit;

  Eigen::Index dim() const noexcept { return prior_mean.size(); }

  /// Prior covariance symmetric PD, dimensions consistent, perturbation >= 0.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Two-bridge instance
// ---------------------------------------------------------------------------

enum class ThetaVariant : std::uint8_t { Theta0, Theta1 };

struct TwoBridgeConfig {
  std::int64_t horizon = 10000;
  ThetaVariant variant = ThetaVariant::Theta0;
  double p_majority = 0.95;
  double p_minority_c = 0.95;
  double p_minority_b = 0.05;
  NoiseModel noise = NoiseModel::GaussianUnit;

  /// 1/sqrt(T); always derived from the horizon.
  double epsilon() const;
  Vector theta() const { return theta_for(variant); }
  Vector theta_for(ThetaVariant v) const;
  void validate() const;
};

/// Fills `out` in place. Slot 0 is the top bridge [1 0], slot 1 the bottom
/// bridge [0 1]. A rounds offer [1 0] in both slots, C rounds offer only
/// [0 1] in slot 1, B rounds offer one of each.
void sample_two_bridge_round(const TwoBridgeConfig& cfg, Rng& rng, std::int64_t t,
                             ContextRound& out);
ContextRound sample_two_bridge_round(const TwoBridgeConfig& cfg, Rng& rng, std::int64_t t);

// ---------------------------------------------------------------------------
// Perturbed context generation
// ---------------------------------------------------------------------------

struct MeanTuple {
  std::vector<std::optional<Vector>> means;
  double weight = 1.0;
  std::optional<Group> group;
};

struct PerturbedConfig {
  std::vector<MeanTuple> catalog;
  double rho = 0.1;
  /// Probability of a minority round when the catalog is group-tagged.
  double minority_probability = 0.0;
  LatentModel model;

  Eigen::Index dim() const;
  std::size_t num_actions() const;
  bool group_tagged() const;
  void validate() const;
};

/// Draws a mean tuple (group first when the catalog is group-tagged) and
/// adds i.i.d. N(0, rho^2) noise to every coordinate of every available
/// context. Holds the per-config sampling tables; construct once per run.
class PerturbedGenerator {
 public:
  explicit PerturbedGenerator(PerturbedConfig cfg);

  void sample(Rng& context_rng, Rng& perturbation_rng, ContextRound& out);

  /// Perturbation-only view of the last sample (x - mu), one column per slot.
  const Matrix& last_perturbation() const noexcept { return last_noise_; }
  std::size_t last_entry() const noexcept { return last_entry_; }

  const PerturbedConfig& config() const noexcept { return cfg_; }

 private:
  PerturbedConfig cfg_;
  std::discrete_distribution<std::size_t> all_;
  std::discrete_distribution<std::size_t> majority_;
  std::discrete_distribution<std::size_t> minority_;
  std::vector<std::size_t> majority_index_;
  std::vector<std::size_t> minority_index_;
  std::bernoulli_distribution minority_coin_;
  std::normal_distribution<double> noise_;
  Matrix last_noise_;
  Vector buffer_;
  bool tagged_ = false;
  std::size_t last_entry_ = 0;
};

/// Single-stream convenience form (contexts and perturbations share `rng`).
ContextRound sample_perturbed_round(const PerturbedConfig& cfg, Rng& rng);

/// Random catalog of `entries` tuples of K means drawn uniformly from the
/// unit ball. When `two_groups` is set, majority and minority means are
/// pulled toward different fixed directions and tagged accordingly.
std::vector<MeanTuple> make_random_catalog(Eigen::Index dim, std::size_t num_actions,
                                           std::size_t entries, Rng& rng,
                                           bool two_groups = false);

/// High-probability bound on any single perturbation coordinate:
/// rho * sqrt(2 ln(2 T K d / delta_r)).
double perturbation_bound(double rho, std::int64_t horizon, std::size_t num_actions,
                          Eigen::Index dim, double delta_r);

/// High-probability bound on context norms: 1 + perturbation_bound * sqrt(d),
/// with delta_r = T^-2.
double context_radius(double rho, std::int64_t horizon, std::size_t num_actions,
                      Eigen::Index dim);

// ---------------------------------------------------------------------------
// Latent vector and rewards
// ---------------------------------------------------------------------------

/// One draw from N(prior_mean, prior_cov) via a Cholesky factor of the
/// covariance. Throws ModelError unless the covariance is symmetric PD.
Vector draw_theta(const LatentModel& model, Rng& rng);

/// GaussianUnit: theta'x + N(0,1). Bernoulli: 1 with probability theta'x.
double realize_reward(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& x,
                      NoiseModel noise, Rng& rng);

}  // namespace linbandit
