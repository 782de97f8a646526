// Action-selection rules: LinUCB, BatchBayesGreedy, BatchFreqGreedy, the
// oracle and uniform-random baselines.
#pragma once

#include "linbandit/estimators.hpp"
#include "linbandit/rng.hpp"
#include "linbandit/types.hpp"

#include <Eigen/Cholesky>

#include <optional>
#include <string>
#include <string_view>

namespace linbandit {

// ---------------------------------------------------------------------------
// LinUCB
// ---------------------------------------------------------------------------

struct LinUCBParams {
  double context_bound = 1.0;     // L
  double theta_bound = 1.0;       // S
  double confidence_scale = 1.0;  // c0
  double ridge = 0.0;             // lambda added to Z before inversion
  std::int64_t horizon = 1;       // T
  /// Lower floor on the width; the effective width is max(floor, f(t)).
  double width_floor = 0.0;

  /// L = 1 + rho sqrt(2 d ln(2 T^3 K d)), S = |prior_mean| + sqrt(3 d ln T),
  /// c0 = 1, ridge 1. `inflation` >= 1 scales L and S up for runs that do
  /// not assume exact knowledge of rho and the prior mean.
  static LinUCBParams perturbed_defaults(double rho, Eigen::Index dim, std::size_t num_actions,
                                         std::int64_t horizon, double prior_mean_norm,
                                         double inflation = 1.0);

  /// Basis-vector contexts and |theta| <= 1: L = S = c0 = 1, ridge 0, and a
  /// width floor of 2 sqrt(ln T).
  static LinUCBParams two_bridge_defaults(std::int64_t horizon);

  void validate() const;
};

/// f(t) = S + sqrt(d c0 ln(T + t T L^2)), natural logarithm.
double interval_width(std::int64_t observations, const LinUCBParams& p, Eigen::Index dim);

/// max(width_floor, interval_width).
double effective_width(std::int64_t observations, const LinUCBParams& p, Eigen::Index dim);

/// Reusable scratch space for LinUCB scoring. With ridge 0 and a context
/// reaching into the null space of Z the optimistic score is +infinity.
class LinUCBScorer {
 public:
  explicit LinUCBScorer(Eigen::Index dim);

  std::size_t select(const ContextRound& round, const SufficientStats& s, double width,
                     double ridge);

  /// Scores of the last select() call, one per slot; unavailable slots are -inf.
  const Vector& scores() const noexcept { return scores_; }

 private:
  Matrix a_;
  Eigen::LLT<Matrix> llt_;
  Vector theta_;
  Vector tmp_;
  Vector scores_;
};

std::size_t linucb_select(const ContextRound& round, const SufficientStats& s, double width,
                          double ridge);
std::size_t linucb_select(const ContextRound& round, const SufficientStats& s,
                          const LinUCBParams& p, Eigen::Index dim);

// ---------------------------------------------------------------------------
// Greedy
// ---------------------------------------------------------------------------

/// argmax x_a' estimate over available slots; ties go to the lowest index.
std::size_t greedy_select(const ContextRound& round, const Eigen::Ref<const Vector>& estimate);

/// Uniformly random available slot.
std::size_t uniform_select(const ContextRound& round, Rng& rng);

/// Batch size sufficient for the batch covariance to reach R^2 in its
/// minimum eigenvalue with probability 1 - delta:
///   ceil((R/rho)^2 * 8e^2/(e-1)^2 * (1 + ln(2d/delta)) * ln T + 4e/(e-1) * ln(2/delta)).
std::int64_t suggested_batch_size(double rho, double context_radius, Eigen::Index dim,
                                  std::int64_t horizon, double delta);

/// Same, with R = 1 + rho sqrt(2 ln(2 T K d / delta_r)) sqrt(d), delta_r = T^-2.
std::int64_t suggested_batch_size(double rho, Eigen::Index dim, std::size_t num_actions,
                                  std::int64_t horizon, double delta);

// ---------------------------------------------------------------------------
// Policy state machine
// ---------------------------------------------------------------------------

enum class PolicyType : std::uint8_t {
  LinUCB,
  BatchBayesGreedy,
  BatchFreqGreedy,
  Oracle,
  UniformRandom,
};

std::string_view to_string(PolicyType t);
std::optional<PolicyType> parse_policy_type(std::string_view name);

struct PolicyKind {
  PolicyType type = PolicyType::Oracle;
  LinUCBParams linucb;
  std::int64_t batch_size = 1;

  static PolicyKind lin_ucb(LinUCBParams p);
  static PolicyKind batch_bayes_greedy(std::int64_t batch_size);
  static PolicyKind batch_freq_greedy(std::int64_t batch_size);
  static PolicyKind oracle();
  static PolicyKind uniform_random();

  bool batched() const noexcept {
    return type == PolicyType::BatchBayesGreedy || type == PolicyType::BatchFreqGreedy;
  }
  void validate() const;
};

/// What a policy may know about the instance: the true latent vector (oracle
/// only) and the Gaussian prior (Bayesian estimates and predictions).
struct PolicyContext {
  Vector theta;
  std::optional<Vector> prior_mean;
  std::optional<Matrix> prior_cov;

  bool has_prior() const noexcept { return prior_mean.has_value() && prior_cov.has_value(); }
};

struct Decision {
  std::size_t action = 0;
  /// Bayesian-greedy choice from the same batch-frozen data; equals `action`
  /// for non-batched policies and when no prior is known.
  std::size_t prediction = 0;
};

/// Per-replicate policy state. Call step() for each round the policy serves,
/// then observe() with the chosen context and realized reward.
///
/// Batched policies refresh their estimates only when a round crosses into
/// a new batch, from all data up to the end of the previous batch. A partial
/// final batch keeps the last estimate.
class PolicyState {
 public:
  PolicyState(PolicyKind kind, Eigen::Index dim, PolicyContext context, Rng rng);

  Decision step(const ContextRound& round);
  void observe(const Eigen::Ref<const Vector>& x, double reward);

  const PolicyKind& kind() const noexcept { return kind_; }
  const SufficientStats& stats() const noexcept { return stats_; }
  const History& history() const noexcept { return history_; }
  std::int64_t rounds_seen() const noexcept { return history_.size(); }

  /// Batch-frozen estimates (batched policies only). The Bayesian one is
  /// empty when no prior is known.
  const Vector& frozen_estimate() const noexcept { return frozen_estimate_; }
  const Vector& frozen_ols_estimate() const noexcept { return frozen_ols_; }
  const std::optional<Vector>& frozen_bayes_estimate() const noexcept { return frozen_bayes_; }
  std::int64_t frozen_at() const noexcept { return frozen_at_; }

  /// Full recomputation of Z from the history every this many updates.
  static constexpr std::int64_t kRecomputeEvery = 10000;

 private:
  void refresh_batch_estimates(std::int64_t t0);

  PolicyKind kind_;
  PolicyContext context_;
  Rng rng_;
  SufficientStats stats_;
  History history_;
  LinUCBScorer scorer_;
  Vector frozen_estimate_;
  Vector frozen_ols_;
  std::optional<Vector> frozen_bayes_;
  std::int64_t frozen_at_ = -1;
  bool awaiting_observation_ = false;
};

/// Free-function form of PolicyState::step.
Decision policy_step(PolicyState& state, const ContextRound& round);

}  // namespace linbandit
