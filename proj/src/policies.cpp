#include "linbandit/policies.hpp"

#include "linbandit/environments.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace linbandit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LinUCBParams LinUCBParams::perturbed_defaults(double rho, Eigen::Index dim,
                                              std::size_t num_actions, std::int64_t horizon,
                                              double prior_mean_norm, double inflation) {
  const double d = static_cast<double>(dim);
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(num_actions);
  LinUCBParams p;
  p.context_bound = inflation * (1.0 + rho * std::sqrt(2.0 * d * std::log(2.0 * t * t * t * k * d)));
  p.theta_bound = inflation * (prior_mean_norm + std::sqrt(3.0 * d * std::log(t)));
  p.confidence_scale = 1.0;
  p.ridge = 1.0;
  p.horizon = horizon;
  return p;
}

LinUCBParams LinUCBParams::two_bridge_defaults(std::int64_t horizon) {
  LinUCBParams p;
  p.context_bound = 1.0;
  p.theta_bound = 1.0;
  p.confidence_scale = 1.0;
  p.ridge = 0.0;
  p.horizon = horizon;
  p.width_floor = 2.0 * std::sqrt(std::log(static_cast<double>(horizon)));
  return p;
}

void LinUCBParams::validate() const {
  if (!(context_bound > 0.0)) throw ModelError("LinUCB context bound L must be > 0");
  if (!(theta_bound >= 0.0)) throw ModelError("LinUCB theta bound S must be >= 0");
  if (!(confidence_scale >= 1.0)) throw ModelError("LinUCB confidence scale c0 must be >= 1");
  if (!(ridge >= 0.0)) throw ModelError("LinUCB ridge must be >= 0");
  if (horizon < 1) throw ModelError("LinUCB horizon must be >= 1");
  if (!(width_floor >= 0.0)) throw ModelError("LinUCB width floor must be >= 0");
}

double interval_width(std::int64_t observations, const LinUCBParams& p, Eigen::Index dim) {
  const double t = static_cast<double>(p.horizon);
  const double n = static_cast<double>(observations);
  const double l2 = p.context_bound * p.context_bound;
  return p.theta_bound +
         std::sqrt(static_cast<double>(dim) * p.confidence_scale * std::log(t + n * t * l2));
}

double effective_width(std::int64_t observations, const LinUCBParams& p, Eigen::Index dim) {
  return std::max(p.width_floor, interval_width(observations, p, dim));
}

// ---------------------------------------------------------------------------

LinUCBScorer::LinUCBScorer(Eigen::Index dim)
    : a_(Matrix::Zero(dim, dim)), llt_(dim), theta_(dim), tmp_(dim) {}

std::size_t LinUCBScorer::select(const ContextRound& round, const SufficientStats& s,
                                 double width, double ridge) {
  const Eigen::Index d = s.dim();
  if (round.dim() != d) throw DimensionError("linucb_select: round dimension mismatch");
  if (round.num_available() == 0) throw InvalidActionError("round has no available action");

  a_ = s.covariance();
  a_.diagonal().array() += ridge;
  scores_.setConstant(static_cast<Eigen::Index>(round.num_actions()), -kInf);

  llt_.compute(a_);
  bool pd = llt_.info() == Eigen::Success;
  if (pd) {
    const auto diag = llt_.matrixLLT().diagonal();
    pd = diag.minCoeff() * diag.minCoeff() > kSingularCutoff * diag.maxCoeff() * diag.maxCoeff();
  }

  if (pd) {
    theta_ = llt_.solve(s.response());
    for (std::size_t a = 0; a < round.num_actions(); ++a) {
      if (!round.available(a)) continue;
      const auto x = round.context(a);
      tmp_ = llt_.solve(x);
      const double var = std::max(0.0, x.dot(tmp_));
      scores_(static_cast<Eigen::Index>(a)) = x.dot(theta_) + width * std::sqrt(var);
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a_);
    const Vector& ev = eig.eigenvalues();
    const Matrix& v = eig.eigenvectors();
    const double cutoff = kSingularCutoff * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Vector inv = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (ev(i) > cutoff && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
    }
    theta_ = v * (inv.asDiagonal() * (v.transpose() * s.response()));
    for (std::size_t a = 0; a < round.num_actions(); ++a) {
      if (!round.available(a)) continue;
      const auto x = round.context(a);
      tmp_ = v.transpose() * x;
      double null_mass = 0.0;
      double var = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (inv(i) == 0.0) {
          null_mass += tmp_(i) * tmp_(i);
        } else {
          var += tmp_(i) * tmp_(i) * inv(i);
        }
      }
      const double xnorm2 = x.squaredNorm();
      const bool unexplored = null_mass > 1e-18 * std::max(1.0, xnorm2);
      double score = x.dot(theta_);
      if (width > 0.0) score = unexplored ? kInf : score + width * std::sqrt(var);
      scores_(static_cast<Eigen::Index>(a)) = score;
    }
  }

  std::size_t best = round.num_actions();
  for (std::size_t a = 0; a < round.num_actions(); ++a) {
    if (!round.available(a)) continue;
    if (best == round.num_actions() ||
        scores_(static_cast<Eigen::Index>(a)) > scores_(static_cast<Eigen::Index>(best))) {
      best = a;
    }
  }
  return best;
}

std::size_t linucb_select(const ContextRound& round, const SufficientStats& s, double width,
                          double ridge) {
  LinUCBScorer scorer(s.dim());
  return scorer.select(round, s, width, ridge);
}

std::size_t linucb_select(const ContextRound& round, const SufficientStats& s,
                          const LinUCBParams& p, Eigen::Index dim) {
  return linucb_select(round, s, effective_width(s.count(), p, dim), p.ridge);
}

// ---------------------------------------------------------------------------

std::size_t greedy_select(const ContextRound& round, const Eigen::Ref<const Vector>& estimate) {
  if (estimate.size() != round.dim()) throw DimensionError("greedy_select: dimension mismatch");
  std::size_t best = round.num_actions();
  double best_value = -kInf;
  for (std::size_t a = 0; a < round.num_actions(); ++a) {
    if (!round.available(a)) continue;
    const double value = round.context(a).dot(estimate);
    if (best == round.num_actions() || value > best_value) {
      best = a;
      best_value = value;
    }
  }
  if (best == round.num_actions()) throw InvalidActionError("round has no available action");
  return best;
}

std::size_t uniform_select(const ContextRound& round, Rng& rng) {
  const std::size_t n = round.num_available();
  if (n == 0) throw InvalidActionError("round has no available action");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t k = pick(rng);
  for (std::size_t a = 0; a < round.num_actions(); ++a) {
    if (!round.available(a)) continue;
    if (k == 0) return a;
    --k;
  }
  return round.num_actions() - 1;  // unreachable
}

std::int64_t suggested_batch_size(double rho, double context_radius, Eigen::Index dim,
                                  std::int64_t horizon, double delta) {
  if (!(rho > 0.0) || !(context_radius > 0.0) || dim < 1 || horizon < 1 || !(delta > 0.0)) {
    throw ModelError("suggested_batch_size: inputs must be positive");
  }
  constexpr double e = std::numbers::e;
  const double ratio = context_radius / rho;
  const double y0 = ratio * ratio * (8.0 * e * e / ((e - 1.0) * (e - 1.0))) *
                        (1.0 + std::log(2.0 * static_cast<double>(dim) / delta)) *
                        std::log(static_cast<double>(horizon)) +
                    (4.0 * e / (e - 1.0)) * std::log(2.0 / delta);
  return static_cast<std::int64_t>(std::ceil(y0));
}

std::int64_t suggested_batch_size(double rho, Eigen::Index dim, std::size_t num_actions,
                                  std::int64_t horizon, double delta) {
  return suggested_batch_size(rho, context_radius(rho, horizon, num_actions, dim), dim, horizon,
                              delta);
}

// ---------------------------------------------------------------------------

std::string_view to_string(PolicyType t) {
  switch (t) {
    case PolicyType::LinUCB: return "LinUCB";
    case PolicyType::BatchBayesGreedy: return "BatchBayesGreedy";
    case PolicyType::BatchFreqGreedy: return "BatchFreqGreedy";
    case PolicyType::Oracle: return "Oracle";
    case PolicyType::UniformRandom: return "UniformRandom";
  }
  return "?";
}

std::optional<PolicyType> parse_policy_type(std::string_view name) {
  for (auto t : {PolicyType::LinUCB, PolicyType::BatchBayesGreedy, PolicyType::BatchFreqGreedy,
                 PolicyType::Oracle, PolicyType::UniformRandom}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

PolicyKind PolicyKind::lin_ucb(LinUCBParams p) {
  PolicyKind k;
  k.type = PolicyType::LinUCB;
  k.linucb = p;
  return k;
}

PolicyKind PolicyKind::batch_bayes_greedy(std::int64_t batch_size) {
  PolicyKind k;
  k.type = PolicyType::BatchBayesGreedy;
  k.batch_size = batch_size;
  return k;
}

PolicyKind PolicyKind::batch_freq_greedy(std::int64_t batch_size) {
  PolicyKind k;
  k.type = PolicyType::BatchFreqGreedy;
  k.batch_size = batch_size;
  return k;
}

PolicyKind PolicyKind::oracle() { return PolicyKind{}; }

PolicyKind PolicyKind::uniform_random() {
  PolicyKind k;
  k.type = PolicyType::UniformRandom;
  return k;
}

void PolicyKind::validate() const {
  if (batch_size < 1) throw ModelError("batch size must be >= 1");
  if (type == PolicyType::LinUCB) linucb.validate();
}

// ---------------------------------------------------------------------------

PolicyState::PolicyState(PolicyKind kind, Eigen::Index dim, PolicyContext context, Rng rng)
    : kind_(kind),
      context_(std::move(context)),
      rng_(rng),
      stats_(dim),
      history_(dim, kind.batched() ? kind.batch_size : 1),
      scorer_(dim) {
  kind_.validate();
  if (kind_.type == PolicyType::Oracle && context_.theta.size() != dim) {
    throw ModelError("oracle policy needs the true theta");
  }
  if (kind_.type == PolicyType::BatchBayesGreedy && !context_.has_prior()) {
    throw ModelError("BatchBayesGreedy needs a Gaussian prior");
  }
  if (context_.has_prior() &&
      (context_.prior_mean->size() != dim || context_.prior_cov->rows() != dim)) {
    throw DimensionError("policy prior dimension mismatch");
  }
}

void PolicyState::refresh_batch_estimates(std::int64_t t0) {
  frozen_at_ = t0;
  frozen_ols_ = ols_estimate(stats_);
  frozen_estimate_ = frozen_ols_;
  if (context_.has_prior()) {
    frozen_bayes_ = bayes_posterior_mean(stats_, *context_.prior_mean, *context_.prior_cov);
  }
  if (kind_.type == PolicyType::BatchBayesGreedy) frozen_estimate_ = *frozen_bayes_;
}

Decision PolicyState::step(const ContextRound& round) {
  if (awaiting_observation_) throw std::logic_error("policy step called twice without observe");
  const std::int64_t t = rounds_seen() + 1;
  Decision out;
  switch (kind_.type) {
    case PolicyType::LinUCB: {
      const double width = effective_width(stats_.count(), kind_.linucb, stats_.dim());
      out.action = scorer_.select(round, stats_, width, kind_.linucb.ridge);
      out.prediction = out.action;
      break;
    }
    case PolicyType::Oracle:
      out.action = greedy_select(round, context_.theta);
      out.prediction = out.action;
      break;
    case PolicyType::UniformRandom:
      out.action = uniform_select(round, rng_);
      out.prediction = out.action;
      break;
    case PolicyType::BatchBayesGreedy:
    case PolicyType::BatchFreqGreedy: {
      const std::int64_t t0 = last_batch_end(t, kind_.batch_size);
      if (t0 != frozen_at_) refresh_batch_estimates(t0);
      if (kind_.type == PolicyType::BatchFreqGreedy && t0 == 0) {
        out.action = uniform_select(round, rng_);  // cold start: all-zero estimate ties
      } else {
        out.action = greedy_select(round, frozen_estimate_);
      }
      out.prediction = frozen_bayes_ ? greedy_select(round, *frozen_bayes_) : out.action;
      break;
    }
  }
  awaiting_observation_ = true;
  return out;
}

void PolicyState::observe(const Eigen::Ref<const Vector>& x, double reward) {
  history_.append(x, reward);
  stats_.update(x, reward);
  if (stats_.count() % kRecomputeEvery == 0) stats_ = SufficientStats::from_history(history_);
  awaiting_observation_ = false;
}

Decision policy_step(PolicyState& state, const ContextRound& round) { return state.step(round); }

}  // namespace linbandit
