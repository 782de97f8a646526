#include "linbandit/environments.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <string>

namespace linbandit {

const char* to_string(NoiseModel n) {
  return n == NoiseModel::GaussianUnit ? "GaussianUnit" : "Bernoulli";
}

namespace {

void check_covariance(const Matrix& cov, Eigen::Index d) {
  if (cov.rows() != d || cov.cols() != d) throw ModelError("prior covariance has wrong shape");
  if (!cov.allFinite()) throw ModelError("prior covariance has non-finite entries");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ModelError("prior covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    throw ModelError("prior covariance is not positive definite");
  }
}

}  // namespace

void LatentModel::validate() const {
  const Eigen::Index d = prior_mean.size();
  if (d < 1) throw ModelError("latent model dimension must be >= 1");
  if (theta.size() != 0 && theta.size() != d) throw ModelError("theta dimension mismatch");
  if (!prior_mean.allFinite()) throw ModelError("prior mean has non-finite entries");
  check_covariance(prior_cov, d);
  if (!(perturbation >= 0.0)) throw ModelError("perturbation size must be >= 0");
}

// ---------------------------------------------------------------------------

double TwoBridgeConfig::epsilon() const { return 1.0 / std::sqrt(static_cast<double>(horizon)); }

Vector TwoBridgeConfig::theta_for(ThetaVariant v) const {
  const double eps = epsilon();
  Vector th(2);
  if (v == ThetaVariant::Theta0) {
    th << 0.5, 0.5 - eps;
  } else {
    th << 0.5 - eps, 0.5;
  }
  return th;
}

void TwoBridgeConfig::validate() const {
  if (horizon < 1) throw ModelError("two-bridge horizon must be >= 1");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_majority) || !prob(p_minority_c) || !prob(p_minority_b)) {
    throw ModelError("two-bridge probabilities must lie in [0,1]");
  }
  if (std::abs(p_minority_b + p_minority_c - 1.0) > 1e-12) {
    throw ModelError("two-bridge minority B and C probabilities must sum to 1");
  }
}

void sample_two_bridge_round(const TwoBridgeConfig& cfg, Rng& rng, std::int64_t t,
                             ContextRound& out) {
  static const Vector kTop = Vector::Unit(2, 0);
  static const Vector kBottom = Vector::Unit(2, 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  out.reset(2, 2);
  out.round_index = t;
  if (unif(rng) < cfg.p_majority) {
    out.group = Group::Majority;
    out.kind = RoundKind::A;
    out.set(0, kTop);
    out.set(1, kTop);
    return;
  }
  out.group = Group::Minority;
  if (unif(rng) < cfg.p_minority_c) {
    out.kind = RoundKind::C;
    out.set(1, kBottom);
  } else {
    out.kind = RoundKind::B;
    out.set(0, kTop);
    out.set(1, kBottom);
  }
}

ContextRound sample_two_bridge_round(const TwoBridgeConfig& cfg, Rng& rng, std::int64_t t) {
  ContextRound round;
  sample_two_bridge_round(cfg, rng, t, round);
  return round;
}

// ---------------------------------------------------------------------------

Eigen::Index PerturbedConfig::dim() const {
  for (const auto& entry : catalog) {
    for (const auto& m : entry.means) {
      if (m) return m->size();
    }
  }
  return model.dim();
}

std::size_t PerturbedConfig::num_actions() const {
  return catalog.empty() ? 0 : catalog.front().means.size();
}

bool PerturbedConfig::group_tagged() const {
  return std::any_of(catalog.begin(), catalog.end(),
                     [](const MeanTuple& m) { return m.group.has_value(); });
}

void PerturbedConfig::validate() const {
  if (catalog.empty()) throw ModelError("perturbed catalog is empty");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ModelError("rho must be finite and >= 0");
  const Eigen::Index d = dim();
  const std::size_t k = num_actions();
  if (k == 0) throw ModelError("catalog tuples must have at least one slot");
  bool any_group = false;
  bool all_group = true;
  for (const auto& entry : catalog) {
    if (entry.means.size() != k) throw ModelError("catalog tuples differ in action count");
    if (!(entry.weight > 0.0)) throw ModelError("catalog weights must be positive");
    std::size_t avail = 0;
    for (const auto& m : entry.means) {
      if (!m) continue;
      ++avail;
      check_context(*m, d);
      if (m->norm() > 1.0 + 1e-12) throw ModelError("catalog mean context has norm > 1");
    }
    if (avail == 0) throw ModelError("catalog tuple has no available action");
    any_group = any_group || entry.group.has_value();
    all_group = all_group && entry.group.has_value();
  }
  if (any_group && !all_group) throw ModelError("catalog group tags must be all-or-none");
  if (any_group) {
    if (!(minority_probability >= 0.0 && minority_probability <= 1.0)) {
      throw ModelError("minority probability must lie in [0,1]");
    }
    auto has = [&](Group g) {
      return std::any_of(catalog.begin(), catalog.end(),
                         [g](const MeanTuple& m) { return m.group == g; });
    };
    if (minority_probability > 0.0 && !has(Group::Minority)) {
      throw ModelError("minority probability > 0 but catalog has no minority entries");
    }
    if (minority_probability < 1.0 && !has(Group::Majority)) {
      throw ModelError("minority probability < 1 but catalog has no majority entries");
    }
  }
  if (model.prior_mean.size() != 0) {
    model.validate();
    if (model.dim() != d) throw ModelError("latent model dimension differs from catalog");
  }
}

PerturbedGenerator::PerturbedGenerator(PerturbedConfig cfg)
    : cfg_(std::move(cfg)), noise_(0.0, 1.0) {
  cfg_.validate();
  std::vector<double> all_w;
  std::vector<double> maj_w;
  std::vector<double> min_w;
  for (std::size_t i = 0; i < cfg_.catalog.size(); ++i) {
    const auto& e = cfg_.catalog[i];
    all_w.push_back(e.weight);
    if (e.group == Group::Minority) {
      minority_index_.push_back(i);
      min_w.push_back(e.weight);
    } else if (e.group == Group::Majority) {
      majority_index_.push_back(i);
      maj_w.push_back(e.weight);
    }
  }
  all_ = std::discrete_distribution<std::size_t>(all_w.begin(), all_w.end());
  if (!maj_w.empty()) majority_ = std::discrete_distribution<std::size_t>(maj_w.begin(), maj_w.end());
  if (!min_w.empty()) minority_ = std::discrete_distribution<std::size_t>(min_w.begin(), min_w.end());
  minority_coin_ = std::bernoulli_distribution(cfg_.minority_probability);
  last_noise_.setZero(cfg_.dim(), static_cast<Eigen::Index>(cfg_.num_actions()));
  buffer_.setZero(cfg_.dim());
  tagged_ = cfg_.group_tagged();
}

void PerturbedGenerator::sample(Rng& context_rng, Rng& perturbation_rng, ContextRound& out) {
  const Eigen::Index d = cfg_.dim();
  const std::size_t k = cfg_.num_actions();
  Group group = Group::Majority;
  std::size_t entry = 0;
  if (tagged_) {
    group = minority_coin_(context_rng) ? Group::Minority : Group::Majority;
    entry = group == Group::Minority ? minority_index_[minority_(context_rng)]
                                     : majority_index_[majority_(context_rng)];
  } else {
    entry = all_(context_rng);
  }
  last_entry_ = entry;
  const auto& tuple = cfg_.catalog[entry];

  const std::int64_t t = out.round_index;
  out.reset(d, k);
  out.round_index = t;
  out.group = group;
  last_noise_.setZero();
  for (std::size_t a = 0; a < k; ++a) {
    if (!tuple.means[a]) continue;
    for (Eigen::Index i = 0; i < d; ++i) {
      last_noise_(i, static_cast<Eigen::Index>(a)) = cfg_.rho * noise_(perturbation_rng);
    }
    buffer_ = *tuple.means[a] + last_noise_.col(static_cast<Eigen::Index>(a));
    out.set(a, buffer_);
  }
}

ContextRound sample_perturbed_round(const PerturbedConfig& cfg, Rng& rng) {
  PerturbedGenerator gen(cfg);
  ContextRound round;
  gen.sample(rng, rng, round);
  return round;
}

std::vector<MeanTuple> make_random_catalog(Eigen::Index dim, std::size_t num_actions,
                                           std::size_t entries, Rng& rng, bool two_groups) {
  if (dim < 1 || num_actions < 1 || entries < 1) {
    throw ModelError("random catalog needs dim, actions and entries >= 1");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto unit_ball = [&]() {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
    const double radius = std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    return Vector(v.normalized() * radius);
  };

  // Group anchors: opposite directions along the first axis.
  const Vector majority_anchor = Vector::Unit(dim, 0);
  const Vector minority_anchor = -Vector::Unit(dim, 0);

  std::vector<MeanTuple> catalog;
  catalog.reserve(two_groups ? 2 * entries : entries);
  auto build = [&](std::optional<Group> group) {
    MeanTuple tuple;
    tuple.group = group;
    for (std::size_t a = 0; a < num_actions; ++a) {
      Vector mu = unit_ball();
      if (group) {
        mu = 0.5 * mu + 0.5 * (*group == Group::Minority ? minority_anchor : majority_anchor);
      }
      tuple.means.emplace_back(std::move(mu));
    }
    return tuple;
  };
  for (std::size_t i = 0; i < entries; ++i) {
    if (two_groups) {
      catalog.push_back(build(Group::Majority));
      catalog.push_back(build(Group::Minority));
    } else {
      catalog.push_back(build(std::nullopt));
    }
  }
  return catalog;
}

double perturbation_bound(double rho, std::int64_t horizon, std::size_t num_actions,
                          Eigen::Index dim, double delta_r) {
  const double n = 2.0 * static_cast<double>(horizon) * static_cast<double>(num_actions) *
                   static_cast<double>(dim);
  return rho * std::sqrt(2.0 * std::log(n / delta_r));
}

double context_radius(double rho, std::int64_t horizon, std::size_t num_actions,
                      Eigen::Index dim) {
  const double t = static_cast<double>(horizon);
  return 1.0 + perturbation_bound(rho, horizon, num_actions, dim, 1.0 / (t * t)) *
                   std::sqrt(static_cast<double>(dim));
}

// ---------------------------------------------------------------------------

Vector draw_theta(const LatentModel& model, Rng& rng) {
  const Eigen::Index d = model.prior_mean.size();
  if (d < 1) throw ModelError("latent model dimension must be >= 1");
  check_covariance(model.prior_cov, d);
  Eigen::LLT<Matrix> llt(model.prior_cov);
  if (llt.info() != Eigen::Success) throw ModelError("prior covariance is not positive definite");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = gauss(rng);
  return model.prior_mean + llt.matrixL() * z;
}

double realize_reward(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& x,
                      NoiseModel noise, Rng& rng) {
  if (theta.size() != x.size()) throw DimensionError("reward: theta/context dimension mismatch");
  const double mean = theta.dot(x);
  if (noise == NoiseModel::GaussianUnit) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return mean + gauss(rng);
  }
  if (mean < -1e-12 || mean > 1.0 + 1e-12) {
    throw ModelError("Bernoulli reward mean " + std::to_string(mean) + " outside [0,1]");
  }
  std::bernoulli_distribution coin(std::clamp(mean, 0.0, 1.0));
  return coin(rng) ? 1.0 : 0.0;
}

}  // namespace linbandit
