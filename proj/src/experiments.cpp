#include "linbandit/experiments.hpp"

#include "linbandit/environments.hpp"
#include "linbandit/estimators.hpp"
#include "linbandit/metrics.hpp"
#include "linbandit/policies.hpp"
#include "linbandit/rng.hpp"
#include "linbandit/simulation.hpp"
#include "linbandit/statistics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace linbandit {

namespace {

constexpr std::uint64_t kSimulationReplicate = 0;

std::vector<std::int64_t> curve_checkpoints(std::int64_t horizon) {
  std::set<std::int64_t> pts;
  constexpr int kPoints = 60;
  for (int i = 0; i <= kPoints; ++i) {
    const double t = std::pow(static_cast<double>(horizon), static_cast<double>(i) / kPoints);
    pts.insert(std::clamp<std::int64_t>(std::llround(t), 1, horizon));
  }
  return {pts.begin(), pts.end()};
}

Vector random_direction(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  do {
    for (Eigen::Index i = 0; i < d; ++i) v(i) = gauss(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

}  // namespace

PerturbedConfig build_perturbed_instance(const ExperimentConfig& cfg) {
  Rng rng = make_stream(cfg.master_seed, StreamPurpose::Instance);
  const bool two_groups = cfg.experiment == ExperimentKind::ExternalityVanishing;
  PerturbedConfig pc;
  pc.catalog = make_random_catalog(cfg.dim, cfg.actions, cfg.catalog_size, rng, two_groups);
  pc.rho = cfg.rho;
  pc.minority_probability = two_groups ? cfg.minority_probability : 0.0;
  pc.model.prior_mean = random_direction(cfg.dim, rng) * cfg.effective_prior_mean_norm();
  pc.model.prior_cov = cfg.prior_scale * Matrix::Identity(cfg.dim, cfg.dim);
  pc.model.perturbation = cfg.rho;
  pc.model.noise = NoiseModel::GaussianUnit;
  pc.validate();
  return pc;
}

PolicyKind make_policy_kind(const ExperimentConfig& cfg, PolicyType type, std::int64_t horizon,
                            double prior_mean_norm) {
  switch (type) {
    case PolicyType::LinUCB: {
      LinUCBParams p = is_two_bridge(cfg.experiment)
                           ? LinUCBParams::two_bridge_defaults(horizon)
                           : LinUCBParams::perturbed_defaults(cfg.rho, cfg.dim, cfg.actions, horizon,
                                                              prior_mean_norm, cfg.inflation);
      p.confidence_scale = cfg.c0;
      p.ridge = cfg.ridge;
      return PolicyKind::lin_ucb(p);
    }
    case PolicyType::BatchBayesGreedy: return PolicyKind::batch_bayes_greedy(cfg.batch_size);
    case PolicyType::BatchFreqGreedy: return PolicyKind::batch_freq_greedy(cfg.batch_size);
    case PolicyType::Oracle: return PolicyKind::oracle();
    case PolicyType::UniformRandom: return PolicyKind::uniform_random();
  }
  throw Error("unknown policy type");
}

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, const PerturbedConfig* instance,
                               const PolicySpec& policy, std::int64_t horizon,
                               std::int64_t replicate) {
  const bool two_bridge = is_two_bridge(cfg.experiment);
  if (!two_bridge && instance == nullptr) throw Error("perturbed experiment needs an instance");

  ReplicateOutcome out;
  const std::uint64_t seed = replicate_seed(cfg.master_seed, static_cast<std::uint64_t>(replicate));
  out.seed = seed;
  Rng context_rng = make_stream(seed, StreamPurpose::Contexts);
  Rng perturbation_rng = make_stream(seed, StreamPurpose::Perturbations);
  Rng reward_rng = make_stream(seed, StreamPurpose::Rewards);
  Rng theta_rng = make_stream(seed, StreamPurpose::ThetaDraw);
  Rng coin_rng = make_stream(seed, StreamPurpose::Restriction);
  std::bernoulli_distribution restriction_coin(cfg.restriction_probability);

  TwoBridgeConfig bridge;
  std::optional<PerturbedGenerator> generator;
  PolicyContext pctx;
  NoiseModel noise = cfg.noise;
  Eigen::Index d = cfg.dim;
  std::size_t k = cfg.actions;
  double prior_norm = 0.0;

  if (two_bridge) {
    bridge.horizon = horizon;
    bridge.noise = cfg.noise;
    bridge.variant = cfg.theta_variant;
    if (cfg.experiment == ExperimentKind::TwoBridgeImpossibility) {
      std::bernoulli_distribution coin(0.5);
      bridge.variant = coin(theta_rng) ? ThetaVariant::Theta1 : ThetaVariant::Theta0;
    }
    bridge.validate();
    pctx.theta = bridge.theta();
    out.theta_draw_id = bridge.variant == ThetaVariant::Theta0 ? 0 : 1;
    d = 2;
    k = 2;
  } else {
    generator.emplace(*instance);
    pctx.theta = draw_theta(instance->model, theta_rng);
    pctx.prior_mean = instance->model.prior_mean;
    pctx.prior_cov = instance->model.prior_cov;
    noise = instance->model.noise;
    out.theta_draw_id = replicate;
    d = instance->dim();
    k = instance->num_actions();
    prior_norm = instance->model.prior_mean.norm();
  }

  PolicyState state(make_policy_kind(cfg, policy.type, horizon, prior_norm), d, pctx,
                    make_stream(seed, StreamPurpose::Policy));

  RegretLedger ledger;
  ledger.reserve(static_cast<std::size_t>(policy.population == Population::Full ? horizon : horizon / 8));

  const bool eig_diag = cfg.experiment == ExperimentKind::EigGrowth;
  const double eig_coef =
      cfg.rho * cfg.rho / (32.0 * std::log(static_cast<double>(std::max<std::int64_t>(horizon, 2))));
  const std::int64_t eig_stride = std::max<std::int64_t>(1, (horizon - cfg.eig_start) / 200);
  std::vector<double> eig_t;
  std::vector<double> eig_v;
  std::vector<std::int64_t> gap_points;
  if (eig_diag) {
    gap_points = cfg.gap_checkpoints;
    out.scaled_estimator_gaps.assign(gap_points.size(), std::numeric_limits<double>::quiet_NaN());
  }

  std::vector<std::int64_t> checkpoints;
  std::size_t next_checkpoint = 0;
  if (cfg.curves) checkpoints = curve_checkpoints(horizon);
  double running_regret = 0.0;

  ContextRound round(d, k);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    round.round_index = t;
    if (two_bridge) {
      sample_two_bridge_round(bridge, context_rng, t, round);
    } else {
      generator->sample(context_rng, perturbation_rng, round);
    }
    const bool in_set = restriction_coin(coin_rng);

    if (policy.population == Population::Full || round.group == Group::Minority) {
      const Decision dec = state.step(round);
      const std::int64_t n = state.rounds_seen() + 1;  // this policy's own round index

      if (eig_diag) {
        for (std::size_t i = 0; i < gap_points.size(); ++i) {
          if (gap_points[i] != n) continue;
          Vector ols;
          Vector bayes;
          double t0 = 0.0;
          if (state.kind().batched()) {
            ols = state.frozen_ols_estimate();
            bayes = *state.frozen_bayes_estimate();
            t0 = static_cast<double>(state.frozen_at());
          } else {
            ols = ols_estimate(state.stats());
            bayes = bayes_posterior_mean(state.stats(), *pctx.prior_mean, *pctx.prior_cov);
            t0 = static_cast<double>(state.stats().count());
          }
          out.scaled_estimator_gaps[i] = t0 * estimate_error(bayes, ols);
        }
      }

      RegretRecord rec;
      rec.t = t;
      rec.regret = instantaneous_regret(pctx.theta, round, dec.action);
      rec.prediction_regret = dec.prediction == dec.action
                                  ? rec.regret
                                  : instantaneous_regret(pctx.theta, round, dec.prediction);
      rec.group = round.group;
      rec.restricted = in_set;
      ledger.append(rec);
      running_regret += rec.regret;

      const auto x = round.context(dec.action);
      const double reward = realize_reward(pctx.theta, x, noise, reward_rng);
      state.observe(x, reward);

      if (eig_diag && n >= cfg.eig_start) {
        const double lam = min_eigenvalue(state.stats().covariance());
        if (lam < eig_coef * static_cast<double>(n)) out.eig_bound_holds = false;
        if ((n - cfg.eig_start) % eig_stride == 0 || n == horizon) {
          eig_t.push_back(static_cast<double>(n));
          eig_v.push_back(lam);
        }
      }
    }

    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      CurvePoint cp;
      cp.policy = policy.label();
      cp.horizon = horizon;
      cp.replicate = replicate;
      cp.t = t;
      cp.regret_cumulative = running_regret;
      cp.lambda_min = min_eigenvalue(state.stats().covariance());
      out.curve.push_back(std::move(cp));
      ++next_checkpoint;
    }
  }

  out.regret_total = cumulative_regret(ledger, Restriction::All);
  out.regret_minority = cumulative_regret(ledger, Restriction::MinorityOnly);
  out.regret_prediction = prediction_regret(ledger, Restriction::All);
  out.regret_restricted = cumulative_regret(ledger, Restriction::CustomSet);
  if (eig_diag) {
    out.eig_slope = eig_t.size() >= 2 ? ols_slope(eig_t, eig_v) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation check
// ---------------------------------------------------------------------------

SimulationReport verify_simulation(const ExperimentConfig& cfg) {
  const PerturbedConfig instance = build_perturbed_instance(cfg);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, kSimulationReplicate);
  Rng context_rng = make_stream(seed, StreamPurpose::Contexts);
  Rng perturbation_rng = make_stream(seed, StreamPurpose::Perturbations);
  Rng theta_rng = make_stream(seed, StreamPurpose::ThetaDraw);
  Rng sim_rng = make_stream(seed, StreamPurpose::Simulation);

  const Vector theta = draw_theta(instance.model, theta_rng);
  const Eigen::Index d = instance.dim();

  // One batch chosen greedily against the prior mean, as a batch-greedy-style
  // policy does in its first batch.
  PerturbedGenerator gen(instance);
  ContextRound round(d, instance.num_actions());
  RowMatrix batch(cfg.sim_batch, d);
  for (std::int64_t i = 0; i < cfg.sim_batch; ++i) {
    round.round_index = i + 1;
    gen.sample(context_rng, perturbation_rng, round);
    batch.row(i) = round.context(greedy_select(round, instance.model.prior_mean)).transpose();
  }

  SimulationReport report;
  report.batch_size = cfg.sim_batch;
  report.batch_lambda_min = min_eigenvalue(batch.transpose() * batch);
  report.theoretical_batch_size =
      suggested_batch_size(cfg.rho, d, instance.num_actions(), cfg.max_horizon(), 0.05);

  const double radius = std::sqrt(std::max(report.batch_lambda_min, 0.0));
  const Vector means = batch * theta;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector rewards(cfg.sim_batch);
  std::vector<double> simulated(cfg.sim_samples);
  std::vector<double> direct(cfg.sim_samples);

  for (std::size_t i = 0; i < cfg.sim_targets; ++i) {
    SimulationCheck check;
    const double r = radius * std::pow(unif(sim_rng), 1.0 / static_cast<double>(d));
    check.target = random_direction(d, sim_rng) * r;
    check.target_norm = check.target.norm();

    const SimulationWeights w = simulation_weights(batch, check.target);
    check.w_norm = w.w.norm();
    check.residual_var = w.residual_var;
    check.reconstruction_error =
        (batch.transpose() * w.w - check.target).norm() / std::max(1.0, check.target_norm);

    const double mean = theta.dot(check.target);
    for (std::size_t s = 0; s < cfg.sim_samples; ++s) {
      for (Eigen::Index j = 0; j < rewards.size(); ++j) rewards(j) = means(j) + gauss(sim_rng);
      simulated[s] = simulate_reward(w, rewards, sim_rng);
    }
    for (std::size_t s = 0; s < cfg.sim_samples; ++s) direct[s] = mean + gauss(sim_rng);

    const KsResult ks = ks_two_sample(simulated, direct);
    check.ks_statistic = ks.statistic;
    check.p_value = ks.p_value;
    check.simulated_mean = moments(simulated).mean;
    check.direct_mean = moments(direct).mean;
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::string emit_simulation_csv(const SimulationReport& report) {
  std::string out =
      "target,x_norm,w_norm,residual_var,reconstruction_error,ks_statistic,p_value,simulated_mean,"
      "direct_mean\n";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& c = report.checks[i];
    out += std::to_string(i + 1) + ',' + format_real(c.target_norm) + ',' + format_real(c.w_norm) +
           ',' + format_real(c.residual_var) + ',' + format_real(c.reconstruction_error) + ',' +
           format_real(c.ks_statistic) + ',' + format_real(c.p_value) + ',' +
           format_real(c.simulated_mean) + ',' + format_real(c.direct_mean) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

namespace {

struct WorkItem {
  std::size_t policy;
  std::size_t horizon;
  std::int64_t replicate;
};

void add_simulation_aggregates(const SimulationReport& report, ResultTable& table) {
  auto add = [&](std::string name, double v) { table.aggregates.push_back({std::move(name), "", 0, v}); };
  add("batch_size", static_cast<double>(report.batch_size));
  add("batch_lambda_min", report.batch_lambda_min);
  add("theoretical_batch_size", static_cast<double>(report.theoretical_batch_size));
  std::size_t rejections = 0;
  double max_w = 0.0;
  double max_rec = 0.0;
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& c = report.checks[i];
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "target_%02zu.", i + 1);
    add(std::string(prefix) + "x_norm", c.target_norm);
    add(std::string(prefix) + "w_norm", c.w_norm);
    add(std::string(prefix) + "reconstruction_error", c.reconstruction_error);
    add(std::string(prefix) + "ks_statistic", c.ks_statistic);
    add(std::string(prefix) + "p_value", c.p_value);
    if (c.p_value < 0.01) ++rejections;
    max_w = std::max(max_w, c.w_norm);
    max_rec = std::max(max_rec, c.reconstruction_error);
  }
  add("ks_rejections_alpha_0.01", static_cast<double>(rejections));
  add("max_w_norm", max_w);
  add("max_reconstruction_error", max_rec);
}

void add_regret_aggregates(const ExperimentConfig& cfg, const std::vector<WorkItem>& items,
                           const std::vector<ReplicateOutcome>& outcomes, ResultTable& table) {
  Rng boot_rng = make_stream(cfg.master_seed, StreamPurpose::Bootstrap);
  auto add = [&](std::string name, const std::string& policy, std::int64_t t, double v) {
    table.aggregates.push_back({std::move(name), policy, t, v});
  };
  auto mean_se = [](const std::vector<double>& v) -> MeanStderr {
    if (v.size() >= 2) return bayesian_regret(v);
    return {v.empty() ? 0.0 : v.front(), std::numeric_limits<double>::quiet_NaN()};
  };

  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    const std::string label = cfg.policies[p].label();
    std::vector<std::vector<double>> totals(cfg.horizons.size());
    std::vector<std::vector<double>> minority(cfg.horizons.size());
    std::vector<double> mean_totals(cfg.horizons.size());
    std::vector<double> mean_minority(cfg.horizons.size());

    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      const std::int64_t horizon = cfg.horizons[h];
      std::vector<double> pred;
      std::vector<double> restricted;
      std::vector<double> excess;
      std::vector<double> bound_holds;
      std::vector<double> slopes;
      std::vector<std::vector<double>> gaps(cfg.gap_checkpoints.size());
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].policy != p || items[i].horizon != h) continue;
        const auto& o = outcomes[i];
        totals[h].push_back(o.regret_total);
        minority[h].push_back(o.regret_minority);
        pred.push_back(o.regret_prediction);
        restricted.push_back(o.regret_restricted);
        excess.push_back(o.regret_total - o.regret_prediction);
        bound_holds.push_back(o.eig_bound_holds ? 1.0 : 0.0);
        slopes.push_back(o.eig_slope);
        for (std::size_t g = 0; g < o.scaled_estimator_gaps.size() && g < gaps.size(); ++g) {
          if (std::isfinite(o.scaled_estimator_gaps[g])) gaps[g].push_back(o.scaled_estimator_gaps[g]);
        }
      }
      const auto tot = mean_se(totals[h]);
      const auto min = mean_se(minority[h]);
      const auto prd = mean_se(pred);
      const auto exc = mean_se(excess);
      mean_totals[h] = tot.mean;
      mean_minority[h] = min.mean;
      add("mean_regret_total", label, horizon, tot.mean);
      add("se_regret_total", label, horizon, tot.std_error);
      add("mean_regret_minority", label, horizon, min.mean);
      add("se_regret_minority", label, horizon, min.std_error);
      add("mean_regret_prediction", label, horizon, prd.mean);
      add("se_regret_prediction", label, horizon, prd.std_error);
      add("mean_regret_excess_over_prediction", label, horizon, exc.mean);
      add("se_regret_excess_over_prediction", label, horizon, exc.std_error);
      add("mean_regret_restricted", label, horizon, mean_se(restricted).mean);

      if (cfg.experiment == ExperimentKind::EigGrowth) {
        const double n = static_cast<double>(bound_holds.size());
        double holds = 0.0;
        double positive = 0.0;
        for (double b : bound_holds) holds += b;
        for (double s : slopes) positive += s > 0.0 ? 1.0 : 0.0;
        add("eig_bound_coefficient", label, horizon,
            cfg.rho * cfg.rho / (32.0 * std::log(static_cast<double>(horizon))));
        add("eig_bound_fraction", label, horizon, holds / n);
        add("eig_positive_slope_fraction", label, horizon, positive / n);
        add("eig_min_slope", label, horizon, *std::min_element(slopes.begin(), slopes.end()));
        for (std::size_t g = 0; g < gaps.size(); ++g) {
          if (gaps[g].empty()) continue;
          add("median_scaled_estimator_gap@" + std::to_string(cfg.gap_checkpoints[g]), label, horizon,
              median(gaps[g]));
        }
      }
    }

    if (cfg.horizons.size() >= 3) {
      std::vector<double> hs(cfg.horizons.begin(), cfg.horizons.end());
      auto fit = [&](const char* name, const std::vector<double>& means,
                     const std::vector<std::vector<double>>& reps) {
        if (!std::all_of(means.begin(), means.end(), [](double m) { return m > 0.0; })) return;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t h = 0; h < hs.size(); ++h) pts.emplace_back(hs[h], means[h]);
        add(std::string("exponent_") + name, label, 0, scaling_exponent(pts).exponent);
        const auto ci = bootstrap_exponent(hs, reps, cfg.bootstrap, boot_rng);
        add(std::string("exponent_") + name + "_ci_lower", label, 0, ci.lower);
        add(std::string("exponent_") + name + "_ci_upper", label, 0, ci.upper);
      };
      fit("regret_total", mean_totals, totals);
      fit("regret_minority", mean_minority, minority);
    }
  }

  if (is_two_bridge(cfg.experiment)) {
    for (auto horizon : cfg.horizons) {
      const double root = std::sqrt(static_cast<double>(horizon));
      add("epsilon", "", horizon, 1.0 / root);
      add("max_attainable_minority_regret", "", horizon, root / 400.0);
      if (cfg.experiment == ExperimentKind::TwoBridgeImpossibility) {
        add("lower_bound_floor", "", horizon, root * std::exp(-3.5) / 12800.0);
      }
    }
  } else if (cfg.experiment != ExperimentKind::EigGrowth) {
    add("theoretical_batch_size", "", 0,
        static_cast<double>(suggested_batch_size(cfg.rho, cfg.dim, cfg.actions, cfg.max_horizon(), 0.05)));
  }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table;
  table.experiment = std::string(to_string(cfg.experiment));

  if (cfg.experiment == ExperimentKind::SimulationVerify) {
    add_simulation_aggregates(verify_simulation(cfg), table);
    return table;
  }

  std::optional<PerturbedConfig> instance;
  if (!is_two_bridge(cfg.experiment)) instance = build_perturbed_instance(cfg);

  std::vector<WorkItem> items;
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      for (std::int64_t r = 0; r < cfg.replicates; ++r) items.push_back({p, h, r});
    }
  }

  std::vector<ReplicateOutcome> outcomes(items.size());
  std::vector<std::string> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      const auto& it = items[i];
      try {
        outcomes[i] = run_replicate(cfg, instance ? &*instance : nullptr, cfg.policies[it.policy],
                                    cfg.horizons[it.horizon], it.replicate);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        next.store(items.size());  // abort remaining work
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, cfg.workers), items.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (errors[i].empty()) continue;
    const auto& it = items[i];
    throw Error("replicate failed: policy=" + cfg.policies[it.policy].label() +
                " T=" + std::to_string(cfg.horizons[it.horizon]) +
                " replicate=" + std::to_string(it.replicate) + " seed=" +
                std::to_string(replicate_seed(cfg.master_seed, static_cast<std::uint64_t>(it.replicate))) +
                ": " + errors[i]);
  }

  table.rows.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const auto& o = outcomes[i];
    ResultRow row;
    row.experiment = table.experiment;
    row.policy = cfg.policies[it.policy].label();
    row.horizon = cfg.horizons[it.horizon];
    row.replicate = it.replicate;
    row.seed = o.seed;
    row.regret_total = o.regret_total;
    row.regret_minority = o.regret_minority;
    row.regret_prediction = o.regret_prediction;
    row.theta_draw_id = o.theta_draw_id;
    table.rows.push_back(std::move(row));
    if (cfg.curves) table.curves.insert(table.curves.end(), o.curve.begin(), o.curve.end());
  }
  sort_rows(table.rows);
  std::stable_sort(table.curves.begin(), table.curves.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return std::tie(a.policy, a.horizon, a.replicate, a.t) < std::tie(b.policy, b.horizon, b.replicate, b.t);
  });
  add_regret_aggregates(cfg, items, outcomes, table);
  return table;
}

}  // namespace linbandit
