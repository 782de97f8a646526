#include "linbandit/environments.hpp"
#include "linbandit/metrics.hpp"
#include "linbandit/policies.hpp"
#include "linbandit/statistics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace linbandit;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ContextRound b_round() {
  ContextRound r(2, 2);
  r.group = Group::Minority;
  r.kind = RoundKind::B;
  r.set(0, Vector::Unit(2, 0));
  r.set(1, Vector::Unit(2, 1));
  return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("instantaneous regret") {
  TwoBridgeConfig cfg;
  cfg.horizon = 100;
  const Vector th = cfg.theta_for(ThetaVariant::Theta0);
  CHECK(instantaneous_regret(th, b_round(), 0) == 0.0);
  CHECK(instantaneous_regret(th, b_round(), 1) == doctest::Approx(0.1));
  ContextRound r(2, 2);
  r.set(1, Vector::Unit(2, 1));
  CHECK_THROWS_AS(instantaneous_regret(th, r, 0), InvalidActionError);
}

TEST_CASE("instantaneous regret matches brute force on perturbed rounds") {
  Rng rng(12);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, 5, 20, rng);
  cfg.rho = 0.1;
  PerturbedGenerator gen(cfg);
  std::normal_distribution<double> g(0.0, 1.0);
  ContextRound r;
  for (int i = 0; i < 1000; ++i) {
    gen.sample(rng, rng, r);
    const Vector th = vec({g(rng), g(rng)});
    double best = -1e300;
    for (std::size_t a = 0; a < 5; ++a) best = std::max(best, r.context(a).dot(th));
    for (std::size_t a = 0; a < 5; ++a) {
      REQUIRE(instantaneous_regret(th, r, a) == doctest::Approx(best - r.context(a).dot(th)));
    }
  }
}

TEST_CASE("cumulative regret restrictions") {
  RegretLedger empty;
  CHECK(cumulative_regret(empty) == 0.0);

  RegretLedger zeros;
  for (int t = 1; t <= 10; ++t) zeros.append({t, 0.0, 0.0, Group::Majority, false});
  CHECK(cumulative_regret(zeros) == 0.0);

  RegretLedger ledger;
  for (int t = 1; t <= 5; ++t) ledger.append({t, 0.1, 0.1, Group::Minority, t % 2 == 0});
  for (int t = 6; t <= 9; ++t) ledger.append({t, 0.3, 0.0, Group::Majority, true});
  CHECK(cumulative_regret(ledger, Restriction::MinorityOnly) == doctest::Approx(0.5));
  CHECK(cumulative_regret(ledger, Restriction::MinorityOnly) +
            cumulative_regret(ledger, Restriction::MajorityOnly) ==
        doctest::Approx(cumulative_regret(ledger, Restriction::All)));
  CHECK(cumulative_regret(ledger, Restriction::CustomSet) == doctest::Approx(0.2 + 1.2));

  CHECK_THROWS(ledger.append({10, -0.1, 0.0, Group::Majority, false}));
}

TEST_CASE("prediction regret") {
  RegretLedger same;
  for (int t = 1; t <= 5; ++t) same.append({t, 0.2 * t, 0.2 * t, Group::Majority, false});
  CHECK(prediction_regret(same) == doctest::Approx(cumulative_regret(same)));

  RegretLedger oracle;
  for (int t = 1; t <= 5; ++t) oracle.append({t, 0.4, 0.0, Group::Majority, false});
  CHECK(prediction_regret(oracle) == 0.0);

  RegretLedger missing;
  missing.append({1, 0.4, std::nullopt, Group::Majority, false});
  CHECK_THROWS_AS(prediction_regret(missing), Error);
}

TEST_CASE("BatchBayesGreedy prediction regret equals its regret") {
  Rng rng(5);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, 4, 10, rng);
  cfg.rho = 0.2;
  PolicyContext ctx;
  ctx.theta = vec({1.2, -0.3});
  ctx.prior_mean = vec({1.0, 0.0});
  ctx.prior_cov = Matrix::Identity(2, 2);
  PolicyState st(PolicyKind::batch_bayes_greedy(20), 2, ctx, Rng(6));
  PerturbedGenerator gen(cfg);
  std::normal_distribution<double> g(0.0, 1.0);
  RegretLedger ledger;
  ContextRound r;
  for (int t = 1; t <= 500; ++t) {
    gen.sample(rng, rng, r);
    const auto d = st.step(r);
    ledger.append({t, instantaneous_regret(ctx.theta, r, d.action),
                   instantaneous_regret(ctx.theta, r, d.prediction), r.group, false});
    const auto x = r.context(d.action);
    st.observe(x, ctx.theta.dot(x) + g(rng));
  }
  CHECK(prediction_regret(ledger) == cumulative_regret(ledger));
}

TEST_CASE("gap") {
  TwoBridgeConfig cfg;
  cfg.horizon = 400;
  CHECK(gap(cfg.theta_for(ThetaVariant::Theta0), b_round()) == doctest::Approx(0.05));
  ContextRound same(2, 2);
  same.set(0, vec({0.5, 0.5}));
  same.set(1, vec({0.5, 0.5}));
  CHECK(gap(vec({1, 2}), same) == 0.0);
  ContextRound single(2, 2);
  single.set(0, vec({0.5, 0.5}));
  CHECK(std::isinf(gap(vec({1, 2}), single)));
}

TEST_CASE("small-gap frequency is bounded on perturbed instances") {
  Rng rng(21);
  constexpr std::size_t k = 4;
  constexpr double rho = 0.1;
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, k, 30, rng);
  cfg.rho = rho;
  PerturbedGenerator gen(cfg);
  const Vector theta = vec({1.5, -0.8});
  ContextRound r;
  constexpr int n = 100000;
  for (double gamma : {0.001, 0.005, 0.02}) {
    int small = 0;
    for (int i = 0; i < n; ++i) {
      gen.sample(rng, rng, r);
      if (gap(theta, r) <= gamma) ++small;
    }
    const double p = small / double(n);
    const double bound = (k * k / 2.0) * gamma / (rho * theta.norm() * std::sqrt(M_PI));
    CHECK(p <= bound + 3 * std::sqrt(std::max(p, 1.0 / n) * (1 - p) / n));
  }
}

TEST_CASE("Bayesian regret mean and standard error") {
  std::vector<double> same(7, 2.5);
  auto m = bayesian_regret(same);
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == 0.0);

  std::vector<double> two{0.0, 2.0};
  m = bayesian_regret(two);
  CHECK(m.mean == 1.0);
  CHECK(m.std_error == doctest::Approx(1.0));

  Rng rng(13);
  std::normal_distribution<double> g(5.0, 1.0);
  std::vector<double> draws(10000);
  for (auto& d : draws) d = g(rng);
  m = bayesian_regret(draws);
  CHECK(std::abs(m.mean - 5.0) < 0.03);

  std::vector<double> one{1.0};
  CHECK_THROWS(bayesian_regret(one));
}

TEST_CASE("scaling exponent") {
  std::vector<std::pair<double, double>> pts;
  for (double t : {1e2, 1e3, 1e4}) pts.emplace_back(t, 3.0 * std::sqrt(t));
  const auto fit = scaling_exponent(pts);
  CHECK(std::abs(fit.exponent - 0.5) < 1e-9);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));

  pts.clear();
  for (double t : {1e2, 1e3, 1e4}) pts.emplace_back(t, 7.0);
  CHECK(std::abs(scaling_exponent(pts).exponent) < 1e-12);

  pts.clear();
  for (double t : {1e3, 1e4, 1e5}) pts.emplace_back(t, std::cbrt(t) * std::log(t));
  const double e = scaling_exponent(pts).exponent;
  CHECK(e == doctest::Approx(0.4442577081415117).epsilon(1e-12));
  CHECK(e >= 0.33);
  CHECK(e <= 0.45);

  pts = {{1e2, 1.0}, {1e3, 2.0}};
  CHECK_THROWS(scaling_exponent(pts));
  pts = {{1e2, 1.0}, {1e3, 0.0}, {1e4, 3.0}};
  CHECK_THROWS(scaling_exponent(pts));
}

TEST_CASE("bootstrap exponent interval brackets the point fit") {
  Rng rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<double> hs{1e3, 1e4, 1e5};
  std::vector<std::vector<double>> reps(3);
  for (std::size_t h = 0; h < 3; ++h) {
    for (int r = 0; r < 200; ++r) reps[h].push_back(std::sqrt(hs[h]) * std::exp(0.2 * g(rng)));
  }
  Rng boot(4);
  const auto ci = bootstrap_exponent(hs, reps, 500, boot);
  CHECK(ci.lower < 0.5);
  CHECK(ci.upper > 0.5);
  CHECK(ci.upper - ci.lower < 0.05);
}

TEST_CASE("ledger totals match regret recomputed from raw logs") {
  Rng rng(81);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, 4, 10, rng, true);
  cfg.minority_probability = 0.3;
  cfg.rho = 0.2;
  PerturbedGenerator gen(cfg);
  PolicyContext ctx;
  ctx.theta = vec({0.9, 0.4});
  for (auto kind : {PolicyKind::uniform_random(), PolicyKind::oracle()}) {
    PolicyState st(kind, 2, ctx, Rng(2));
    RegretLedger ledger;
    std::vector<ContextRound> rounds;
    std::vector<std::size_t> actions;
    ContextRound r;
    for (int t = 1; t <= 3000; ++t) {
      gen.sample(rng, rng, r);
      const auto d = st.step(r);
      ledger.append({t, instantaneous_regret(ctx.theta, r, d.action), std::nullopt, r.group, t % 3 == 0});
      rounds.push_back(r);
      actions.push_back(d.action);
      st.observe(r.context(d.action), 0.0);
    }
    double raw = 0.0;
    for (std::size_t i = 0; i < rounds.size(); ++i) {
      double best = -1e300;
      for (std::size_t a = 0; a < 4; ++a) best = std::max(best, rounds[i].context(a).dot(ctx.theta));
      raw += best - rounds[i].context(actions[i]).dot(ctx.theta);
    }
    CHECK(cumulative_regret(ledger) == doctest::Approx(raw).epsilon(1e-12));
    CHECK(cumulative_regret(ledger, Restriction::MinorityOnly) +
              cumulative_regret(ledger, Restriction::MajorityOnly) ==
          doctest::Approx(cumulative_regret(ledger)).epsilon(1e-12));
    for (const auto& rec : ledger.records()) REQUIRE(rec.regret >= 0.0);
    if (kind.type == PolicyType::Oracle) CHECK(cumulative_regret(ledger) == 0.0);
  }
}

}  // TEST_SUITE

TEST_SUITE("statistics") {

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-10));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(10.0) < 1e-80);
}

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a{0.1, 0.4, 0.7, 1.3, 2.2};
  const std::vector<double> b{0.3, 0.5, 0.9, 1.0, 1.8, 2.5, 3.0};
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(0.3142857142857143).epsilon(1e-14));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
}

TEST_CASE("median, moments, slope") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  const auto m = moments(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  CHECK(ols_slope(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(2.0));
}

}  // TEST_SUITE
