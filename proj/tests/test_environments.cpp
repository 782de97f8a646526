#include "linbandit/environments.hpp"
#include "linbandit/statistics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace linbandit;

namespace {

PerturbedConfig single_entry_config(double rho) {
  PerturbedConfig cfg;
  MeanTuple t;
  Vector a(2);
  a << 0.3, -0.2;
  Vector b(2);
  b << -0.5, 0.1;
  t.means = {a, b};
  cfg.catalog = {t};
  cfg.rho = rho;
  return cfg;
}

}  // namespace

TEST_SUITE("environments") {

TEST_CASE("two-bridge B-round frequency") {
  TwoBridgeConfig cfg;
  Rng rng(42);
  constexpr int kDraws = 1000000;
  int b_rounds = 0;
  ContextRound r;
  for (int t = 1; t <= kDraws; ++t) {
    sample_two_bridge_round(cfg, rng, t, r);
    if (r.kind == RoundKind::B) ++b_rounds;
  }
  const double p = 0.0025;
  const double sigma = std::sqrt(p * (1 - p) / kDraws);
  CHECK(std::abs(b_rounds / double(kDraws) - p) < 4 * sigma);
}

TEST_CASE("two-bridge sampling is deterministic per seed") {
  TwoBridgeConfig cfg;
  Rng a(7);
  Rng b(7);
  for (int t = 1; t <= 1000; ++t) {
    const auto ra = sample_two_bridge_round(cfg, a, t);
    const auto rb = sample_two_bridge_round(cfg, b, t);
    REQUIRE(ra.kind == rb.kind);
    REQUIRE(ra.group == rb.group);
    for (std::size_t s = 0; s < 2; ++s) {
      REQUIRE(ra.slot(s) == rb.slot(s));
    }
  }
}

TEST_CASE("two-bridge round structure") {
  TwoBridgeConfig cfg;
  cfg.p_majority = 0.5;
  Rng rng(3);
  int c_rounds = 0;
  for (int t = 1; t <= 20000; ++t) {
    const auto r = sample_two_bridge_round(cfg, rng, t);
    REQUIRE_NOTHROW(r.validate());
    switch (*r.kind) {
      case RoundKind::A:
        CHECK(r.group == Group::Majority);
        CHECK(r.num_available() == 2);
        break;
      case RoundKind::B:
        CHECK(r.group == Group::Minority);
        CHECK(*r.slot(0) == Vector::Unit(2, 0));
        CHECK(*r.slot(1) == Vector::Unit(2, 1));
        break;
      case RoundKind::C:
        ++c_rounds;
        CHECK(r.group == Group::Minority);
        REQUIRE(r.num_available() == 1);
        CHECK(*r.slot(1) == Vector::Unit(2, 1));
        break;
    }
  }
  CHECK(c_rounds > 0);
}

TEST_CASE("two-bridge thetas") {
  TwoBridgeConfig cfg;
  cfg.horizon = 100;
  CHECK(cfg.epsilon() == doctest::Approx(0.1));
  CHECK(cfg.theta_for(ThetaVariant::Theta0)(0) == 0.5);
  CHECK(cfg.theta_for(ThetaVariant::Theta0)(1) == doctest::Approx(0.4));
  CHECK(cfg.theta_for(ThetaVariant::Theta1)(0) == doctest::Approx(0.4));
  CHECK(cfg.theta_for(ThetaVariant::Theta1)(1) == 0.5);
}

TEST_CASE("zero perturbation returns the means") {
  const auto cfg = single_entry_config(0.0);
  Rng rng(1);
  const auto r = sample_perturbed_round(cfg, rng);
  CHECK(*r.slot(0) == *cfg.catalog[0].means[0]);
  CHECK(*r.slot(1) == *cfg.catalog[0].means[1]);
}

TEST_CASE("perturbation variance and independence") {
  constexpr double rho = 0.2;
  PerturbedGenerator gen(single_entry_config(rho));
  Rng ctx(11);
  Rng per(12);
  constexpr int n = 100000;
  std::vector<double> a0(n);
  std::vector<double> a1(n);
  std::vector<double> b0(n);
  ContextRound r;
  for (int i = 0; i < n; ++i) {
    gen.sample(ctx, per, r);
    const Matrix& noise = gen.last_perturbation();
    REQUIRE((r.context(0) - *gen.config().catalog[0].means[0]).isApprox(noise.col(0)));
    a0[i] = noise(0, 0);
    a1[i] = noise(1, 0);
    b0[i] = noise(0, 1);
  }
  CHECK(std::abs(moments(a0).variance / (rho * rho) - 1.0) < 0.05);
  CHECK(std::abs(moments(a1).variance / (rho * rho) - 1.0) < 0.05);
  CHECK(std::abs(moments(b0).variance / (rho * rho) - 1.0) < 0.05);

  // Sample correlation between action 1 and action 2 coordinates: se ~ 1/sqrt(n).
  double cross = 0.0;
  for (int i = 0; i < n; ++i) cross += a0[i] * b0[i];
  const double corr = cross / n / (rho * rho);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("group-tagged catalog respects the minority probability") {
  Rng rng(5);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, 3, 10, rng, true);
  cfg.minority_probability = 0.3;
  cfg.rho = 0.1;
  PerturbedGenerator gen(cfg);
  ContextRound r;
  int minority = 0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    gen.sample(rng, rng, r);
    if (r.group == Group::Minority) ++minority;
    REQUIRE(cfg.catalog[gen.last_entry()].group == r.group);
  }
  CHECK(std::abs(minority / double(n) - 0.3) < 4 * std::sqrt(0.21 / n));
}

TEST_CASE("catalog validation") {
  auto cfg = single_entry_config(0.1);
  CHECK_NOTHROW(cfg.validate());
  cfg.rho = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ModelError);
  cfg = single_entry_config(0.1);
  cfg.catalog[0].means[0] = Vector::Constant(2, 1.0);
  CHECK_THROWS_AS(cfg.validate(), ModelError);
}

TEST_CASE("prior draws: diagonal covariance mean") {
  LatentModel m;
  m.prior_mean = Vector(3);
  m.prior_mean << 1.0, -2.0, 0.5;
  const double kappa = 0.7;
  m.prior_cov = kappa * kappa * Matrix::Identity(3, 3);
  Rng rng(99);
  constexpr int n = 100000;
  Vector sum = Vector::Zero(3);
  for (int i = 0; i < n; ++i) sum += draw_theta(m, rng);
  const Vector mean = sum / n;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean(i) - m.prior_mean(i)) < 3 * kappa / std::sqrt(double(n)));
  }
}

TEST_CASE("prior draws: identity covariance") {
  LatentModel m;
  m.prior_mean = Vector::Zero(2);
  m.prior_cov = Matrix::Identity(2, 2);
  Rng rng(100);
  constexpr int n = 100000;
  Matrix acc = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector th = draw_theta(m, rng);
    acc += th * th.transpose();
  }
  acc /= n;
  CHECK(std::abs(acc(0, 0) - 1) < 0.05);
  CHECK(std::abs(acc(1, 1) - 1) < 0.05);
  CHECK(std::abs(acc(0, 1)) < 0.05);
}

TEST_CASE("prior draws reject a singular covariance") {
  LatentModel m;
  m.prior_mean = Vector::Zero(2);
  m.prior_cov = Matrix::Zero(2, 2);
  m.prior_cov(0, 0) = 1.0;
  Rng rng(1);
  CHECK_THROWS_AS(draw_theta(m, rng), ModelError);
}

TEST_CASE("reward realization") {
  Rng rng(17);
  Vector theta(2);
  theta << 1.0, 0.0;
  const Vector top = Vector::Unit(2, 0);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(realize_reward(theta, top, NoiseModel::Bernoulli, rng) == 1.0);
  }

  theta << 0.4, -1.3;
  Vector x(2);
  x << 0.8, 0.5;
  constexpr int n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = realize_reward(theta, x, NoiseModel::GaussianUnit, rng);
  const auto mom = moments(draws);
  CHECK(std::abs(mom.mean - theta.dot(x)) < 3 / std::sqrt(double(n)));
  CHECK(std::abs(mom.variance - 1.0) < 0.05);

  TwoBridgeConfig tb;
  tb.horizon = 10000;
  const Vector th0 = tb.theta_for(ThetaVariant::Theta0);
  for (auto& d : draws) d = realize_reward(th0, top, NoiseModel::Bernoulli, rng);
  const double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(moments(draws).mean - 0.5) < 3 * sigma);

  theta << 2.0, 0.0;
  CHECK_THROWS_AS(realize_reward(theta, top, NoiseModel::Bernoulli, rng), ModelError);
}

TEST_CASE("context radius") {
  const double delta = 1.0 / (1000.0 * 1000.0);
  CHECK(perturbation_bound(0.1, 1000, 5, 2, delta) == doctest::Approx(0.6887524680246221).epsilon(1e-12));
  CHECK(context_radius(0.1, 1000, 5, 2) == doctest::Approx(1.9740430813983623).epsilon(1e-12));
}

TEST_CASE("two-bridge C-round count") {
  // C_t >= 0.9 t for every t >= 760 ln(T / delta) minority rounds, in at
  // least 1 - delta of the replicates.
  TwoBridgeConfig cfg;
  cfg.horizon = 10000;
  const double delta = 0.05;
  const auto start = static_cast<std::int64_t>(std::ceil(760.0 * std::log(cfg.horizon / delta)));
  constexpr int kReplicates = 500;
  int holds = 0;
  std::int64_t total_minority = 0;
  std::int64_t total_c = 0;
  ContextRound r;
  for (int rep = 0; rep < kReplicates; ++rep) {
    Rng rng(1000 + static_cast<std::uint64_t>(rep));
    std::int64_t minority = 0;
    std::int64_t c_rounds = 0;
    bool ok = true;
    for (std::int64_t t = 1; minority < start + 2000; ++t) {
      sample_two_bridge_round(cfg, rng, t, r);
      if (r.group != Group::Minority) continue;
      ++minority;
      if (r.kind == RoundKind::C) ++c_rounds;
      if (minority >= start && c_rounds < 0.9 * minority) ok = false;
    }
    holds += ok ? 1 : 0;
    total_minority += minority;
    total_c += c_rounds;
  }
  CHECK(holds >= (1.0 - delta) * kReplicates);
  CHECK(std::abs(double(total_c) / total_minority - 0.95) < 0.002);
}

TEST_CASE("perturbations stay under their high-probability bound") {
  constexpr std::int64_t horizon = 1000;
  constexpr std::size_t k = 5;
  constexpr double rho = 0.3;
  Rng inst(4);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, k, 20, inst);
  cfg.rho = rho;
  const double delta_r = 1.0 / (double(horizon) * horizon);
  const double bound = perturbation_bound(rho, horizon, k, 2, delta_r);
  PerturbedGenerator gen(cfg);
  ContextRound r;
  int exceeded = 0;
  constexpr int kReplicates = 200;
  for (int rep = 0; rep < kReplicates; ++rep) {
    Rng ctx(static_cast<std::uint64_t>(rep));
    Rng per(static_cast<std::uint64_t>(rep) + 5000);
    double worst = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      gen.sample(ctx, per, r);
      worst = std::max(worst, gen.last_perturbation().cwiseAbs().maxCoeff());
    }
    if (worst > bound) ++exceeded;
  }
  CHECK(exceeded / double(kReplicates) <= delta_r);
}

TEST_CASE("perturbed sampling is a pure function of the seeds") {
  Rng inst(8);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(3, 4, 12, inst, true);
  cfg.minority_probability = 0.25;
  cfg.rho = 0.2;
  PerturbedGenerator a(cfg);
  PerturbedGenerator b(cfg);
  Rng ca(1);
  Rng pa(2);
  Rng cb(1);
  Rng pb(2);
  ContextRound ra;
  ContextRound rb;
  for (int t = 1; t <= 2000; ++t) {
    ra.round_index = rb.round_index = t;
    a.sample(ca, pa, ra);
    b.sample(cb, pb, rb);
    REQUIRE(ra.group == rb.group);
    for (std::size_t s = 0; s < 4; ++s) REQUIRE(ra.slot(s) == rb.slot(s));
  }
}

}  // TEST_SUITE
