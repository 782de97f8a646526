#include "linbandit/environments.hpp"
#include "linbandit/estimators.hpp"
#include "linbandit/policies.hpp"
#include "linbandit/simulation.hpp"
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

}  // namespace

TEST_SUITE("simulation_lemma") {

TEST_CASE("simulation weights") {
  const RowMatrix id = RowMatrix::Identity(2, 2);
  auto w = simulation_weights(id, vec({1, 0}));
  CHECK(w.w.isApprox(vec({1, 0})));
  CHECK(w.residual_var == doctest::Approx(0.0));

  w = simulation_weights(id, vec({0.6, 0.8}));
  CHECK(w.w.isApprox(vec({0.6, 0.8})));
  CHECK(std::abs(w.residual_var) < 1e-15);

  RowMatrix two(2, 2);
  two << 2, 0, 0, 2;
  w = simulation_weights(two, vec({1, 0}));
  CHECK(w.w.isApprox(vec({0.5, 0})));
  CHECK(w.residual_var == doctest::Approx(0.75));
}

TEST_CASE("simulation weights reject degenerate batches") {
  RowMatrix flat(3, 2);
  flat << 1, 0, 2, 0, -1, 0;
  CHECK_THROWS_AS(simulation_weights(flat, vec({1, 0})), InsufficientDiversityError);
  CHECK_THROWS_AS(simulation_weights(RowMatrix::Identity(2, 2), vec({1, 0, 0})), DimensionError);
}

TEST_CASE("simulated reward with zero residual returns the batch reward") {
  Rng rng(1);
  const auto w = simulation_weights(RowMatrix::Identity(2, 2), vec({1, 0}));
  CHECK(simulate_reward(w, vec({0.37, -2.0}), rng) == doctest::Approx(0.37));
}

TEST_CASE("radius violation") {
  Rng rng(1);
  const auto w = simulation_weights(RowMatrix::Identity(2, 2), vec({2, 0}));
  CHECK(w.residual_var < 0.0);
  CHECK_THROWS_AS(simulate_reward(w, vec({0.0, 0.0}), rng), RadiusViolation);
}

TEST_CASE("simulated rewards match direct draws in distribution") {
  Rng rng(55);
  std::normal_distribution<double> g(0.0, 1.0);
  constexpr int rows = 40;
  RowMatrix xb(rows, 3);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < 3; ++j) xb(i, j) = g(rng);
  }
  const Vector theta = vec({0.8, -1.1, 0.4});
  const double lmin = (xb.transpose() * xb).selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
  const Vector x = vec({1, 1, -1}).normalized() * std::sqrt(lmin) * 0.9;
  const auto w = simulation_weights(xb, x);
  CHECK(w.w.norm() <= 1.0);

  constexpr int n = 100000;
  std::vector<double> simulated(n);
  std::vector<double> direct(n);
  const Vector means = xb * theta;
  Vector rb(rows);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < rows; ++j) rb(j) = means(j) + g(rng);
    simulated[s] = simulate_reward(w, rb, rng);
    direct[s] = theta.dot(x) + g(rng);
  }
  const auto ks = ks_two_sample(simulated, direct);
  CHECK(ks.p_value > 0.01);
  CHECK(std::abs(moments(simulated).mean - theta.dot(x)) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("weight norm equals the Z_B^-1 norm of x") {
  Rng rng(61);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    RowMatrix xb(12, 3);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 3; ++j) xb(i, j) = g(rng);
    }
    const Vector x = vec({g(rng), g(rng), g(rng)});
    const Matrix z = xb.transpose() * xb;
    const double expected = x.dot(z.ldlt().solve(x));
    const auto w = simulation_weights(xb, x);
    REQUIRE(std::abs(w.w.squaredNorm() - expected) <= 1e-9 * std::max(1.0, expected));
  }
}

TEST_CASE("residual variance is nonnegative inside the radius") {
  Rng rng(62);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    RowMatrix xb(30, 2);
    for (int i = 0; i < 30; ++i) xb.row(i) << g(rng), g(rng);
    const double lmin = min_eigenvalue(xb.transpose() * xb);
    Vector x = vec({g(rng), g(rng)}).normalized() * std::sqrt(lmin) * std::sqrt(u(rng));
    if (trial % 10 == 0) x = x.normalized() * std::sqrt(lmin);  // on the boundary
    REQUIRE(simulation_weights(xb, x).residual_var >= 0.0);
  }
}

TEST_CASE("batch-greedy batches reach the diversity radius") {
  // lambda_min(Z_B) >= R^2 for at least 95% of full batches.
  constexpr std::int64_t horizon = 20000;
  constexpr std::int64_t batch = 200;
  constexpr double rho = 0.1;
  Rng inst(63);
  PerturbedConfig cfg;
  cfg.catalog = make_random_catalog(2, 5, 50, inst);
  cfg.rho = rho;
  cfg.model.prior_mean = vec({4.0, 3.0});
  cfg.model.prior_cov = Matrix::Identity(2, 2);
  const double r2 = std::pow(context_radius(rho, horizon, 5, 2), 2);
  int batches = 0;
  int diverse = 0;
  for (int rep = 0; rep < 10; ++rep) {
    Rng rng(700 + static_cast<std::uint64_t>(rep));
    PolicyContext ctx;
    ctx.theta = draw_theta(cfg.model, rng);
    ctx.prior_mean = cfg.model.prior_mean;
    ctx.prior_cov = cfg.model.prior_cov;
    PolicyState st(PolicyKind::batch_bayes_greedy(batch), 2, ctx, Rng(rng()));
    PerturbedGenerator gen(cfg);
    std::normal_distribution<double> g(0.0, 1.0);
    ContextRound r;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      gen.sample(rng, rng, r);
      const auto x = r.context(st.step(r).action);
      st.observe(x, ctx.theta.dot(x) + g(rng));
    }
    for (std::int64_t b = 1; b <= horizon / batch; ++b) {
      const auto slice = st.history().batch_slice(b);
      ++batches;
      if (min_eigenvalue(slice.contexts.transpose() * slice.contexts) >= r2) ++diverse;
    }
  }
  CHECK(diverse >= 0.95 * batches);
}

}  // TEST_SUITE
