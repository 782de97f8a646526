#include "linbandit/simulation.hpp"

#include "linbandit/estimators.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

namespace linbandit {

namespace {
constexpr double kResidualGuard = 1e-12;
}

SimulationWeights simulation_weights(const Eigen::Ref<const RowMatrix>& batch_contexts,
                                     const Eigen::Ref<const Vector>& x) {
  if (batch_contexts.cols() != x.size()) throw DimensionError("simulation_weights: dimension mismatch");
  const Matrix z = batch_contexts.transpose() * batch_contexts;
  if (z.rows() == 0 || min_eigenvalue(z) <= 1e-10) {
    throw InsufficientDiversityError("batch covariance is singular");
  }
  Eigen::LLT<Matrix> llt(z);
  if (llt.info() != Eigen::Success) throw InsufficientDiversityError("batch covariance is singular");

  SimulationWeights out;
  out.w = batch_contexts * llt.solve(x);
  const Vector back = batch_contexts.transpose() * out.w;
  if ((back - x).norm() > 1e-8 * std::max(1.0, x.norm())) {
    throw Error("simulation weights fail to reproduce the target context");
  }
  double residual = 1.0 - out.w.squaredNorm();
  if (residual < 0.0 && residual >= -kResidualGuard) residual = 0.0;
  out.residual_var = residual;
  return out;
}

double simulate_reward(const SimulationWeights& weights, const Eigen::Ref<const Vector>& batch_rewards,
                       Rng& rng) {
  if (batch_rewards.size() != weights.w.size()) {
    throw DimensionError("simulate_reward: reward vector length mismatch");
  }
  double var = weights.residual_var;
  if (var < -kResidualGuard) {
    throw RadiusViolation("target context lies outside the simulation radius of the batch");
  }
  var = std::max(var, 0.0);
  const double base = weights.w.dot(batch_rewards);
  if (var == 0.0) return base;
  std::normal_distribution<double> gauss(0.0, std::sqrt(var));
  return base + gauss(rng);
}

}  // namespace linbandit
