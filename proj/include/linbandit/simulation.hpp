// Reward simulation from a diverse batch: a reward for an arbitrary context x
// is synthesized as w'r_B + N(0, 1 - |w|^2) with w = X_B Z_B^-1 x. When
// lambda_min(Z_B) >= |x|^2 the result is distributed as x'theta + N(0,1).
#pragma once

#include "linbandit/rng.hpp"
#include "linbandit/types.hpp"

namespace linbandit {

class InsufficientDiversityError : public Error {
 public:
  using Error::Error;
};

class RadiusViolation : public Error {
 public:
  using Error::Error;
};

struct SimulationWeights {
  Vector w;
  /// 1 - |w|^2; clamped to 0 when within 1e-12 below zero.
  double residual_var = 0.0;
};

/// Throws InsufficientDiversityError when lambda_min(Z_B) <= 1e-10, and Error
/// when the reconstruction X_B' w = x misses by more than 1e-8 relative.
SimulationWeights simulation_weights(const Eigen::Ref<const RowMatrix>& batch_contexts,
                                     const Eigen::Ref<const Vector>& x);

/// Throws RadiusViolation when the residual variance is negative beyond 1e-12.
double simulate_reward(const SimulationWeights& weights, const Eigen::Ref<const Vector>& batch_rewards,
                       Rng& rng);

}  // namespace linbandit
