// Linear-algebra core: empirical covariance, OLS and Gaussian-posterior
// estimates of the latent vector, minimum eigenvalue.
#pragma once

#include "linbandit/types.hpp"

namespace linbandit {

/// Z = sum x x', xr = sum r x, n = number of observations.
class SufficientStats {
 public:
  explicit SufficientStats(Eigen::Index dim);

  /// Recomputes from scratch over history rounds first..last (1-based).
  static SufficientStats from_history(const History& h, std::int64_t first, std::int64_t last);
  static SufficientStats from_history(const History& h) { return from_history(h, 1, h.size()); }

  void update(const Eigen::Ref<const Vector>& x, double reward);

  const Matrix& covariance() const noexcept { return z_; }
  const Vector& response() const noexcept { return xr_; }
  std::int64_t count() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return xr_.size(); }

 private:
  Matrix z_;
  Vector xr_;
  std::int64_t n_ = 0;
};

/// Value-returning form of SufficientStats::update.
SufficientStats update_stats(SufficientStats s, const Eigen::Ref<const Vector>& x, double reward);

/// Relative cutoff below which eigen/singular values count as zero.
inline constexpr double kSingularCutoff = 1e-10;

/// Solves M y = b for symmetric PSD M: Cholesky when M is numerically PD,
/// otherwise the minimum-norm solution from the eigendecomposition.
Vector solve_psd(const Matrix& m, const Vector& b);

/// Moore-Penrose inverse of a symmetric PSD matrix.
Matrix pseudo_inverse_psd(const Matrix& m);

/// argmin ||X theta - r||; minimum-norm when Z is singular.
Vector ols_estimate(const SufficientStats& s);

/// (Z + Sigma^-1)^-1 (xr + Sigma^-1 prior_mean). Exactly prior_mean when n = 0.
Vector bayes_posterior_mean(const SufficientStats& s, const Eigen::Ref<const Vector>& prior_mean,
                            const Matrix& prior_cov);

/// Smallest eigenvalue of a symmetric matrix. Throws Error when M is
/// asymmetric beyond 1e-9 (relative to its largest entry, floor 1).
double min_eigenvalue(const Matrix& m);

double estimate_error(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& estimate);

}  // namespace linbandit
