#include "linbandit/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace linbandit {

SufficientStats::SufficientStats(Eigen::Index dim) {
  if (dim < 1) throw DimensionError("sufficient stats dimension must be >= 1");
  z_.setZero(dim, dim);
  xr_.setZero(dim);
}

SufficientStats SufficientStats::from_history(const History& h, std::int64_t first,
                                              std::int64_t last) {
  SufficientStats s(h.dim());
  if (last < first) return s;
  const auto rows = h.rounds(first, last);
  s.z_.noalias() = rows.contexts.transpose() * rows.contexts;
  s.xr_.noalias() = rows.contexts.transpose() * rows.rewards;
  s.n_ = last - first + 1;
  return s;
}

void SufficientStats::update(const Eigen::Ref<const Vector>& x, double reward) {
  if (x.size() != dim()) throw DimensionError("update_stats: dimension mismatch");
  z_.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
  z_.triangularView<Eigen::StrictlyUpper>() = z_.transpose();
  xr_.noalias() += reward * x;
  ++n_;
}

SufficientStats update_stats(SufficientStats s, const Eigen::Ref<const Vector>& x, double reward) {
  s.update(x, reward);
  return s;
}

namespace {

// Numerically PD when the Cholesky succeeds and the smallest pivot is not
// negligible against the largest.
bool cholesky_ok(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  return hi > 0.0 && lo * lo > kSingularCutoff * hi * hi;
}

}  // namespace

Vector solve_psd(const Matrix& m, const Vector& b) {
  Eigen::LLT<Matrix> llt(m);
  if (cholesky_ok(llt)) return llt.solve(b);
  return pseudo_inverse_psd(m) * b;
}

Matrix pseudo_inverse_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector& ev = eig.eigenvalues();
  const double cutoff = kSingularCutoff * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Vector inv = Vector::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Vector ols_estimate(const SufficientStats& s) {
  if (s.count() == 0) return Vector::Zero(s.dim());
  return solve_psd(s.covariance(), s.response());
}

Vector bayes_posterior_mean(const SufficientStats& s, const Eigen::Ref<const Vector>& prior_mean,
                            const Matrix& prior_cov) {
  const Eigen::Index d = s.dim();
  if (prior_mean.size() != d || prior_cov.rows() != d || prior_cov.cols() != d) {
    throw DimensionError("posterior: prior dimension mismatch");
  }
  if (s.count() == 0) return prior_mean;
  Eigen::LLT<Matrix> prior_llt(prior_cov);
  if (!cholesky_ok(prior_llt)) throw ModelError("prior covariance is not positive definite");
  const Matrix precision = prior_llt.solve(Matrix::Identity(d, d));
  const Matrix a = s.covariance() + precision;
  const Vector b = s.response() + precision * prior_mean;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw ModelError("posterior precision is not positive definite");
  return llt.solve(b);
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("min_eigenvalue: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error("min_eigenvalue: matrix is not symmetric");
  }
  if (m.rows() == 2) {
    // Closed form; keeps the per-round eigenvalue traces cheap.
    const double a = m(0, 0);
    const double c = m(1, 1);
    const double b = 0.5 * (m(0, 1) + m(1, 0));
    const double half_trace = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), b);
    return half_trace - disc;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double estimate_error(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& estimate) {
  if (theta.size() != estimate.size()) throw DimensionError("estimate_error: dimension mismatch");
  return (theta - estimate).norm();
}

}  // namespace linbandit
