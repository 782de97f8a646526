#include "linbandit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace linbandit {

double instantaneous_regret(const Eigen::Ref<const Vector>& theta, const ContextRound& round,
                            std::size_t chosen) {
  if (chosen >= round.num_actions() || !round.available(chosen)) {
    throw InvalidActionError("chosen action is not available");
  }
  if (theta.size() != round.dim()) throw DimensionError("regret: theta dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < round.num_actions(); ++a) {
    if (round.available(a)) best = std::max(best, round.context(a).dot(theta));
  }
  return std::max(0.0, best - round.context(chosen).dot(theta));
}

double gap(const Eigen::Ref<const Vector>& theta, const ContextRound& round) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best = kNegInf;
  double second = kNegInf;
  std::size_t n = 0;
  for (std::size_t a = 0; a < round.num_actions(); ++a) {
    if (!round.available(a)) continue;
    ++n;
    const double v = round.context(a).dot(theta);
    if (v > best) {
      second = best;
      best = v;
    } else if (v > second) {
      second = v;
    }
  }
  if (n < 2) return std::numeric_limits<double>::infinity();
  return best - second;
}

void RegretLedger::append(const RegretRecord& r) {
  if (r.regret < 0.0) throw Error("instantaneous regret must be >= 0");
  records_.push_back(r);
}

namespace {

bool counts(const RegretRecord& r, Restriction restriction) {
  switch (restriction) {
    case Restriction::All: return true;
    case Restriction::MinorityOnly: return r.group == Group::Minority;
    case Restriction::MajorityOnly: return r.group == Group::Majority;
    case Restriction::CustomSet: return r.restricted;
  }
  return false;
}

}  // namespace

double cumulative_regret(const RegretLedger& ledger, Restriction restriction) {
  double total = 0.0;
  for (const auto& r : ledger.records()) {
    if (counts(r, restriction)) total += r.regret;
  }
  return total;
}

double prediction_regret(const RegretLedger& ledger, Restriction restriction) {
  double total = 0.0;
  for (const auto& r : ledger.records()) {
    if (!counts(r, restriction)) continue;
    if (!r.prediction_regret) {
      throw Error("ledger round " + std::to_string(r.t) + " carries no prediction");
    }
    total += *r.prediction_regret;
  }
  return total;
}

MeanStderr bayesian_regret(std::span<const double> values) {
  if (values.size() < 2) throw Error("bayesian_regret needs at least two replicates");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n)};
}

PowerFit scaling_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw Error("scaling_exponent needs at least three points");
  std::set<double> horizons;
  for (const auto& [t, r] : points) {
    if (!(t > 0.0)) throw Error("scaling_exponent: horizons must be positive");
    if (!(r > 0.0)) throw Error("scaling_exponent: regret values must be positive");
    horizons.insert(t);
  }
  if (horizons.size() != points.size()) throw Error("scaling_exponent: horizons must be distinct");

  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [t, r] : points) {
    mx += std::log(t);
    my += std::log(r);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [t, r] : points) {
    const double dx = std::log(t) - mx;
    sxy += dx * (std::log(r) - my);
    sxx += dx * dx;
  }
  PowerFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  return fit;
}

ExponentInterval bootstrap_exponent(std::span<const double> horizons,
                                    const std::vector<std::vector<double>>& per_horizon,
                                    std::size_t resamples, Rng& rng) {
  if (horizons.size() != per_horizon.size()) throw Error("bootstrap_exponent: shape mismatch");
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<std::pair<double, double>> pts(horizons.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    bool ok = true;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      const auto& reps = per_horizon[i];
      if (reps.empty()) throw Error("bootstrap_exponent: empty replicate set");
      std::uniform_int_distribution<std::size_t> pick(0, reps.size() - 1);
      double mean = 0.0;
      for (std::size_t j = 0; j < reps.size(); ++j) mean += reps[pick(rng)];
      mean /= static_cast<double>(reps.size());
      pts[i] = {horizons[i], mean};
      ok = ok && mean > 0.0;
    }
    if (ok) slopes.push_back(scaling_exponent(pts).exponent);
  }
  if (slopes.empty()) return {std::nan(""), std::nan("")};
  std::sort(slopes.begin(), slopes.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, slopes.size() - 1);
    return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
  };
  return {quantile(0.025), quantile(0.975)};
}

}  // namespace linbandit
