// Regret accounting (total, group-restricted, prediction, Bayesian), the
// per-round gap and log-log scaling fits.
#pragma once

#include "linbandit/rng.hpp"
#include "linbandit/types.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace linbandit {

/// max_a theta'x_a - theta'x_chosen over available slots.
double instantaneous_regret(const Eigen::Ref<const Vector>& theta, const ContextRound& round,
                            std::size_t chosen);

/// Best minus second-best expected reward; +inf with fewer than two
/// available actions.
double gap(const Eigen::Ref<const Vector>& theta, const ContextRound& round);

struct RegretRecord {
  std::int64_t t = 0;
  double regret = 0.0;
  std::optional<double> prediction_regret;
  Group group = Group::Majority;
  bool restricted = false;  // member of the custom round set
};

class RegretLedger {
 public:
  void append(const RegretRecord& r);
  const std::vector<RegretRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  void reserve(std::size_t n) { records_.reserve(n); }

 private:
  std::vector<RegretRecord> records_;
};

enum class Restriction : std::uint8_t { All, MinorityOnly, MajorityOnly, CustomSet };

double cumulative_regret(const RegretLedger& ledger, Restriction restriction = Restriction::All);

/// Throws Error when a counted round carries no prediction.
double prediction_regret(const RegretLedger& ledger, Restriction restriction = Restriction::All);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (sample sd / sqrt(n)). Needs >= 2 values.
MeanStderr bayesian_regret(std::span<const double> replicate_regrets);

struct PowerFit {
  double exponent = 0.0;
  double intercept = 0.0;  // natural-log intercept
};

/// Least-squares slope of ln(regret) on ln(T). Needs >= 3 points with
/// distinct T and positive regret.
PowerFit scaling_exponent(std::span<const std::pair<double, double>> points);

struct ExponentInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Percentile bootstrap (95%) of the fitted exponent, resampling replicates
/// independently at each horizon. `per_horizon[i]` holds the replicate
/// regrets at `horizons[i]`.
ExponentInterval bootstrap_exponent(std::span<const double> horizons,
                                    const std::vector<std::vector<double>>& per_horizon,
                                    std::size_t resamples, Rng& rng);

}  // namespace linbandit
