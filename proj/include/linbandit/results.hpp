// Result tables and their CSV / JSON serialization.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace linbandit {

/// One (policy, horizon, replicate) outcome.
struct ResultRow {
  std::string experiment;
  std::string policy;
  std::int64_t horizon = 0;
  std::int64_t replicate = 0;
  std::uint64_t seed = 0;
  double regret_total = 0.0;
  double regret_minority = 0.0;
  double regret_prediction = 0.0;
  std::int64_t theta_draw_id = 0;

  bool operator==(const ResultRow&) const = default;
};

/// Experiment-level statistic. `policy` is empty and `horizon` 0 when the
/// value is not tied to either.
struct Aggregate {
  std::string name;
  std::string policy;
  std::int64_t horizon = 0;
  double value = 0.0;

  bool operator==(const Aggregate&) const = default;
};

struct CurvePoint {
  std::string policy;
  std::int64_t horizon = 0;
  std::int64_t replicate = 0;
  std::int64_t t = 0;
  double regret_cumulative = 0.0;
  double lambda_min = 0.0;
};

struct ResultTable {
  std::string experiment;
  std::vector<ResultRow> rows;
  std::vector<Aggregate> aggregates;
  std::vector<CurvePoint> curves;

  /// First aggregate matching (name, policy, horizon); throws std::out_of_range.
  double aggregate(std::string_view name, std::string_view policy = {},
                   std::int64_t horizon = 0) const;
  bool has_aggregate(std::string_view name, std::string_view policy = {},
                     std::int64_t horizon = 0) const;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,policy,T,replicate,seed,regret_total,regret_minority,regret_prediction,theta_draw_id";

/// Header plus one line per row in the given order; reals with 17
/// significant digits.
std::string emit_csv(const std::vector<ResultRow>& rows);

/// Inverse of emit_csv. Throws Error on a malformed header or line.
std::vector<ResultRow> parse_csv(std::string_view text);

/// Sorts rows by (policy, T, replicate).
void sort_rows(std::vector<ResultRow>& rows);

std::string emit_curves_csv(const std::string& experiment, const std::vector<CurvePoint>& curves);

/// {"experiment": ..., "aggregates": [{"name", "policy", "T", "value"}, ...]}
std::string emit_summary_json(const ResultTable& table);

/// 17-significant-digit decimal rendering used by every emitter.
std::string format_real(double v);

}  // namespace linbandit
