#include "linbandit/results.hpp"

#include "linbandit/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>

namespace linbandit {

std::string format_real(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

double ResultTable::aggregate(std::string_view name, std::string_view policy,
                              std::int64_t horizon) const {
  for (const auto& a : aggregates) {
    if (a.name == name && a.policy == policy && a.horizon == horizon) return a.value;
  }
  throw std::out_of_range("no aggregate " + std::string(name) + " for policy '" +
                          std::string(policy) + "' T=" + std::to_string(horizon));
}

bool ResultTable::has_aggregate(std::string_view name, std::string_view policy,
                                std::int64_t horizon) const {
  return std::any_of(aggregates.begin(), aggregates.end(), [&](const Aggregate& a) {
    return a.name == name && a.policy == policy && a.horizon == horizon;
  });
}

std::string emit_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.experiment;
    out += ',';
    out += r.policy;
    out += ',';
    out += std::to_string(r.horizon);
    out += ',';
    out += std::to_string(r.replicate);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_real(r.regret_total);
    out += ',';
    out += format_real(r.regret_minority);
    out += ',';
    out += format_real(r.regret_prediction);
    out += ',';
    out += std::to_string(r.theta_draw_id);
    out += '\n';
  }
  return out;
}

namespace {

template <class T>
T parse_int_field(std::string_view s, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("csv line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_real_field(std::string_view s, int line) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw Error("csv line " + std::to_string(line) + ": bad number '" + tmp + "'");
  }
  return v;
}

}  // namespace

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t pos = 0;
  int line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCsvHeader) throw Error("csv: unexpected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) throw Error("csv line " + std::to_string(line_no) + ": expected 9 fields");
    ResultRow r;
    r.experiment = std::string(f[0]);
    r.policy = std::string(f[1]);
    r.horizon = parse_int_field<std::int64_t>(f[2], line_no);
    r.replicate = parse_int_field<std::int64_t>(f[3], line_no);
    r.seed = parse_int_field<std::uint64_t>(f[4], line_no);
    r.regret_total = parse_real_field(f[5], line_no);
    r.regret_minority = parse_real_field(f[6], line_no);
    r.regret_prediction = parse_real_field(f[7], line_no);
    r.theta_draw_id = parse_int_field<std::int64_t>(f[8], line_no);
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw Error("csv: missing header");
  return rows;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.policy, a.horizon, a.replicate) < std::tie(b.policy, b.horizon, b.replicate);
  });
}

std::string emit_curves_csv(const std::string& experiment, const std::vector<CurvePoint>& curves) {
  std::string out = "experiment,policy,T,replicate,t,regret_cumulative,lambda_min\n";
  for (const auto& c : curves) {
    out += experiment + ',' + c.policy + ',' + std::to_string(c.horizon) + ',' +
           std::to_string(c.replicate) + ',' + std::to_string(c.t) + ',' +
           format_real(c.regret_cumulative) + ',' + format_real(c.lambda_min) + '\n';
  }
  return out;
}

std::string emit_summary_json(const ResultTable& table) {
  nlohmann::ordered_json j;
  j["experiment"] = table.experiment;
  auto& arr = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& a : table.aggregates) {
    nlohmann::ordered_json item;
    item["name"] = a.name;
    item["policy"] = a.policy;
    item["T"] = a.horizon;
    if (std::isfinite(a.value)) {
      item["value"] = a.value;
    } else {
      item["value"] = format_real(a.value);
    }
    arr.push_back(std::move(item));
  }
  return j.dump(2) + "\n";
}

}  // namespace linbandit
