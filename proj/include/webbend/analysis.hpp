#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "webbend/diagnostics.hpp"
#include "webbend/errors.hpp"
#include "webbend/graph.hpp"
#include "webbend/ingest.hpp"
#include "webbend/metric_kind.hpp"
#include "webbend/metrics.hpp"

namespace webbend {

struct NormalizedValues {
  std::map<DomainId, double> values;
  bool degenerate_range = false;  // max == min; every output is 0
};

inline NormalizedValues min_max_normalize(const std::map<DomainId, double>& values) {
  if (values.empty()) throw EmptyInput("min-max normalization of an empty set");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  const double lo = lo_it->second;
  const double span = hi_it->second - lo;
  NormalizedValues out;
  out.degenerate_range = !(span > 0);
  for (const auto& [d, v] : values) out.values.emplace(d, out.degenerate_range ? 0.0 : std::clamp((v - lo) / span, 0.0, 1.0));
  return out;
}

// Min-max normalizes each metric column of a baseline table across its domains.
inline BaselineTable normalize_baseline(const BaselineTable& table, Diagnostics* diag = nullptr) {
  BaselineTable out;
  for (Metric m : kAllMetrics) {
    std::map<DomainId, double> column;
    for (const auto& [d, row] : table)
      if (auto it = row.find(m); it != row.end()) column.emplace(d, it->second);
    if (column.empty()) continue;
    auto norm = min_max_normalize(column);
    if (norm.degenerate_range && diag)
      diag->warn("baseline_degenerate_range", "baseline column is constant; normalized to 0", std::string(metric_name(m)));
    for (const auto& [d, v] : norm.values) out[d][m] = v;
  }
  return out;
}

struct MetricStat {
  double mean = 0;
  double stddev = 0;  // population
  std::size_t n = 0;  // members with the metric available

  bool available() const { return n > 0; }
};

struct GroupReport {
  GroupId group;
  std::size_t member_count = 0;
  std::map<Metric, MetricStat> stats;

  std::optional<double> mean(Metric m) const {
    auto it = stats.find(m);
    if (it == stats.end() || !it->second.available()) return std::nullopt;
    return it->second.mean;
  }
};

inline MetricStat describe(std::vector<double> xs) {
  MetricStat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  // sorted so the result does not depend on member order
  std::sort(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

// Per-group mean and population standard deviation of every metric, ordered by group id.
inline std::vector<GroupReport> group_means(const std::vector<MetricVector>& vectors, const TargetGrouping& grouping) {
  std::map<GroupId, std::map<Metric, std::vector<double>>> columns;
  for (const auto& v : vectors) {
    const GroupId& g = grouping.group_of(v.target);
    for (Metric m : kAllMetrics) {
      auto& col = columns[g][m];
      if (auto x = v.get(m)) col.push_back(*x);
    }
  }
  std::vector<GroupReport> out;
  for (const auto& [g, members] : grouping.groups()) {
    GroupReport r;
    r.group = g;
    r.member_count = members.size();
    for (Metric m : kAllMetrics) {
      auto it = columns.find(g);
      r.stats[m] = describe(it == columns.end() ? std::vector<double>{} : it->second[m]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct DiffRecord {
  DomainId target;
  Metric metric;
  double new_value = 0;
  double baseline_value = 0;
  double difference = 0;  // new - baseline
};

// One record per (target, metric) present in both inputs, ordered by domain then metric.
inline std::vector<DiffRecord> diff_records(const std::vector<MetricVector>& fresh, const BaselineTable& baseline) {
  std::vector<DiffRecord> out;
  for (const auto& v : fresh) {
    auto row = baseline.find(v.target);
    if (row == baseline.end()) continue;
    for (Metric m : kAllMetrics) {
      auto cell = row->second.find(m);
      auto x = v.get(m);
      if (cell == row->second.end() || !x) continue;
      out.push_back({v.target, m, *x, cell->second, *x - cell->second});
    }
  }
  std::sort(out.begin(), out.end(), [](const DiffRecord& a, const DiffRecord& b) {
    return a.target != b.target ? a.target < b.target : a.metric < b.metric;
  });
  return out;
}

struct ChangeSummary {
  double mean_abs_change = 0;
  std::size_t n = 0;  // metrics compared
};

// Mean |new - baseline| over the metrics both sides have, per target.
inline std::map<DomainId, ChangeSummary> mean_abs_change(const std::vector<MetricVector>& fresh,
                                                         const BaselineTable& baseline) {
  std::map<DomainId, ChangeSummary> out;
  for (const auto& r : diff_records(fresh, baseline)) {
    auto& s = out[r.target];
    s.mean_abs_change += std::abs(r.difference);
    ++s.n;
  }
  for (auto& [d, s] : out) s.mean_abs_change /= static_cast<double>(s.n);
  return out;
}

// Targets ordered by descending mean absolute change, ties by domain.
inline std::vector<std::pair<DomainId, ChangeSummary>> rank_changes(const std::map<DomainId, ChangeSummary>& changes) {
  std::vector<std::pair<DomainId, ChangeSummary>> out(changes.begin(), changes.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second.mean_abs_change > b.second.mean_abs_change;
  });
  return out;
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

enum class PValueMethod { t_approximation, exact_permutation };

inline const char* to_string(PValueMethod m) {
  return m == PValueMethod::t_approximation ? "t_approximation" : "exact_permutation";
}

struct SpearmanResult {
  double rho = 0;
  double p_value = 1;
  std::size_t n = 0;
  bool undefined = false;  // an input was constant; rho reported as 0, p as 1
  PValueMethod method = PValueMethod::t_approximation;
};

inline constexpr std::size_t kMaxExactPermutationN = 10;

// Spearman's rank correlation with a two-sided p-value.
inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y,
                               PValueMethod method = PValueMethod::t_approximation) {
  if (x.size() != y.size()) throw LengthMismatch("spearman inputs differ in length");
  if (x.size() < 3) throw TooFewPoints("spearman needs at least 3 points");
  if (method == PValueMethod::exact_permutation && x.size() > kMaxExactPermutationN)
    throw ConfigError("exact permutation p-value supports at most " + std::to_string(kMaxExactPermutationN) + " points");

  SpearmanResult r;
  r.n = x.size();
  r.method = method;
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double rho = pearson(rx, ry);
  if (std::isnan(rho)) {
    r.undefined = true;
    return r;
  }
  r.rho = rho;

  if (method == PValueMethod::t_approximation) {
    if (std::abs(rho) >= 1.0) {
      r.p_value = 0.0;
    } else {
      double df = static_cast<double>(r.n) - 2.0;
      double t = rho * std::sqrt(df / (1.0 - rho * rho));
      boost::math::students_t dist(df);
      r.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
    }
  } else {
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::size_t extreme = 0, total = 0;
    do {
      ++total;
      if (std::abs(pearson(rx, perm)) >= std::abs(rho) - 1e-12) ++extreme;
    } while (std::next_permutation(perm.begin(), perm.end()));
    r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  }
  return r;
}

}  // namespace webbend
