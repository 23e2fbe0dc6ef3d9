#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "webbend/diagnostics.hpp"
#include "webbend/errors.hpp"
#include "webbend/graph.hpp"
#include "webbend/metric_kind.hpp"

namespace webbend {

// An exact integer ratio; scores are divided once, at the end.
struct Ratio {
  LinkCount numerator = 0;
  LinkCount denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

namespace detail {

inline void require_target(const TargetGrouping& grouping, const DomainId& w) {
  if (!grouping.contains(w)) throw UnknownTarget("not a target: " + w.str());
}

// (in-group volume, total volume) of w's links to other targets.
inline std::pair<LinkCount, LinkCount> target_outlink_volumes(const WebGraphSnapshot& graph,
                                                              const TargetGrouping& grouping, const DomainId& w) {
  auto split = outlinks_to_targets(graph, w, grouping);
  LinkCount in = 0, out = 0;
  for (const auto& kv : split.in_group) in += kv.second;
  for (const auto& kv : split.out_group) out += kv.second;
  return {in, in + out};
}

}  // namespace detail

// Back: share of w's target outlinks that stay inside its group, smoothed by +1.
inline Ratio back_ratio(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  detail::require_target(grouping, w);
  auto [in, total] = detail::target_outlink_volumes(graph, grouping, w);
  return {in, 1 + total};
}

inline double back(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  return back_ratio(graph, grouping, w).value();
}

// Bridge: share of w's target outlinks that leave its group. Shares Back's denominator.
inline Ratio bridge_ratio(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  detail::require_target(grouping, w);
  auto [in, total] = detail::target_outlink_volumes(graph, grouping, w);
  return {total - in, 1 + total};
}

inline double bridge(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  return bridge_ratio(graph, grouping, w).value();
}

inline double jaccard(const DomainSet& a, const DomainSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

// Build: mean Jaccard similarity between w's backlink source set and each group-mate's.
inline double build(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  detail::require_target(grouping, w);
  const auto& mates = grouping.group_members_of(w);
  if (mates.size() < 2) return 0.0;
  DomainSet own = backlinks_of(graph, w).source_set();
  double sum = 0;
  for (const auto& m : mates)
    if (m != w) sum += jaccard(own, backlinks_of(graph, m).source_set());
  return sum / static_cast<double>(mates.size() - 1);
}

// Boost: volume into w from sources that also link to some other member of w's group.
inline Ratio boost_ratio(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  detail::require_target(grouping, w);
  const auto& mates = grouping.group_members_of(w);
  Ratio r{0, 1};
  for (const auto& [b, n] : graph.in_links(w)) {
    r.denominator += n;
    bool co_amplifies = std::any_of(mates.begin(), mates.end(),
                                    [&](const DomainId& m) { return m != w && graph.links(b, m) > 0; });
    if (co_amplifies) r.numerator += n;
  }
  return r;
}

inline double boost(const WebGraphSnapshot& graph, const TargetGrouping& grouping, const DomainId& w) {
  return boost_ratio(graph, grouping, w).value();
}

struct NegateScore {
  double value = 1.0;
  LinkCount rated_links = 0;
  LinkCount unrated_links = 0;
  bool no_rated_backlinks = true;  // value defaults to 1 when set

  double coverage() const {
    LinkCount all = rated_links + unrated_links;
    return all == 0 ? 0.0 : static_cast<double>(rated_links) / static_cast<double>(all);
  }
};

// Negate: 1 - (link-weighted mean rating of w's backlink sources) / 100.
// Sources without a rating are left out of both sums and reported through the coverage fields.
inline NegateScore negate(const WebGraphSnapshot& graph, const ProfileTable& profiles, const DomainId& w) {
  NegateScore s;
  LinkCount weighted = 0;
  for (const auto& [b, n] : graph.in_links(w)) {
    auto it = profiles.find(b);
    if (it == profiles.end() || !it->second.domain_rating) {
      s.unrated_links += n;
      continue;
    }
    s.rated_links += n;
    weighted += n * static_cast<LinkCount>(*it->second.domain_rating);
  }
  if (s.rated_links == 0) return s;
  s.no_rated_backlinks = false;
  s.value = 1.0 - static_cast<double>(weighted) / (100.0 * static_cast<double>(s.rated_links));
  return s;
}

// Links each t1 source of w lost by t2, clamped at zero per source.
struct DeltaView {
  DomainId target;
  LinkMap per_source_loss;

  LinkCount loss(const DomainId& source) const {
    auto it = per_source_loss.find(source);
    return it == per_source_loss.end() ? 0 : it->second;
  }
  LinkCount total_loss() const {
    LinkCount t = 0;
    for (const auto& kv : per_source_loss) t += kv.second;
    return t;
  }
};

inline DeltaView delta_view(const WebGraphSnapshot& t1, const WebGraphSnapshot& t2, const DomainId& w) {
  DeltaView d{w, {}};
  for (const auto& [b, before] : t1.in_links(w)) {
    LinkCount after = t2.links(b, w);
    d.per_source_loss.emplace(b, before > after ? before - after : 0);
  }
  return d;
}

// Neutralize: share of w's lost backlinks that were lost from its own group-mates.
inline Ratio neutralize_ratio(const WebGraphSnapshot& t1, const WebGraphSnapshot& t2, const TargetGrouping& grouping,
                              const DomainId& w) {
  detail::require_target(grouping, w);
  DeltaView d = delta_view(t1, t2, w);
  Ratio r{0, 1 + d.total_loss()};
  for (const auto& m : grouping.group_members_of(w))
    if (m != w) r.numerator += d.loss(m);
  return r;
}

inline double neutralize(const WebGraphSnapshot& t1, const WebGraphSnapshot& t2, const TargetGrouping& grouping,
                         const DomainId& w) {
  return neutralize_ratio(t1, t2, grouping, w).value();
}

struct NarrowScore {
  double value = 0.0;
  bool empty_backlinks = false;
};

// Narrow: one minus the normalized Shannon entropy of w's backlink volume distribution.
// One source scores 1; no sources scores 0 and sets empty_backlinks.
inline NarrowScore narrow(const WebGraphSnapshot& graph, const DomainId& w) {
  const auto& sources = graph.in_links(w);
  if (sources.empty()) return {0.0, true};
  if (sources.size() == 1) return {1.0, false};
  LinkCount total = 0;
  for (const auto& kv : sources) total += kv.second;
  double entropy = 0;
  for (const auto& kv : sources) {
    double p = static_cast<double>(kv.second) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  double v = 1.0 - entropy / std::log(static_cast<double>(sources.size()));
  return {std::clamp(v, 0.0, 1.0), false};
}

struct NeglectScore {
  double value = 0.0;
  bool zero_t2_total = false;  // denominator guarded to 1
};

// Neglect: backlinks w lost between t1 and t2 relative to its t2 backlink total. Unbounded above.
inline NeglectScore neglect(const WebGraphSnapshot& t1, const WebGraphSnapshot& t2, const DomainId& w) {
  LinkCount lost = delta_view(t1, t2, w).total_loss();
  LinkCount after = backlinks_of(t2, w).total_inlinks;
  NeglectScore s;
  s.zero_t2_total = (after == 0);
  s.value = static_cast<double>(lost) / static_cast<double>(std::max<LinkCount>(1, after));
  return s;
}

struct MetricVector {
  DomainId target;
  double back = 0, build = 0, bridge = 0, boost = 0, negate = 0, narrow = 0;
  std::optional<double> neutralize;  // absent when no t1 snapshot was supplied
  std::optional<double> neglect;

  std::string t1_label;  // empty when static-only
  std::string t2_label;

  double negate_coverage = 0;
  bool negate_no_rated_backlinks = false;
  bool narrow_empty_backlinks = false;
  bool neglect_zero_t2_total = false;

  std::optional<double> get(Metric m) const {
    switch (m) {
      case Metric::back: return back;
      case Metric::build: return build;
      case Metric::bridge: return bridge;
      case Metric::boost: return boost;
      case Metric::negate: return negate;
      case Metric::neutralize: return neutralize;
      case Metric::narrow: return narrow;
      case Metric::neglect: return neglect;
    }
    return std::nullopt;
  }
};

struct MetricOptions {
  bool temporal = false;  // Neutralize and Neglect; requires t1
};

// Scores every target. Static metrics read t2; temporal metrics read (t1, t2) and stay
// unset when t1 is null. Output is ordered by target domain.
inline std::vector<MetricVector> compute_all(const WebGraphSnapshot* t1, const WebGraphSnapshot& t2,
                                             const TargetGrouping& grouping, const ProfileTable& profiles,
                                             MetricOptions options = {}, Diagnostics* diag = nullptr) {
  if (options.temporal && !t1) throw MissingSnapshot("temporal metrics requested without a t1 snapshot");
  std::vector<MetricVector> out;
  out.reserve(grouping.size());
  for (const auto& w : grouping.targets()) {
    MetricVector v;
    v.target = w;
    v.t2_label = t2.label();
    v.back = back(t2, grouping, w);
    v.build = build(t2, grouping, w);
    v.bridge = bridge(t2, grouping, w);
    v.boost = boost(t2, grouping, w);

    NegateScore ng = negate(t2, profiles, w);
    v.negate = ng.value;
    v.negate_coverage = ng.coverage();
    v.negate_no_rated_backlinks = ng.no_rated_backlinks;

    NarrowScore nr = narrow(t2, w);
    v.narrow = nr.value;
    v.narrow_empty_backlinks = nr.empty_backlinks;

    if (t1) {
      v.t1_label = t1->label();
      v.neutralize = neutralize(*t1, t2, grouping, w);
      NeglectScore nl = neglect(*t1, t2, w);
      v.neglect = nl.value;
      v.neglect_zero_t2_total = nl.zero_t2_total;
    }

    if (diag) {
      if (ng.no_rated_backlinks)
        diag->warn("negate_no_rated_backlinks", "no rated backlink sources; negate set to 1", w.str());
      else if (ng.unrated_links > 0)
        diag->info("negate_partial_coverage",
                   "rated share of backlink volume: " + std::to_string(ng.coverage()), w.str());
      if (nr.empty_backlinks) diag->warn("narrow_empty_backlinks", "no backlink sources; narrow set to 0", w.str());
      if (t1 && v.neglect_zero_t2_total)
        diag->warn("neglect_zero_t2_total", "no backlinks at t2; neglect denominator guarded to 1", w.str());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace webbend
