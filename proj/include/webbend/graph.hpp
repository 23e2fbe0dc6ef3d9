#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "webbend/diagnostics.hpp"
#include "webbend/domain.hpp"
#include "webbend/errors.hpp"

namespace webbend {

using LinkCount = std::uint64_t;
using LinkMap = std::map<DomainId, LinkCount>;
using DomainSet = std::set<DomainId>;

struct Edge {
  DomainId source;
  DomainId target;
  LinkCount links = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Aggregated link counts between domains at one point in time. Immutable once built;
// see SnapshotBuilder. Stored edges always have links >= 1 and source != target.
class WebGraphSnapshot {
 public:
  WebGraphSnapshot() = default;

  const std::string& label() const noexcept { return label_; }

  LinkCount links(const DomainId& source, const DomainId& target) const {
    auto row = out_.find(source);
    if (row == out_.end()) return 0;
    auto it = row->second.find(target);
    return it == row->second.end() ? 0 : it->second;
  }

  // Every target `source` links to, with counts. Empty map if none.
  const LinkMap& out_links(const DomainId& source) const {
    auto it = out_.find(source);
    return it == out_.end() ? empty_ : it->second;
  }

  // Every source linking into `target`, with counts. Empty map if none.
  const LinkMap& in_links(const DomainId& target) const {
    auto it = in_.find(target);
    return it == in_.end() ? empty_ : it->second;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (const auto& [src, row] : out_)
      for (const auto& [dst, n] : row) out.push_back({src, dst, n});
    return out;
  }

  DomainSet domains() const {
    DomainSet all;
    for (const auto& [src, row] : out_) {
      all.insert(src);
      for (const auto& kv : row) all.insert(kv.first);
    }
    return all;
  }

  std::size_t edge_count() const noexcept { return edge_count_; }
  LinkCount total_links() const noexcept { return total_links_; }
  bool empty() const noexcept { return edge_count_ == 0; }

  friend bool operator==(const WebGraphSnapshot& a, const WebGraphSnapshot& b) {
    return a.label_ == b.label_ && a.out_ == b.out_;
  }

 private:
  friend class SnapshotBuilder;

  std::string label_;
  std::map<DomainId, LinkMap> out_;
  std::map<DomainId, LinkMap> in_;
  std::size_t edge_count_ = 0;
  LinkCount total_links_ = 0;
  inline static const LinkMap empty_{};
};

// Accumulates edges: repeated (source, target) pairs sum, zero counts are ignored and
// self-links are dropped (counted in self_loops_dropped()).
class SnapshotBuilder {
 public:
  explicit SnapshotBuilder(std::string label = {}) { snap_.label_ = std::move(label); }

  // Returns false when the edge was a self-link and got dropped.
  bool add(const DomainId& source, const DomainId& target, LinkCount links) {
    if (source == target) {
      ++self_loops_;
      return false;
    }
    if (links == 0) return true;
    auto& slot = snap_.out_[source][target];
    if (slot == 0) ++snap_.edge_count_;
    slot += links;
    snap_.in_[target][source] += links;
    snap_.total_links_ += links;
    return true;
  }

  std::size_t self_loops_dropped() const noexcept { return self_loops_; }

  WebGraphSnapshot build() && { return std::move(snap_); }
  WebGraphSnapshot build() const& { return snap_; }

 private:
  WebGraphSnapshot snap_;
  std::size_t self_loops_ = 0;
};

inline WebGraphSnapshot make_snapshot(const std::vector<Edge>& edges, std::string label = {}) {
  SnapshotBuilder b(std::move(label));
  for (const auto& e : edges) b.add(e.source, e.target, e.links);
  return std::move(b).build();
}

// Target set W partitioned into non-empty, pairwise disjoint groups.
class TargetGrouping {
 public:
  TargetGrouping() = default;

  // Builds from a total assignment; every mapped group becomes non-empty by construction.
  static TargetGrouping from_assignment(const std::map<DomainId, GroupId>& assignment) {
    TargetGrouping g;
    for (const auto& [domain, group] : assignment) {
      g.targets_.insert(domain);
      g.group_of_.emplace(domain, group);
      g.groups_[group].insert(domain);
    }
    return g;
  }

  const DomainSet& targets() const noexcept { return targets_; }
  const std::map<GroupId, DomainSet>& groups() const noexcept { return groups_; }
  const std::map<DomainId, GroupId>& assignment() const noexcept { return group_of_; }

  bool contains(const DomainId& d) const { return targets_.count(d) != 0; }

  const GroupId& group_of(const DomainId& d) const {
    auto it = group_of_.find(d);
    if (it == group_of_.end()) throw UnknownTarget("not a target: " + d.str());
    return it->second;
  }

  const DomainSet& members(const GroupId& g) const {
    auto it = groups_.find(g);
    if (it == groups_.end()) throw UnknownTarget("no such group: " + g.str());
    return it->second;
  }

  // Members of d's group, d included.
  const DomainSet& group_members_of(const DomainId& d) const { return members(group_of(d)); }

  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }

  friend bool operator==(const TargetGrouping& a, const TargetGrouping& b) { return a.group_of_ == b.group_of_; }

 private:
  DomainSet targets_;
  std::map<DomainId, GroupId> group_of_;
  std::map<GroupId, DomainSet> groups_;
};

// Per-domain attributes; only the 0-100 authority rating is used.
struct DomainProfile {
  DomainId domain;
  std::optional<int> domain_rating;

  DomainProfile() = default;
  DomainProfile(DomainId d, std::optional<int> rating) : domain(std::move(d)), domain_rating(rating) {
    if (rating && (*rating < 0 || *rating > 100))
      throw Error("domain rating out of range [0,100] for " + domain.str() + ": " + std::to_string(*rating));
  }
};

using ProfileTable = std::map<DomainId, DomainProfile>;

// The sources linking into one target, with volumes.
struct BacklinkView {
  DomainId target;
  LinkMap sources;
  LinkCount total_inlinks = 0;

  DomainSet source_set() const {
    DomainSet s;
    for (const auto& kv : sources) s.insert(s.end(), kv.first);
    return s;
  }
};

inline BacklinkView backlinks_of(const WebGraphSnapshot& graph, const DomainId& target) {
  BacklinkView view{target, graph.in_links(target), 0};
  for (const auto& kv : view.sources) view.total_inlinks += kv.second;
  return view;
}

struct TargetOutlinks {
  LinkMap in_group;
  LinkMap out_group;
};

// Splits source's links to other targets by whether the target shares source's group.
// Links to non-target domains are ignored.
inline TargetOutlinks outlinks_to_targets(const WebGraphSnapshot& graph, const DomainId& source,
                                          const TargetGrouping& grouping) {
  const GroupId& own = grouping.group_of(source);
  TargetOutlinks result;
  for (const auto& [dst, n] : graph.out_links(source)) {
    auto it = grouping.assignment().find(dst);
    if (it == grouping.assignment().end()) continue;
    (it->second == own ? result.in_group : result.out_group).emplace(dst, n);
  }
  return result;
}

}  // namespace webbend
