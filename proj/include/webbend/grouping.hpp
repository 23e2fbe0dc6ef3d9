#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "webbend/errors.hpp"
#include "webbend/graph.hpp"

namespace webbend {

struct LouvainConfig {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int max_passes = 20;               // aggregation levels
  double min_modularity_gain = 1e-9;  // a local-move sweep gaining less than this ends the level
  bool binary_weights = false;        // weight 1 per linked pair instead of summed volume

  void validate() const {
    if (!(resolution > 0)) throw ConfigError("louvain resolution must be > 0");
    if (max_passes < 1) throw ConfigError("louvain max_passes must be >= 1");
    if (!(min_modularity_gain >= 0)) throw ConfigError("louvain min_modularity_gain must be >= 0");
  }
};

// Edges whose source and target are both in `targets`.
inline WebGraphSnapshot induce_target_subgraph(const WebGraphSnapshot& graph, const DomainSet& targets) {
  SnapshotBuilder b(graph.label());
  for (const auto& src : targets)
    for (const auto& [dst, n] : graph.out_links(src))
      if (targets.count(dst)) b.add(src, dst, n);
  return std::move(b).build();
}

// Targets with at least one link to or from another target.
inline DomainSet filter_connected_targets(const WebGraphSnapshot& graph, const DomainSet& targets) {
  DomainSet out;
  for (const auto& e : induce_target_subgraph(graph, targets).edges()) {
    out.insert(e.source);
    out.insert(e.target);
  }
  return out;
}

// Undirected weight table over an indexed node set: u(i,j) = links(i->j) + links(j->i).
struct UndirectedWeights {
  std::vector<DomainId> nodes;
  std::vector<std::map<int, double>> adj;  // symmetric, no self entries
  double total = 0;                         // m: each undirected pair counted once

  int index_of(const DomainId& d) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), d);
    return (it != nodes.end() && *it == d) ? static_cast<int>(it - nodes.begin()) : -1;
  }
};

inline UndirectedWeights symmetrize(const WebGraphSnapshot& graph, const DomainSet& targets, bool binary = false) {
  UndirectedWeights u;
  u.nodes.assign(targets.begin(), targets.end());
  u.adj.resize(u.nodes.size());
  for (std::size_t i = 0; i < u.nodes.size(); ++i) {
    for (const auto& [dst, n] : graph.out_links(u.nodes[i])) {
      int j = u.index_of(dst);
      if (j < 0) continue;
      u.adj[i][j] += static_cast<double>(n);
      u.adj[j][static_cast<int>(i)] += static_cast<double>(n);
    }
  }
  if (binary)
    for (auto& row : u.adj)
      for (auto& kv : row) kv.second = 1.0;
  for (std::size_t i = 0; i < u.adj.size(); ++i)
    for (const auto& [j, w] : u.adj[i])
      if (static_cast<std::size_t>(j) > i) u.total += w;
  return u;
}

// Newman-Girvan modularity with resolution on the symmetrized target graph:
// Q = sum_c [ L_c / m - resolution * (K_c / 2m)^2 ].
// Targets absent from `grouping` are treated as singletons. Zero when the graph has no edges.
inline double modularity(const WebGraphSnapshot& graph, const TargetGrouping& grouping, double resolution = 1.0,
                         bool binary = false) {
  auto u = symmetrize(graph, grouping.targets(), binary);
  if (u.total <= 0) return 0.0;
  std::map<GroupId, double> internal, degree;
  for (std::size_t i = 0; i < u.nodes.size(); ++i) {
    const GroupId& gi = grouping.group_of(u.nodes[i]);
    for (const auto& [j, w] : u.adj[i]) {
      degree[gi] += w;
      if (static_cast<std::size_t>(j) > i && grouping.group_of(u.nodes[j]) == gi) internal[gi] += w;
    }
  }
  double q = 0;
  for (const auto& [g, k] : degree) {
    double frac = k / (2 * u.total);
    q += internal[g] / u.total - resolution * frac * frac;
  }
  return q;
}

struct LouvainResult {
  TargetGrouping grouping;
  double modularity = 0;
  int levels = 0;
};

namespace detail {

// One level of the multilevel graph: adjacency without self entries plus self-loop weight per node.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> loop;    // internal weight already folded into the node
  std::vector<double> degree;  // sum of incident weights, loops counted twice
  double total = 0;

  std::size_t size() const { return adj.size(); }
};

inline double level_modularity(const LevelGraph& g, const std::vector<int>& comm, double resolution) {
  if (g.total <= 0) return 0;
  std::vector<double> in(g.size(), 0), tot(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    tot[comm[i]] += g.degree[i];
    in[comm[i]] += g.loop[i];
    for (const auto& [j, w] : g.adj[i])
      if (static_cast<std::size_t>(j) > i && comm[j] == comm[i]) in[comm[i]] += w;
  }
  double q = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double frac = tot[c] / (2 * g.total);
    q += in[c] / g.total - resolution * frac * frac;
  }
  return q;
}

// Local-move phase. Returns true if any node changed community.
inline bool local_moves(const LevelGraph& g, std::vector<int>& comm, const LouvainConfig& cfg, std::mt19937_64& rng) {
  const std::size_t n = g.size();
  const double m = g.total;
  std::vector<double> tot(n, 0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> link_to(n, 0);
  std::vector<int> touched;
  bool any_move = false;

  double q = level_modularity(g, comm, cfg.resolution);
  for (int sweep = 0; sweep < 10000; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool moved = false;
    for (int node : order) {
      const int own = comm[node];
      const double k = g.degree[node];
      touched.clear();
      for (const auto& [j, w] : g.adj[node]) {
        int c = comm[j];
        if (link_to[c] == 0) touched.push_back(c);
        link_to[c] += w;
      }
      tot[own] -= k;
      // gain(c) = k_in(c)/m - resolution * tot(c) * k / (2 m^2), relative to leaving the node isolated
      auto gain = [&](int c) { return link_to[c] / m - cfg.resolution * tot[c] * k / (2 * m * m); };
      int best = own;
      double best_gain = gain(own);
      for (int c : touched) {
        double gc = gain(c);
        if (gc > best_gain + 1e-15) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += k;
      comm[node] = best;
      if (best != own) moved = true;
      for (int c : touched) link_to[c] = 0;
    }
    if (!moved) break;
    any_move = true;
    double next = level_modularity(g, comm, cfg.resolution);
    double improvement = next - q;
    q = next;
    if (improvement < cfg.min_modularity_gain) break;
  }
  return any_move;
}

// Relabels communities densely 0..k-1 in first-appearance order.
inline int compact(std::vector<int>& comm) {
  std::vector<int> remap(comm.size(), -1);
  int next = 0;
  for (int& c : comm) {
    if (remap[c] < 0) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

inline LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm, int communities) {
  LevelGraph out;
  out.adj.resize(communities);
  out.loop.assign(communities, 0);
  out.degree.assign(communities, 0);
  out.total = g.total;
  std::vector<std::map<int, double>> acc(communities);
  for (std::size_t i = 0; i < g.size(); ++i) {
    int ci = comm[i];
    out.loop[ci] += g.loop[i];
    out.degree[ci] += g.degree[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (static_cast<std::size_t>(j) < i) continue;
      int cj = comm[j];
      if (ci == cj) {
        out.loop[ci] += w;
      } else {
        acc[ci][cj] += w;
        acc[cj][ci] += w;
      }
    }
  }
  for (int c = 0; c < communities; ++c) out.adj[c].assign(acc[c].begin(), acc[c].end());
  return out;
}

// Labels groups L0, L1, ... by descending size, ties by smallest member.
inline TargetGrouping label_communities(const std::vector<DomainId>& nodes, const std::vector<int>& comm) {
  std::map<int, std::vector<DomainId>> members;
  for (std::size_t i = 0; i < nodes.size(); ++i) members[comm[i]].push_back(nodes[i]);
  std::vector<std::vector<DomainId>> groups;
  for (auto& [c, m] : members) {
    std::sort(m.begin(), m.end());
    groups.push_back(std::move(m));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
  });
  std::map<DomainId, GroupId> assignment;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& d : groups[g]) assignment.emplace(d, GroupId("L" + std::to_string(g)));
  return TargetGrouping::from_assignment(assignment);
}

}  // namespace detail

// Multilevel Louvain over the symmetrized target-induced subgraph.
inline LouvainResult louvain_detailed(const WebGraphSnapshot& graph, const DomainSet& targets,
                                      const LouvainConfig& config = {}) {
  config.validate();
  if (targets.empty()) throw EmptyInput("louvain needs at least one target");
  auto u = symmetrize(graph, targets, config.binary_weights);
  const std::size_t n = u.nodes.size();

  detail::LevelGraph level;
  level.adj.resize(n);
  level.loop.assign(n, 0);
  level.degree.assign(n, 0);
  level.total = u.total;
  for (std::size_t i = 0; i < n; ++i) {
    level.adj[i].assign(u.adj[i].begin(), u.adj[i].end());
    for (const auto& kv : u.adj[i]) level.degree[i] += kv.second;
  }

  std::vector<int> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0);
  LouvainResult result;
  if (u.total > 0) {
    std::mt19937_64 rng(config.seed);
    for (int pass = 0; pass < config.max_passes; ++pass) {
      std::vector<int> comm(level.size());
      std::iota(comm.begin(), comm.end(), 0);
      bool moved = detail::local_moves(level, comm, config, rng);
      ++result.levels;
      if (!moved) break;
      int k = detail::compact(comm);
      for (int& c : node_comm) c = comm[c];
      level = detail::aggregate(level, comm, k);
    }
  }
  result.grouping = detail::label_communities(u.nodes, node_comm);
  result.modularity = modularity(graph, result.grouping, config.resolution, config.binary_weights);
  return result;
}

inline TargetGrouping louvain(const WebGraphSnapshot& graph, const DomainSet& targets, const LouvainConfig& config = {}) {
  return louvain_detailed(graph, targets, config).grouping;
}

}  // namespace webbend
