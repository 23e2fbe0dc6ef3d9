#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "webbend/csv.hpp"
#include "webbend/diagnostics.hpp"
#include "webbend/graph.hpp"
#include "webbend/metric_kind.hpp"

namespace webbend {

struct SnapshotEntry {
  std::string label;
  std::string edges_path;
};

struct SnapshotManifest {
  std::vector<SnapshotEntry> entries;
  std::optional<std::string> profiles_path;
  std::optional<std::string> groups_path;

  const SnapshotEntry* find(const std::string& label) const {
    for (const auto& e : entries)
      if (e.label == label) return &e;
    return nullptr;
  }
};

using BaselineTable = std::map<DomainId, std::map<Metric, double>>;

namespace detail {

template <typename Int>
std::optional<Int> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline DomainId parse_domain(const csv::Table& t, const csv::Record& r, std::size_t col) {
  try {
    return DomainId(r.fields[col]);
  } catch (const InvalidDomain& e) {
    throw ParseError(t.source, r.row, e.what());
  }
}

inline void require_fields(const csv::Table& t, const csv::Record& r, std::size_t n) {
  if (r.fields.size() < n)
    throw ParseError(t.source, r.row, "expected " + std::to_string(n) + " fields, got " + std::to_string(r.fields.size()));
}

}  // namespace detail

// Edge CSV `source,target,links`. Domains are normalized, duplicate pairs summed,
// self-links dropped with a warning.
inline WebGraphSnapshot parse_edges(const csv::Table& t, std::string label, Diagnostics* diag = nullptr) {
  csv::expect_header(t, {"source", "target", "links"});
  SnapshotBuilder builder(std::move(label));
  for (const auto& r : t.records) {
    detail::require_fields(t, r, 3);
    DomainId src = detail::parse_domain(t, r, 0);
    DomainId dst = detail::parse_domain(t, r, 1);
    auto count = detail::parse_int<LinkCount>(r.fields[2]);
    if (!count) throw ParseError(t.source, r.row, "link count is not a non-negative integer: '" + r.fields[2] + "'");
    if (*count < 1) throw ParseError(t.source, r.row, "link count must be >= 1");
    if (!builder.add(src, dst, *count) && diag)
      diag->warn("self_loop_dropped", "self-link dropped", src.str(), r.row);
  }
  return std::move(builder).build();
}

inline WebGraphSnapshot load_edges(const std::string& path, std::string label = {}, Diagnostics* diag = nullptr) {
  return parse_edges(csv::read_file(path), std::move(label), diag);
}

inline ProfileTable parse_profiles(const csv::Table& t) {
  csv::expect_header(t, {"domain", "domain_rating"});
  ProfileTable out;
  for (const auto& r : t.records) {
    detail::require_fields(t, r, 1);
    DomainId d = detail::parse_domain(t, r, 0);
    std::optional<int> rating;
    if (r.fields.size() > 1 && !r.fields[1].empty()) {
      rating = detail::parse_int<int>(r.fields[1]);
      if (!rating) throw ParseError(t.source, r.row, "domain rating is not an integer: '" + r.fields[1] + "'");
      if (*rating < 0 || *rating > 100)
        throw ParseError(t.source, r.row, "domain rating out of range [0,100]: " + r.fields[1]);
    }
    if (out.count(d)) throw DuplicateDomain(t.source + ":" + std::to_string(r.row) + ": duplicate domain " + d.str());
    out.emplace(d, DomainProfile(d, rating));
  }
  return out;
}

inline ProfileTable load_profiles(const std::string& path) { return parse_profiles(csv::read_file(path)); }

// Grouping CSV `domain,group`. Targets outside a non-empty `universe` are kept but warned about.
inline TargetGrouping parse_grouping(const csv::Table& t, const DomainSet& universe = {}, Diagnostics* diag = nullptr) {
  csv::expect_header(t, {"domain", "group"});
  std::map<DomainId, GroupId> assignment;
  for (const auto& r : t.records) {
    detail::require_fields(t, r, 2);
    DomainId d = detail::parse_domain(t, r, 0);
    if (r.fields[1].empty()) throw ParseError(t.source, r.row, "empty group label");
    GroupId g(r.fields[1]);
    auto [it, inserted] = assignment.emplace(d, g);
    if (!inserted) {
      if (it->second != g)
        throw DuplicateTarget(t.source + ":" + std::to_string(r.row) + ": " + d.str() + " assigned to both " +
                              it->second.str() + " and " + g.str());
      if (diag) diag->warn("duplicate_grouping_row", "repeated grouping row", d.str(), r.row);
      continue;
    }
    if (!universe.empty() && !universe.count(d) && diag)
      diag->warn("target_not_in_graph", "target does not appear in any snapshot", d.str(), r.row);
  }
  if (assignment.empty()) throw ParseError(t.source, 0, "grouping lists no targets");
  return TargetGrouping::from_assignment(assignment);
}

inline TargetGrouping load_grouping(const std::string& path, const DomainSet& universe = {},
                                    Diagnostics* diag = nullptr) {
  return parse_grouping(csv::read_file(path), universe, diag);
}

// Plain target list: a CSV whose first column is `domain`.
inline DomainSet load_target_list(const std::string& path) {
  auto t = csv::read_file(path);
  csv::expect_header(t, {"domain"});
  DomainSet out;
  for (const auto& r : t.records) out.insert(detail::parse_domain(t, r, 0));
  if (out.empty()) throw ParseError(path, 0, "target list is empty");
  return out;
}

// Baseline CSV `domain,metric,value`.
inline BaselineTable parse_baseline(const csv::Table& t) {
  csv::expect_header(t, {"domain", "metric", "value"});
  BaselineTable out;
  for (const auto& r : t.records) {
    detail::require_fields(t, r, 3);
    DomainId d = detail::parse_domain(t, r, 0);
    auto m = parse_metric(r.fields[1]);
    if (!m) throw ParseError(t.source, r.row, "unknown metric '" + r.fields[1] + "'");
    auto v = detail::parse_real(r.fields[2]);
    if (!v) throw ParseError(t.source, r.row, "value is not a number: '" + r.fields[2] + "'");
    if (!out[d].emplace(*m, *v).second)
      throw ParseError(t.source, r.row, "duplicate baseline cell " + d.str() + "/" + r.fields[1]);
  }
  return out;
}

inline BaselineTable load_baseline(const std::string& path) { return parse_baseline(csv::read_file(path)); }

// External covariates for rank correlation, CSV `domain,covariate,value`; keyed by covariate name.
using CovariateTable = std::map<std::string, std::map<DomainId, double>>;

inline CovariateTable parse_covariates(const csv::Table& t) {
  csv::expect_header(t, {"domain", "covariate", "value"});
  CovariateTable out;
  for (const auto& r : t.records) {
    detail::require_fields(t, r, 3);
    DomainId d = detail::parse_domain(t, r, 0);
    if (r.fields[1].empty()) throw ParseError(t.source, r.row, "empty covariate name");
    auto v = detail::parse_real(r.fields[2]);
    if (!v) throw ParseError(t.source, r.row, "value is not a number: '" + r.fields[2] + "'");
    if (!out[r.fields[1]].emplace(d, *v).second)
      throw ParseError(t.source, r.row, "duplicate covariate cell " + d.str() + "/" + r.fields[1]);
  }
  return out;
}

inline CovariateTable load_covariates(const std::string& path) { return parse_covariates(csv::read_file(path)); }

// Manifest JSON; relative paths resolve against the manifest's directory.
inline SnapshotManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                       const std::string& source = "manifest") {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_absolute() ? path : base_dir / path).lexically_normal().string();
  };
  SnapshotManifest m;
  try {
    if (!j.is_object() || !j.contains("snapshots") || !j["snapshots"].is_array())
      throw ParseError(source, 0, "manifest needs a 'snapshots' array");
    for (const auto& s : j["snapshots"]) {
      std::string label = s.at("label").get<std::string>();
      if (label.empty()) throw ParseError(source, 0, "snapshot label is empty");
      if (m.find(label)) throw ParseError(source, 0, "duplicate snapshot label '" + label + "'");
      m.entries.push_back({label, resolve(s.at("edges").get<std::string>())});
    }
    if (j.contains("profiles") && !j["profiles"].is_null()) m.profiles_path = resolve(j["profiles"].get<std::string>());
    if (j.contains("groups") && !j["groups"].is_null()) m.groups_path = resolve(j["groups"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("invalid manifest: ") + e.what());
  }
  if (m.entries.empty()) throw ParseError(source, 0, "manifest lists no snapshots");
  return m;
}

inline SnapshotManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
  }
  return parse_manifest(j, std::filesystem::path(path).parent_path(), path);
}

// Keeps, for each target, only its top_n sources by volume (ties: smaller domain first).
// Edges into non-targets are untouched.
inline WebGraphSnapshot truncate_backlinks(const WebGraphSnapshot& graph, const DomainSet& targets, std::size_t top_n) {
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  SnapshotBuilder b(graph.label());
  for (const auto& e : graph.edges())
    if (!targets.count(e.target)) b.add(e.source, e.target, e.links);
  for (const auto& t : targets) {
    std::vector<std::pair<DomainId, LinkCount>> srcs(graph.in_links(t).begin(), graph.in_links(t).end());
    std::stable_sort(srcs.begin(), srcs.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (srcs.size() > top_n) srcs.resize(top_n);
    for (const auto& [s, n] : srcs) b.add(s, t, n);
  }
  return std::move(b).build();
}

inline void write_edges(std::ostream& os, const WebGraphSnapshot& g) {
  os << "source,target,links\n";
  for (const auto& e : g.edges()) os << csv::escape(e.source.str()) << ',' << csv::escape(e.target.str()) << ',' << e.links << '\n';
}

inline void write_profiles(std::ostream& os, const ProfileTable& profiles) {
  os << "domain,domain_rating\n";
  for (const auto& [d, p] : profiles) {
    os << csv::escape(d.str()) << ',';
    if (p.domain_rating) os << *p.domain_rating;
    os << '\n';
  }
}

inline void write_grouping(std::ostream& os, const TargetGrouping& g) {
  os << "domain,group\n";
  for (const auto& [d, grp] : g.assignment()) os << csv::escape(d.str()) << ',' << csv::escape(grp.str()) << '\n';
}

}  // namespace webbend
