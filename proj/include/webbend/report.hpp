#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "webbend/analysis.hpp"
#include "webbend/csv.hpp"
#include "webbend/graph.hpp"
#include "webbend/metric_kind.hpp"
#include "webbend/metrics.hpp"

namespace webbend {

// Shortest-ish stable text for report cells.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Optional first line of every text report; omitted when empty.
struct ReportHeader {
  std::string generated_at;
};

inline void write_comment_header(std::ostream& os, const ReportHeader& h) {
  if (!h.generated_at.empty()) os << "# generated_at " << h.generated_at << '\n';
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricVector>& vectors, const ReportHeader& h = {}) {
  write_comment_header(os, h);
  os << "domain";
  for (Metric m : kAllMetrics) os << ',' << metric_name(m);
  os << '\n';
  for (const auto& v : vectors) {
    os << csv::escape(v.target.str());
    for (Metric m : kAllMetrics) {
      os << ',';
      if (auto x = v.get(m)) os << format_real(*x);
    }
    os << '\n';
  }
}

inline nlohmann::ordered_json metrics_json(const std::vector<MetricVector>& vectors, const ReportHeader& h = {}) {
  nlohmann::ordered_json j;
  if (!h.generated_at.empty()) j["generated_at"] = h.generated_at;
  j["sites"] = nlohmann::ordered_json::array();
  for (const auto& v : vectors) {
    nlohmann::ordered_json row;
    row["domain"] = v.target.str();
    for (Metric m : kAllMetrics) {
      auto x = v.get(m);
      row[std::string(metric_name(m))] = x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
    }
    row["provenance"] = {{"t1", v.t1_label.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v.t1_label)},
                         {"t2", v.t2_label}};
    row["flags"] = {{"negate_no_rated_backlinks", v.negate_no_rated_backlinks},
                    {"negate_coverage", v.negate_coverage},
                    {"narrow_empty_backlinks", v.narrow_empty_backlinks},
                    {"neglect_zero_t2_total", v.neglect_zero_t2_total}};
    j["sites"].push_back(std::move(row));
  }
  return j;
}

inline void write_group_report_csv(std::ostream& os, const std::vector<GroupReport>& reports, const ReportHeader& h = {}) {
  write_comment_header(os, h);
  os << "group,metric,mean,stddev,n\n";
  for (const auto& r : reports)
    for (Metric m : kAllMetrics) {
      const auto& s = r.stats.at(m);
      os << csv::escape(r.group.str()) << ',' << metric_name(m) << ',';
      if (s.available()) os << format_real(s.mean) << ',' << format_real(s.stddev);
      else os << ',';
      os << ',' << s.n << '\n';
    }
}

inline void write_diff_csv(std::ostream& os, const std::vector<DiffRecord>& records, const ReportHeader& h = {}) {
  write_comment_header(os, h);
  os << "domain,metric,new,baseline,diff\n";
  for (const auto& r : records)
    os << csv::escape(r.target.str()) << ',' << metric_name(r.metric) << ',' << format_real(r.new_value) << ','
       << format_real(r.baseline_value) << ',' << format_real(r.difference) << '\n';
}

inline void write_change_summary_csv(std::ostream& os, const std::vector<std::pair<DomainId, ChangeSummary>>& ranked,
                                     const ReportHeader& h = {}) {
  write_comment_header(os, h);
  os << "domain,mean_abs_change,n\n";
  for (const auto& [d, s] : ranked) os << csv::escape(d.str()) << ',' << format_real(s.mean_abs_change) << ',' << s.n << '\n';
}

struct CorrelationRow {
  Metric metric;
  std::string covariate;
  SpearmanResult result;
};

inline void write_correlations_csv(std::ostream& os, const std::vector<CorrelationRow>& rows, const ReportHeader& h = {}) {
  write_comment_header(os, h);
  os << "metric,covariate,rho,p_value,n,method,undefined\n";
  for (const auto& r : rows)
    os << metric_name(r.metric) << ',' << csv::escape(r.covariate) << ',' << format_real(r.result.rho) << ','
       << format_real(r.result.p_value) << ',' << r.result.n << ',' << to_string(r.result.method) << ','
       << (r.result.undefined ? "true" : "false") << '\n';
}

inline const std::string& group_color(std::size_t index) {
  static const std::vector<std::string> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[index % palette.size()];
}

namespace detail {

inline std::map<GroupId, std::size_t> group_indices(const TargetGrouping& grouping) {
  std::map<GroupId, std::size_t> idx;
  for (const auto& kv : grouping.groups()) idx.emplace(kv.first, idx.size());
  return idx;
}

// Edge width grows with the log of link volume.
inline double edge_width(LinkCount links) { return 1.0 + std::log(static_cast<double>(links)); }

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace detail

// DOT rendering of the target-induced subgraph, nodes colored by group.
inline void write_dot(std::ostream& os, const WebGraphSnapshot& induced, const TargetGrouping& grouping) {
  auto idx = detail::group_indices(grouping);
  os << "digraph webgraph {\n  node [style=filled];\n";
  for (const auto& [d, g] : grouping.assignment())
    os << "  " << detail::dot_quote(d.str()) << " [group=" << detail::dot_quote(g.str())
       << ", fillcolor=" << detail::dot_quote(group_color(idx.at(g))) << "];\n";
  for (const auto& e : induced.edges())
    os << "  " << detail::dot_quote(e.source.str()) << " -> " << detail::dot_quote(e.target.str())
       << " [links=" << e.links << ", penwidth=" << format_real(detail::edge_width(e.links)) << "];\n";
  os << "}\n";
}

inline void write_graphml(std::ostream& os, const WebGraphSnapshot& induced, const TargetGrouping& grouping) {
  auto idx = detail::group_indices(grouping);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"group\" for=\"node\" attr.name=\"group\" attr.type=\"string\"/>\n"
        "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n"
        "  <key id=\"links\" for=\"edge\" attr.name=\"links\" attr.type=\"long\"/>\n"
        "  <key id=\"width\" for=\"edge\" attr.name=\"width\" attr.type=\"double\"/>\n"
        "  <graph id=\"webgraph\" edgedefault=\"directed\">\n";
  for (const auto& [d, g] : grouping.assignment())
    os << "    <node id=\"" << detail::xml_escape(d.str()) << "\"><data key=\"group\">" << detail::xml_escape(g.str())
       << "</data><data key=\"color\">" << group_color(idx.at(g)) << "</data></node>\n";
  std::size_t n = 0;
  for (const auto& e : induced.edges())
    os << "    <edge id=\"e" << n++ << "\" source=\"" << detail::xml_escape(e.source.str()) << "\" target=\""
       << detail::xml_escape(e.target.str()) << "\"><data key=\"links\">" << e.links << "</data><data key=\"width\">"
       << format_real(detail::edge_width(e.links)) << "</data></edge>\n";
  os << "  </graph>\n</graphml>\n";
}

}  // namespace webbend
