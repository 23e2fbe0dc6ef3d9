#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "webbend/analysis.hpp"
#include "webbend/diagnostics.hpp"
#include "webbend/errors.hpp"
#include "webbend/graph.hpp"
#include "webbend/grouping.hpp"
#include "webbend/ingest.hpp"
#include "webbend/metrics.hpp"
#include "webbend/report.hpp"
#include "webbend/synth.hpp"

namespace webbend {

enum class ExitCode : int { ok = 0, user_error = 1, internal_error = 2 };

enum class GroupingMode { file, louvain };

struct RunConfig {
  std::string manifest_path;
  GroupingMode grouping_mode = GroupingMode::file;
  std::optional<std::string> groups_path;   // overrides the manifest's groups file
  std::optional<std::string> targets_path;  // louvain target universe (CSV with a `domain` column)
  LouvainConfig louvain;
  std::optional<std::size_t> top_n;
  std::string output_dir = ".";
  std::set<std::string> formats{"csv", "json"};
  std::optional<std::string> t1_label;
  std::optional<std::string> t2_label;
  bool temporal = false;  // also implied by t1_label
  bool timestamp = true;
  std::optional<std::string> covariates_path;
  PValueMethod p_value_method = PValueMethod::t_approximation;

  bool wants_temporal() const { return temporal || t1_label.has_value(); }

  void validate() const {
    if (manifest_path.empty()) throw ConfigError("a manifest path is required");
    for (const auto& f : formats)
      if (f != "csv" && f != "json" && f != "dot" && f != "graphml") throw ConfigError("unknown output format '" + f + "'");
    if (top_n && *top_n < 1) throw ConfigError("top-n must be >= 1");
    louvain.validate();
    if (wants_temporal() && !t1_label)
      throw MissingSnapshot("temporal metrics requested but no t1 snapshot label given (--t1)");
    if (t1_label && t2_label && *t1_label == *t2_label) throw ConfigError("--t1 and --t2 must name different snapshots");
  }
};

// Everything loaded for one run, after grouping and optional truncation.
struct LoadedInputs {
  SnapshotManifest manifest;
  std::optional<WebGraphSnapshot> t1;
  WebGraphSnapshot t2;
  TargetGrouping grouping;
  ProfileTable profiles;
  bool grouping_from_louvain = false;
  double louvain_modularity = 0;
};

inline std::string utc_now_iso() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline LoadedInputs load_inputs(const RunConfig& cfg, Diagnostics& diag) {
  cfg.validate();
  LoadedInputs in;
  in.manifest = load_manifest(cfg.manifest_path);

  const std::string t2_label = cfg.t2_label.value_or(in.manifest.entries.back().label);
  const SnapshotEntry* t2_entry = in.manifest.find(t2_label);
  if (!t2_entry) throw MissingSnapshot("no snapshot labelled '" + t2_label + "' in manifest");
  if (cfg.t1_label && *cfg.t1_label == t2_label) throw ConfigError("t1 and t2 resolve to the same snapshot '" + t2_label + "'");
  in.t2 = load_edges(t2_entry->edges_path, t2_label, &diag);
  if (cfg.t1_label) {
    const SnapshotEntry* t1_entry = in.manifest.find(*cfg.t1_label);
    if (!t1_entry) throw MissingSnapshot("no snapshot labelled '" + *cfg.t1_label + "' in manifest");
    in.t1 = load_edges(t1_entry->edges_path, *cfg.t1_label, &diag);
  }

  if (in.manifest.profiles_path) {
    in.profiles = load_profiles(*in.manifest.profiles_path);
  } else {
    diag.warn("no_profiles", "manifest names no profile file; every negate score falls back to 1");
  }

  DomainSet universe = in.t2.domains();
  if (in.t1) universe.merge(in.t1->domains());

  const auto groups_path = cfg.groups_path ? cfg.groups_path : in.manifest.groups_path;
  if (cfg.grouping_mode == GroupingMode::file) {
    if (!groups_path) throw ConfigError("grouping mode 'file' needs a groups file (manifest 'groups' or --groups)");
    in.grouping = load_grouping(*groups_path, universe, &diag);
  } else {
    DomainSet candidates;
    if (cfg.targets_path) {
      candidates = load_target_list(*cfg.targets_path);
    } else if (groups_path) {
      candidates = load_grouping(*groups_path, universe, &diag).targets();
    } else {
      throw ConfigError("louvain grouping needs a target list (--targets, --groups or manifest 'groups')");
    }
    DomainSet connected = filter_connected_targets(in.t2, candidates);
    if (connected.size() < candidates.size())
      diag.info("targets_filtered",
                std::to_string(candidates.size() - connected.size()) + " of " + std::to_string(candidates.size()) +
                    " targets have no link to or from another target and were excluded");
    if (connected.empty()) throw ConfigError("no target has a link to or from another target; nothing to group");
    auto result = louvain_detailed(in.t2, connected, cfg.louvain);
    in.grouping = std::move(result.grouping);
    in.grouping_from_louvain = true;
    in.louvain_modularity = result.modularity;
  }

  if (cfg.top_n) {
    in.t2 = truncate_backlinks(in.t2, in.grouping.targets(), *cfg.top_n);
    if (in.t1) in.t1 = truncate_backlinks(*in.t1, in.grouping.targets(), *cfg.top_n);
  }
  return in;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FileError(p.string(), "cannot write file");
  return out;
}

inline nlohmann::ordered_json run_metadata(const RunConfig& cfg, const LoadedInputs& in, const ReportHeader& h) {
  nlohmann::ordered_json meta;
  meta["status"] = "ok";
  if (!h.generated_at.empty()) meta["generated_at"] = h.generated_at;
  meta["t1"] = in.t1 ? nlohmann::ordered_json(in.t1->label()) : nlohmann::ordered_json(nullptr);
  meta["t2"] = in.t2.label();
  meta["grouping"] = in.grouping_from_louvain ? "louvain" : "file";
  if (in.grouping_from_louvain) {
    meta["louvain"] = {{"resolution", cfg.louvain.resolution},
                       {"seed", cfg.louvain.seed},
                       {"binary_weights", cfg.louvain.binary_weights},
                       {"modularity", in.louvain_modularity}};
  }
  meta["top_n"] = cfg.top_n ? nlohmann::ordered_json(*cfg.top_n) : nlohmann::ordered_json(nullptr);
  meta["p_value_method"] = to_string(cfg.p_value_method);
  meta["targets"] = in.grouping.size();
  meta["groups"] = in.grouping.groups().size();
  return meta;
}

inline void write_diagnostics(const std::filesystem::path& dir, const nlohmann::ordered_json& meta, const Diagnostics& diag) {
  nlohmann::ordered_json j;
  j["run"] = meta;
  j["diagnostics"] = diag.to_json();
  auto out = open_output(dir / "diagnostics.json");
  out << j.dump(2) << '\n';
}

// Best effort: records the failure in the sidecar when the output directory is writable.
inline void write_failure_diagnostics(const std::string& output_dir, const Error& e, Diagnostics diag) {
  const char* code = dynamic_cast<const MissingSnapshot*>(&e)  ? "missing_snapshot"
                     : dynamic_cast<const ParseError*>(&e)     ? "parse_error"
                     : dynamic_cast<const ConfigError*>(&e)    ? "config_error"
                     : dynamic_cast<const InternalError*>(&e)  ? "internal_error"
                                                               : "input_error";
  diag.add(Severity::error, code, e.what());
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) return;
  std::ofstream out(std::filesystem::path(output_dir) / "diagnostics.json", std::ios::binary);
  if (!out) return;
  nlohmann::ordered_json j;
  j["run"] = {{"status", "failed"}};
  j["diagnostics"] = diag.to_json();
  out << j.dump(2) << '\n';
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    body();
    return static_cast<int>(ExitCode::ok);
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::internal_error);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::user_error);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::user_error);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::internal_error);
  }
}

// Range contract of every score; a violation is a bug, not bad input.
inline void check_ranges(const std::vector<MetricVector>& vectors) {
  for (const auto& v : vectors) {
    auto bad = [&](const char* name, double x) {
      throw InternalError(std::string(name) + " out of range for " + v.target.str() + ": " + format_real(x));
    };
    for (auto [name, x] : {std::pair{"back", v.back}, {"bridge", v.bridge}, {"boost", v.boost}})
      if (!(x >= 0 && x < 1)) bad(name, x);
    for (auto [name, x] : {std::pair{"build", v.build}, {"negate", v.negate}, {"narrow", v.narrow}})
      if (!(x >= 0 && x <= 1)) bad(name, x);
    if (v.neutralize && !(*v.neutralize >= 0 && *v.neutralize < 1)) bad("neutralize", *v.neutralize);
    if (v.neglect && !(*v.neglect >= 0)) bad("neglect", *v.neglect);
  }
}

struct ComputeOutputs {
  LoadedInputs inputs;
  std::vector<MetricVector> vectors;
  nlohmann::ordered_json meta;
};

inline ComputeOutputs compute_and_write(const RunConfig& cfg, Diagnostics& diag, const ReportHeader& header) {
  ComputeOutputs o{load_inputs(cfg, diag), {}, {}};
  auto& in = o.inputs;
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);

  MetricOptions opts;
  opts.temporal = cfg.wants_temporal();
  o.vectors = compute_all(in.t1 ? &*in.t1 : nullptr, in.t2, in.grouping, in.profiles, opts, &diag);
  check_ranges(o.vectors);
  auto reports = group_means(o.vectors, in.grouping);

  if (cfg.formats.count("csv")) {
    auto out = open_output(dir / "metrics.csv");
    write_metrics_csv(out, o.vectors, header);
  }
  if (cfg.formats.count("json")) {
    auto out = open_output(dir / "metrics.json");
    out << metrics_json(o.vectors, header).dump(2) << '\n';
  }
  {
    auto out = open_output(dir / "group_report.csv");
    write_group_report_csv(out, reports, header);
  }
  if (in.grouping_from_louvain) {
    auto out = open_output(dir / "grouping.csv");
    write_grouping(out, in.grouping);
  }
  if (cfg.formats.count("dot") || cfg.formats.count("graphml")) {
    auto induced = induce_target_subgraph(in.t2, in.grouping.targets());
    if (cfg.formats.count("dot")) {
      auto out = open_output(dir / "graph.dot");
      write_dot(out, induced, in.grouping);
    }
    if (cfg.formats.count("graphml")) {
      auto out = open_output(dir / "graph.graphml");
      write_graphml(out, induced, in.grouping);
    }
  }
  if (cfg.covariates_path) {
    auto covariates = load_covariates(*cfg.covariates_path);
    std::vector<CorrelationRow> rows;
    for (const auto& [name, values] : covariates) {
      for (Metric m : kAllMetrics) {
        std::vector<double> xs, ys;
        for (const auto& v : o.vectors) {
          auto x = v.get(m);
          auto it = values.find(v.target);
          if (!x || it == values.end()) continue;
          xs.push_back(*x);
          ys.push_back(it->second);
        }
        if (xs.size() < 3) {
          diag.warn("correlation_too_few_points", "fewer than 3 targets carry covariate '" + name + "'",
                    std::string(metric_name(m)));
          continue;
        }
        auto method = cfg.p_value_method;
        if (method == PValueMethod::exact_permutation && xs.size() > kMaxExactPermutationN) {
          diag.warn("exact_p_unavailable", "too many points for exact permutation; used t approximation", name);
          method = PValueMethod::t_approximation;
        }
        auto r = spearman(xs, ys, method);
        if (r.undefined)
          diag.warn("correlation_undefined", "constant input; rank correlation undefined",
                    std::string(metric_name(m)) + "/" + name);
        rows.push_back({m, name, r});
      }
    }
    auto out = open_output(dir / "correlations.csv");
    write_correlations_csv(out, rows, header);
  }
  o.meta = run_metadata(cfg, in, header);
  return o;
}

}  // namespace detail

inline int cmd_compute(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Diagnostics diag;
  return detail::guarded(err, [&] {
    ReportHeader header{cfg.timestamp ? utc_now_iso() : std::string{}};
    detail::ComputeOutputs o;
    try {
      o = detail::compute_and_write(cfg, diag, header);
    } catch (const Error& e) {
      detail::write_failure_diagnostics(cfg.output_dir, e, diag);
      throw;
    }
    detail::write_diagnostics(cfg.output_dir, o.meta, diag);
    out << "scored " << o.vectors.size() << " targets in " << o.inputs.grouping.groups().size() << " groups -> "
        << cfg.output_dir << '\n';
  });
}

struct DiffConfig {
  std::string baseline_path;
  bool baseline_normalized = false;  // skip per-metric min-max normalization of the baseline
};

inline int cmd_diff(const RunConfig& cfg, const DiffConfig& diff, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  Diagnostics diag;
  return detail::guarded(err, [&] {
    ReportHeader header{cfg.timestamp ? utc_now_iso() : std::string{}};
    if (diff.baseline_path.empty()) throw ConfigError("a baseline path is required");
    BaselineTable baseline = load_baseline(diff.baseline_path);
    if (!diff.baseline_normalized) baseline = normalize_baseline(baseline, &diag);

    auto o = detail::compute_and_write(cfg, diag, header);
    auto records = diff_records(o.vectors, baseline);
    if (records.empty()) throw Error("baseline shares no (domain, metric) cells with the computed targets");
    for (const auto& [d, row] : baseline)
      if (!o.inputs.grouping.contains(d)) diag.warn("baseline_domain_not_target", "baseline domain is not a scored target", d.str());

    auto ranked = rank_changes(mean_abs_change(o.vectors, baseline));
    const std::filesystem::path dir(cfg.output_dir);
    {
      auto f = detail::open_output(dir / "diff.csv");
      write_diff_csv(f, records, header);
    }
    {
      auto f = detail::open_output(dir / "diff_summary.csv");
      write_change_summary_csv(f, ranked, header);
    }
    o.meta["baseline"] = {{"path", std::filesystem::path(diff.baseline_path).filename().string()},
                          {"normalized_on_ingest", !diff.baseline_normalized}};
    detail::write_diagnostics(dir, o.meta, diag);
    out << records.size() << " diff records over " << ranked.size() << " targets -> " << cfg.output_dir << '\n';
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i)
      out << "  " << ranked[i].first << " mean |change| " << format_real(ranked[i].second.mean_abs_change) << '\n';
  });
}

inline int cmd_simulate(const std::string& spec_path, const std::string& output_dir, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    ScenarioSpec spec = load_scenario_spec(spec_path);
    Scenario s = generate(spec);
    write_dataset(s, output_dir);
    out << planted_summary(spec);
    out << "wrote t1.csv, t2.csv, profiles.csv, groups.csv, manifest.json -> " << output_dir << '\n';
  });
}

// Louvain grouping only; writes the grouping CSV to `output_path`, or to `out` when empty.
inline int cmd_group(RunConfig cfg, const std::string& output_path, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    cfg.grouping_mode = GroupingMode::louvain;
    Diagnostics diag;
    auto in = load_inputs(cfg, diag);
    if (output_path.empty()) {
      write_grouping(out, in.grouping);
    } else {
      auto f = detail::open_output(output_path);
      write_grouping(f, in.grouping);
      out << in.grouping.groups().size() << " communities over " << in.grouping.size()
          << " targets, modularity " << format_real(in.louvain_modularity) << " -> " << output_path << '\n';
    }
    for (const auto& d : diag.entries()) err << to_string(d.severity) << ": " << d.code << ": " << d.message << '\n';
  });
}

inline int cmd_export_graph(const RunConfig& cfg, const std::string& format, const std::string& output_path,
                            std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    if (format != "dot" && format != "graphml") throw ConfigError("export format must be 'dot' or 'graphml'");
    Diagnostics diag;
    auto in = load_inputs(cfg, diag);
    auto induced = induce_target_subgraph(in.t2, in.grouping.targets());
    auto emit = [&](std::ostream& os) {
      if (format == "dot") write_dot(os, induced, in.grouping);
      else write_graphml(os, induced, in.grouping);
    };
    if (output_path.empty()) {
      emit(out);
    } else {
      auto f = detail::open_output(output_path);
      emit(f);
    }
  });
}

}  // namespace webbend
