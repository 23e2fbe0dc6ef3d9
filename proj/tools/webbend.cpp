#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "webbend/pipeline.hpp"

namespace {

void add_run_options(CLI::App* cmd, webbend::RunConfig& cfg, std::string& grouping_mode) {
  cmd->add_option("-m,--manifest", cfg.manifest_path, "Manifest JSON naming snapshots, profiles and groups")->required();
  cmd->add_option("--grouping", grouping_mode, "Grouping source: file or louvain")
      ->check(CLI::IsMember({"file", "louvain"}));
  cmd->add_option("--groups", cfg.groups_path, "Grouping CSV (overrides the manifest)");
  cmd->add_option("--targets", cfg.targets_path, "Target list CSV with a 'domain' column (louvain mode)");
  cmd->add_option("--resolution", cfg.louvain.resolution, "Louvain resolution");
  cmd->add_option("--seed", cfg.louvain.seed, "Louvain node-order seed");
  cmd->add_option("--max-passes", cfg.louvain.max_passes, "Louvain aggregation levels");
  cmd->add_option("--min-gain", cfg.louvain.min_modularity_gain, "Louvain minimum modularity gain per sweep");
  cmd->add_flag("--binary-weights", cfg.louvain.binary_weights, "Louvain on binary adjacency instead of link volume");
  cmd->add_option("--top-n", cfg.top_n, "Keep only each target's top N backlink sources");
  cmd->add_option("--t1", cfg.t1_label, "Earlier snapshot label (enables neutralize/neglect)");
  cmd->add_option("--t2", cfg.t2_label, "Snapshot label for static metrics (default: last in manifest)");
  cmd->add_flag("--temporal", cfg.temporal, "Require temporal metrics (fails without --t1)");
  cmd->add_flag("!--no-timestamp", cfg.timestamp, "Omit the generated_at header for reproducible files");
}

webbend::GroupingMode parse_mode(const std::string& s) {
  return s == "louvain" ? webbend::GroupingMode::louvain : webbend::GroupingMode::file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"webbend: community maneuver metrics over backlink webgraphs"};
  app.require_subcommand(1);

  webbend::RunConfig cfg;
  std::string grouping_mode = "file";
  std::string formats = "csv,json";
  bool exact_p = false;

  auto* compute = app.add_subcommand("compute", "Score every target and write reports");
  add_run_options(compute, cfg, grouping_mode);
  compute->add_option("-o,--out", cfg.output_dir, "Output directory");
  compute->add_option("--format", formats, "Comma-separated: csv,json,dot,graphml");
  compute->add_option("--covariates", cfg.covariates_path, "CSV domain,covariate,value for rank correlations");
  compute->add_flag("--exact-p", exact_p, "Exact permutation p-values (n <= 10)");

  webbend::DiffConfig diff_cfg;
  auto* diff = app.add_subcommand("diff", "Compare computed scores against a baseline table");
  add_run_options(diff, cfg, grouping_mode);
  diff->add_option("-o,--out", cfg.output_dir, "Output directory");
  diff->add_option("--format", formats, "Comma-separated: csv,json,dot,graphml");
  diff->add_option("-b,--baseline", diff_cfg.baseline_path, "Baseline CSV domain,metric,value")->required();
  diff->add_flag("--baseline-normalized", diff_cfg.baseline_normalized,
                 "Baseline already lies in [0,1]; skip per-metric min-max normalization");

  std::string spec_path, sim_out = ".";
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario dataset");
  simulate->add_option("-s,--spec", spec_path, "Scenario spec JSON")->required();
  simulate->add_option("-o,--out", sim_out, "Output directory");

  std::string group_out;
  auto* group = app.add_subcommand("group", "Louvain grouping of connected targets; emits grouping CSV");
  add_run_options(group, cfg, grouping_mode);
  group->add_option("-o,--out", group_out, "Grouping CSV path (default: stdout)");

  std::string export_format = "dot", export_out;
  auto* export_graph = app.add_subcommand("export-graph", "Export the target-induced subgraph");
  add_run_options(export_graph, cfg, grouping_mode);
  export_graph->add_option("--format", export_format, "dot or graphml")->check(CLI::IsMember({"dot", "graphml"}));
  export_graph->add_option("-o,--out", export_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  cfg.grouping_mode = parse_mode(grouping_mode);
  cfg.p_value_method = exact_p ? webbend::PValueMethod::exact_permutation : webbend::PValueMethod::t_approximation;
  cfg.formats.clear();
  std::stringstream ss(formats);
  for (std::string f; std::getline(ss, f, ',');)
    if (!f.empty()) cfg.formats.insert(f);

  if (*compute) return webbend::cmd_compute(cfg);
  if (*diff) return webbend::cmd_diff(cfg, diff_cfg);
  if (*simulate) return webbend::cmd_simulate(spec_path, sim_out);
  if (*group) return webbend::cmd_group(cfg, group_out);
  if (*export_graph) return webbend::cmd_export_graph(cfg, export_format, export_out);
  return 1;
}
