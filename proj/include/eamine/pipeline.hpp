#pragma once

#include "eamine/ingest.hpp"
#include "eamine/model.hpp"
#include "eamine/reasoner.hpp"
#include "eamine/reporter.hpp"
#include "eamine/store.hpp"
#include "eamine/transformer.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

struct MetamodelFiles {
  std::string metamodel;
  std::string rules;

  bool operator==(const MetamodelFiles &) const = default;
};

/// One run, read from a single JSON document:
///
///   { "name": "netinvm",
///     "sources": [ {"path", "adapter", "priority"?, "agent_ip"?} ],
///     "rules": { "ipv4_prefix_len"?, "dfg_edge_threshold"?, "oui_table"?,
///                "os_heuristics"?, "port_table"?, "snmp_account_oids"? }?,
///     "target": "archimate-3"?,
///     "metamodels": { name: {"metamodel", "rules"} }?,
///     "catalogue"?, "enrichment"?, "output_dir"?, "run_timestamp"? }
///
/// Relative paths resolve against the directory holding the config. Tables
/// and metamodels default to the bundled data directory.
struct RunConfig {
  std::string name = "eamine";
  std::vector<SourceDescriptor> sources;
  RuleConfig rules;
  IngestOptions ingest;
  std::string target = "archimate-3";
  std::map<std::string, MetamodelFiles> metamodels;
  std::string catalogue; // empty: built-in catalogue
  std::string enrichment;
  std::string output_dir = ".";
  std::string run_timestamp;
  std::string digest; // of the config text
};

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(std::string_view text, const std::string &base_dir);
RunConfig load_run_config(const std::string &path);

/// $EAMINE_CONFIG, or empty.
std::string default_config_path();

enum class Stage { ingest, build, transform, export_models, report, all };

struct PipelineResult {
  ObservationStore store;
  GenericModel model;
  std::vector<Finding> findings;
  std::optional<GenerateResult> target;
  std::optional<Report> report;
};

/// Runs every stage up to and including `last` in memory. Nothing is written.
PipelineResult run_stages(const RunConfig &cfg, Stage last);

/// File name -> content of the artifacts `last` produces.
std::map<std::string, std::string> render_artifacts(const RunConfig &cfg,
                                                    const PipelineResult &result, Stage last);

/// Writes all files to temporaries inside `dir` and renames them only once
/// every write succeeded. On failure no artifact is left behind.
void commit_artifacts(const std::string &dir, const std::map<std::string, std::string> &files);

/// Debug dump of a generic model (elements and relations in id order).
std::string model_to_json(const GenericModel &model);

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarnings = 1;
inline constexpr int kExitFatal = 2;

/// Full run: computes, writes artifacts, and returns the exit status. Fatal
/// errors are reported on `err` and yield kExitFatal with nothing written.
int run_pipeline(const RunConfig &cfg, Stage last, bool strict, std::ostream &out,
                 std::ostream &err);

} // namespace eamine
