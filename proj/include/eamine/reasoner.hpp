#pragma once

#include "eamine/model.hpp"
#include "eamine/store.hpp"
#include "eamine/tables.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace eamine {

enum class Severity { info, verify, warning };
enum class FindingCategory {
  dummy_inserted,
  duplicate_merged,
  unmapped_observation,
  low_confidence,
  relation_downgraded,
};

std::string_view to_string(Severity s) noexcept;
std::string_view to_string(FindingCategory c) noexcept;
Severity severity_from_string(std::string_view s);
FindingCategory finding_category_from_string(std::string_view s);

struct Finding {
  std::string finding_id;
  Severity severity = Severity::info;
  FindingCategory category = FindingCategory::dummy_inserted;
  std::string message;
  std::string subject; // elem_id, rel_id or obs_id
  std::string rule;    // producing rule

  bool operator==(const Finding &) const = default;
};

Finding make_finding(Severity severity, FindingCategory category, std::string subject,
                     std::string message, std::string rule);

struct RuleConfig {
  int ipv4_prefix_len = 24;
  OuiTable oui_table;
  OsHeuristicTable os_port_heuristics;
  PortTable port_table;
  int dfg_edge_threshold = 1;

  /// Tables from the bundled data directory, default scalars.
  static RuleConfig bundled();
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ReasoningResult {
  GenericModel model;
  std::vector<Finding> findings;
};

/// One CommunicationNetwork per IPv4 subnet (IPv6: /64) with an association
/// from every member Node. Dummy nodes are skipped.
ReasoningResult derive_networks(GenericModel model, const RuleConfig &cfg);

/// One Path per unordered pair of Nodes seen talking in flow observations,
/// linked src -flow-> Path -flow-> dst. Unknown endpoints get a dummy Node.
ReasoningResult derive_paths(GenericModel model, const ObservationStore &store);

/// Device per Node from the OUI table (assignment Node -> Device).
ReasoningResult classify_devices(GenericModel model, const RuleConfig &cfg);

/// SystemSoftware per Node: scanner guess, else port heuristic, else a dummy
/// "unknown OS". The OS realizes the ITServices on the node's interfaces.
ReasoningResult estimate_os(GenericModel model, const RuleConfig &cfg);

/// Structural completeness rules, applied to a fixpoint:
///  (a) ITService without a realizing SystemSoftware/ApplicationComponent
///      -> dummy ApplicationComponent realizing it
///  (b) ApplicationComponent without an assigned Node -> dummy Node
///  (c) TechnologyProcess without an assigned BusinessActor/BusinessRole
///      -> dummy BusinessRole
ReasoningResult insert_dummies(GenericModel model);

/// Merges elements describing the same thing under different keys (Nodes
/// sharing an IP with at most one known MAC, then per-node Device and
/// SystemSoftware, then Paths with equal endpoints). Attributes and the name
/// come from the strongest confidence (manual, auto, semi-auto), then the most
/// authoritative source (lowest priority rank, then path). Dummies are never
/// merged.
ReasoningResult dedup_merge(GenericModel model, const ObservationStore &store);

/// Full pass: dedup, networks, paths, devices, OS, dummies, dedup. Integrity is
/// checked after every rule. Without dummies only evidence-backed elements
/// are derived, which is what a pass before manual enrichment wants.
ReasoningResult reason(GenericModel model, const ObservationStore &store, const RuleConfig &cfg,
                       bool with_dummies = true);

} // namespace eamine
