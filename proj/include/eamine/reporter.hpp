#pragma once

#include "eamine/model.hpp"
#include "eamine/observation.hpp"
#include "eamine/reasoner.hpp"
#include "eamine/store.hpp"
#include "eamine/transformer.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

struct RunInfo {
  std::string name;
  std::string timestamp;
  std::string config_digest;
  std::string target;
  std::vector<SourceDescriptor> sources;

  bool operator==(const RunInfo &) const = default;
};

struct ReportStatistics {
  std::map<std::string, std::size_t> observations_per_kind;
  std::map<std::string, std::size_t> elements_per_kind;
  std::map<std::string, std::size_t> elements_per_layer;
  std::map<std::string, std::size_t> relations_per_kind;
  std::map<std::string, std::size_t> target_elements_per_type;
  std::map<std::string, std::size_t> target_relations_per_type;
  std::size_t observations = 0;
  std::size_t elements = 0;
  std::size_t relations = 0;
  std::size_t target_elements = 0;
  std::size_t target_relations = 0;

  bool operator==(const ReportStatistics &) const = default;
};

struct DummyEntry {
  std::string elem_id;
  std::string kind;
  std::string name;
  std::string rule;

  bool operator==(const DummyEntry &) const = default;
};

/// Static reference-architecture reminder for an element kind in the model.
struct ChecklistItem {
  std::string kind;
  std::string framework;
  std::string item;

  bool operator==(const ChecklistItem &) const = default;
};

struct Report {
  inline static constexpr int kFormatVersion = 1;

  RunInfo run;
  ReportStatistics statistics;
  std::vector<Finding> findings;
  ChangeLog changelog;
  std::vector<DummyEntry> dummies;
  std::vector<std::string> unmapped_elements;
  std::vector<ChecklistItem> checklist;

  bool operator==(const Report &) const = default;
};

/// Throws IntegrityError when the inputs cannot come from one run (target
/// elements or change subjects unknown to the generic model, unmapped
/// observations unknown to the store, dummy accounting off, a finding listed
/// twice).
Report build_report(const GenericModel &model, const TargetModel &tm,
                    const std::vector<Finding> &findings, const ChangeLog &changelog,
                    const ObservationStore &store, RunInfo run);

enum class ReportFormat { markdown, structured };

std::string render_report(const Report &r, ReportFormat format);
/// Inverse of the structured rendering.
Report parse_structured_report(std::string_view text);

} // namespace eamine
