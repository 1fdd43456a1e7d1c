#pragma once

#include "eamine/model.hpp"
#include "eamine/observation.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eamine {

/// Directly-follows graph of one event log.
struct DirectlyFollowsGraph {
  std::set<std::string> activities;
  std::map<std::pair<std::string, std::string>, int> edges;
  std::map<std::string, int> start_acts;
  std::map<std::string, int> end_acts;
  std::map<std::string, int> occurrences;
  std::size_t cases = 0;
  /// obs_ids of the events behind each activity
  std::map<std::string, std::vector<std::string>> evidence;

  bool operator==(const DirectlyFollowsGraph &) const = default;
};

/// Groups events by case_id, orders each case by (timestamp, input position)
/// and counts adjacent pairs. Non process-event observations are ignored.
DirectlyFollowsGraph build_dfg(const std::vector<Observation> &events);

struct MinedElements {
  std::vector<GenericElement> elements;
  std::vector<GenericRelation> relations;
};

/// TechnologyProcess for the log, a TechnologyFunction per activity
/// (composed into the process), a flow per edge with frequency >= threshold,
/// and start/end TechnologyEvents flowing into/out of their functions.
/// Self-loops become the function's `repeat_frequency` attribute. Everything
/// is semi-auto. An empty graph yields nothing.
MinedElements dfg_to_elements(const DirectlyFollowsGraph &dfg, int threshold,
                              std::string_view log_name);

/// Adds mined elements and relations to a model.
void attach_mined(GenericModel &model, const MinedElements &mined);

/// Process events grouped by their `log` attribute, in first-seen order.
std::vector<std::pair<std::string, std::vector<Observation>>>
events_by_log(const std::vector<Observation> &observations);

} // namespace eamine
