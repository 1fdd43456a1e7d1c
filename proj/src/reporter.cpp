#include "eamine/reporter.hpp"

#include "eamine/error.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace eamine {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ChecklistRow {
  std::string_view kind;
  std::string_view framework;
  std::string_view item;
};

// Reference-architecture reminders keyed by generic element kind.
constexpr ChecklistRow kChecklist[] = {
    {kind::Node, "FitSM", "Record each node as a configuration item with an owner."},
    {kind::Device, "FitSM", "Reconcile device classifications with the hardware inventory."},
    {kind::SystemSoftware, "ITIL", "Check detected OS versions against the supported baseline."},
    {kind::ITService, "ITIL",
     "Add each technology service to the service catalogue with an owner and service level."},
    {kind::ApplicationInterface, "ArchiMate application pattern",
     "Link every interface to the application component that offers it."},
    {kind::ApplicationComponent, "ArchiMate application pattern",
     "Confirm each component realizes a service and is hosted on a node."},
    {kind::ApplicationCollaboration, "ArchiMate application pattern",
     "Name the collaborating components and their shared interaction."},
    {kind::CommunicationNetwork, "FitSM", "Document each network zone and its permitted traffic."},
    {kind::Path, "FitSM", "Confirm observed connections match the zoning policy."},
    {kind::TechnologyProcess, "IT4IT",
     "Map mined processes to a value stream functional component."},
    {kind::TechnologyFunction, "IT4IT", "Review mined functions for business-level promotion."},
    {kind::TechnologyEvent, "IT4IT", "Confirm start and end events of mined processes."},
    {kind::BusinessActor, "ITIL", "Verify account owners with the identity management owner."},
    {kind::BusinessRole, "ITIL", "Assign an accountable role to every process."},
};

json finding_to_json(const Finding &f) {
  return {{"finding_id", f.finding_id},
          {"severity", std::string(to_string(f.severity))},
          {"category", std::string(to_string(f.category))},
          {"message", f.message},
          {"subject", f.subject},
          {"rule", f.rule}};
}

Finding finding_from_json(const json &j) {
  Finding f;
  f.finding_id = j.at("finding_id").get<std::string>();
  f.severity = severity_from_string(j.at("severity").get<std::string>());
  f.category = finding_category_from_string(j.at("category").get<std::string>());
  f.message = j.at("message").get<std::string>();
  f.subject = j.at("subject").get<std::string>();
  f.rule = j.at("rule").get<std::string>();
  return f;
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|')
      out += "\\|";
    else if (c == '\n')
      out += ' ';
    else
      out += c;
  }
  return out;
}

void md_counts(std::ostringstream &o, std::string_view title, std::string_view col,
               const std::map<std::string, std::size_t> &counts) {
  o << "### " << title << "\n\n";
  if (counts.empty()) {
    o << "_none_\n\n";
    return;
  }
  o << "| " << col << " | count |\n|---|---:|\n";
  for (const auto &[k, v] : counts)
    o << "| " << md_cell(k) << " | " << v << " |\n";
  o << "\n";
}

} // namespace

Report build_report(const GenericModel &model, const TargetModel &tm,
                    const std::vector<Finding> &findings, const ChangeLog &changelog,
                    const ObservationStore &store, RunInfo run) {
  Report r;
  r.run = std::move(run);
  r.run.target = tm.metamodel_name;
  const auto cat = Catalogue::builtin();

  std::set<std::string> obs_ids;
  for (const auto &o : store.observations()) {
    ++r.statistics.observations_per_kind[std::string(to_string(o.kind))];
    obs_ids.insert(o.obs_id);
  }
  r.statistics.observations = obs_ids.size();
  for (const auto &[id, e] : model.elements) {
    ++r.statistics.elements_per_kind[e.kind];
    if (cat.contains(e.kind))
      ++r.statistics.elements_per_layer[std::string(to_string(*cat.lookup_kind(e.kind).layer))];
  }
  for (const auto &[id, rel] : model.relations)
    ++r.statistics.relations_per_kind[std::string(to_string(rel.kind))];
  for (const auto &[id, e] : tm.elements) {
    if (!model.get(e.generic_id))
      throw IntegrityError("report inputs disagree: target element " + id +
                           " has no generic counterpart");
    ++r.statistics.target_elements_per_type[e.type];
  }
  for (const auto &[id, rel] : tm.relations) {
    if (!model.relations.count(rel.generic_id))
      throw IntegrityError("report inputs disagree: target relation " + id +
                           " has no generic counterpart");
    ++r.statistics.target_relations_per_type[rel.type];
  }
  r.statistics.elements = model.elements.size();
  r.statistics.relations = model.relations.size();
  r.statistics.target_elements = tm.elements.size();
  r.statistics.target_relations = tm.relations.size();

  std::set<std::string> seen;
  std::size_t dummy_findings = 0;
  for (const auto &f : findings) {
    if (!seen.insert(f.finding_id).second)
      throw IntegrityError("finding " + f.finding_id + " reported twice");
    if (f.category == FindingCategory::dummy_inserted) {
      ++dummy_findings;
      if (!model.get(f.subject))
        throw IntegrityError("report inputs disagree: dummy " + f.subject + " not in model");
    }
    if (f.category == FindingCategory::unmapped_observation && !obs_ids.count(f.subject))
      throw IntegrityError("report inputs disagree: observation " + f.subject + " not in store");
  }
  r.findings = findings;

  for (const auto &c : changelog.entries) {
    if (!model.get(c.subject) && !model.relations.count(c.subject))
      throw IntegrityError("report inputs disagree: change subject " + c.subject +
                           " not in model");
    if (c.action == ChangeAction::dropped && model.get(c.subject))
      r.unmapped_elements.push_back(c.subject);
  }
  r.changelog = changelog;

  for (const auto &[id, e] : model.elements) {
    if (!e.dummy)
      continue;
    const auto rule = e.attrs.find("dummy_rule");
    r.dummies.push_back({id, e.kind, e.name, rule == e.attrs.end() ? "" : rule->second});
  }
  if (r.dummies.size() != dummy_findings)
    throw IntegrityError("dummy register has " + std::to_string(r.dummies.size()) +
                         " entries but " + std::to_string(dummy_findings) +
                         " dummy-inserted findings were raised");

  for (const auto &row : kChecklist)
    if (r.statistics.elements_per_kind.count(std::string(row.kind)))
      r.checklist.push_back(
          {std::string(row.kind), std::string(row.framework), std::string(row.item)});
  return r;
}

namespace {

std::string render_markdown(const Report &r) {
  std::ostringstream o;
  o << "# EA model mining report: " << r.run.name << "\n\n";
  o << "## Run\n\n"
    << "- Timestamp: " << r.run.timestamp << "\n"
    << "- Config digest: `" << r.run.config_digest << "`\n"
    << "- Target metamodel: " << r.run.target << "\n"
    << "- Sources:\n";
  if (r.run.sources.empty())
    o << "  - _none_\n";
  for (const auto &s : r.run.sources)
    o << "  - `" << s.path << "` (" << to_string(s.adapter) << ", priority " << s.priority
      << ")\n";

  const auto &st = r.statistics;
  o << "\n## Statistics\n\n"
    << "- Observations: " << st.observations << "\n"
    << "- Generic elements: " << st.elements << "\n"
    << "- Generic relations: " << st.relations << "\n"
    << "- Target elements: " << st.target_elements << "\n"
    << "- Target relations: " << st.target_relations << "\n\n";
  md_counts(o, "Observations per kind", "kind", st.observations_per_kind);
  md_counts(o, "Generic elements per layer", "layer", st.elements_per_layer);
  md_counts(o, "Generic elements per kind", "kind", st.elements_per_kind);
  md_counts(o, "Generic relations per kind", "kind", st.relations_per_kind);
  md_counts(o, "Target elements per type", "type", st.target_elements_per_type);
  md_counts(o, "Target relations per type", "type", st.target_relations_per_type);

  o << "## Dummy objects for verification (" << r.dummies.size() << ")\n\n";
  if (r.dummies.empty())
    o << "_none_\n";
  for (const auto &d : r.dummies)
    o << "- `" << d.elem_id << "` " << d.kind << " **" << d.name << "** (rule " << d.rule
      << ")\n";

  o << "\n## Findings (" << r.findings.size() << ")\n\n";
  if (r.findings.empty()) {
    o << "_none_\n";
  } else {
    o << "| severity | category | subject | message |\n|---|---|---|---|\n";
    for (const auto &f : r.findings)
      o << "| " << to_string(f.severity) << " | " << to_string(f.category) << " | `"
        << f.subject << "` | " << md_cell(f.message) << " |\n";
  }

  o << "\n## Model changes (" << r.changelog.entries.size() << ")\n\n";
  if (r.changelog.entries.empty()) {
    o << "_none_\n";
  } else {
    o << "| action | subject | detail |\n|---|---|---|\n";
    for (const auto &c : r.changelog.entries)
      o << "| " << to_string(c.action) << " | `" << c.subject << "` | " << md_cell(c.detail)
        << " |\n";
  }

  o << "\n## Unmapped elements (" << r.unmapped_elements.size() << ")\n\n";
  if (r.unmapped_elements.empty())
    o << "_none_\n";
  for (const auto &u : r.unmapped_elements)
    o << "- `" << u << "`\n";

  o << "\n## Reference architecture checklist\n\n";
  if (r.checklist.empty())
    o << "_none_\n";
  for (const auto &c : r.checklist)
    o << "- [ ] " << c.kind << " (" << c.framework << "): " << c.item << "\n";
  return o.str();
}

json to_json(const Report &r) {
  json sources = json::array();
  for (const auto &s : r.run.sources) {
    json j{{"path", s.path}, {"adapter", std::string(to_string(s.adapter))},
           {"priority", s.priority}};
    if (!s.agent_ip.empty())
      j["agent_ip"] = s.agent_ip;
    sources.push_back(j);
  }
  const auto &st = r.statistics;
  json findings = json::array();
  for (const auto &f : r.findings)
    findings.push_back(finding_to_json(f));
  json changes = json::array();
  for (const auto &c : r.changelog.entries)
    changes.push_back(
        {{"action", std::string(to_string(c.action))}, {"subject", c.subject}, {"detail", c.detail}});
  json dummies = json::array();
  for (const auto &d : r.dummies)
    dummies.push_back({{"elem_id", d.elem_id}, {"kind", d.kind}, {"name", d.name}, {"rule", d.rule}});
  json checklist = json::array();
  for (const auto &c : r.checklist)
    checklist.push_back({{"kind", c.kind}, {"framework", c.framework}, {"item", c.item}});
  return {
      {"format", "eamine-report"},
      {"version", Report::kFormatVersion},
      {"run",
       {{"name", r.run.name},
        {"timestamp", r.run.timestamp},
        {"config_digest", r.run.config_digest},
        {"target", r.run.target},
        {"sources", sources}}},
      {"statistics",
       {{"observations_per_kind", st.observations_per_kind},
        {"elements_per_kind", st.elements_per_kind},
        {"elements_per_layer", st.elements_per_layer},
        {"relations_per_kind", st.relations_per_kind},
        {"target_elements_per_type", st.target_elements_per_type},
        {"target_relations_per_type", st.target_relations_per_type},
        {"observations", st.observations},
        {"elements", st.elements},
        {"relations", st.relations},
        {"target_elements", st.target_elements},
        {"target_relations", st.target_relations}}},
      {"findings", findings},
      {"changelog", changes},
      {"dummies", dummies},
      {"unmapped_elements", r.unmapped_elements},
      {"checklist", checklist},
  };
}

} // namespace

std::string render_report(const Report &r, ReportFormat format) {
  if (format == ReportFormat::markdown)
    return render_markdown(r);
  return to_json(r).dump(2) + "\n";
}

Report parse_structured_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ParseError(std::string("structured report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "eamine-report" || j.at("version") != Report::kFormatVersion)
      throw ParseError("not a version " + std::to_string(Report::kFormatVersion) +
                       " structured report");
    Report r;
    const auto &run = j.at("run");
    r.run.name = run.at("name").get<std::string>();
    r.run.timestamp = run.at("timestamp").get<std::string>();
    r.run.config_digest = run.at("config_digest").get<std::string>();
    r.run.target = run.at("target").get<std::string>();
    for (const auto &s : run.at("sources")) {
      SourceDescriptor d;
      d.path = s.at("path").get<std::string>();
      d.adapter = adapter_from_string(s.at("adapter").get<std::string>());
      d.priority = s.at("priority").get<int>();
      d.agent_ip = s.value("agent_ip", "");
      r.run.sources.push_back(std::move(d));
    }
    const auto &st = j.at("statistics");
    using Counts = std::map<std::string, std::size_t>;
    r.statistics.observations_per_kind = st.at("observations_per_kind").get<Counts>();
    r.statistics.elements_per_kind = st.at("elements_per_kind").get<Counts>();
    r.statistics.elements_per_layer = st.at("elements_per_layer").get<Counts>();
    r.statistics.relations_per_kind = st.at("relations_per_kind").get<Counts>();
    r.statistics.target_elements_per_type = st.at("target_elements_per_type").get<Counts>();
    r.statistics.target_relations_per_type = st.at("target_relations_per_type").get<Counts>();
    r.statistics.observations = st.at("observations").get<std::size_t>();
    r.statistics.elements = st.at("elements").get<std::size_t>();
    r.statistics.relations = st.at("relations").get<std::size_t>();
    r.statistics.target_elements = st.at("target_elements").get<std::size_t>();
    r.statistics.target_relations = st.at("target_relations").get<std::size_t>();
    for (const auto &f : j.at("findings"))
      r.findings.push_back(finding_from_json(f));
    for (const auto &c : j.at("changelog"))
      r.changelog.entries.push_back({change_action_from_string(c.at("action").get<std::string>()),
                                     c.at("subject").get<std::string>(),
                                     c.at("detail").get<std::string>()});
    for (const auto &d : j.at("dummies"))
      r.dummies.push_back({d.at("elem_id").get<std::string>(), d.at("kind").get<std::string>(),
                           d.at("name").get<std::string>(), d.at("rule").get<std::string>()});
    r.unmapped_elements = j.at("unmapped_elements").get<std::vector<std::string>>();
    for (const auto &c : j.at("checklist"))
      r.checklist.push_back({c.at("kind").get<std::string>(), c.at("framework").get<std::string>(),
                             c.at("item").get<std::string>()});
    return r;
  } catch (const json::exception &e) {
    throw ParseError(std::string("structured report: ") + e.what());
  } catch (const ConfigError &e) {
    throw ParseError(std::string("structured report: ") + e.what());
  }
}

} // namespace eamine
