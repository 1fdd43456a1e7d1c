#include "eamine/pipeline.hpp"

#include "eamine/catalogue.hpp"
#include "eamine/error.hpp"
#include "eamine/exporter.hpp"
#include "eamine/mapper.hpp"
#include "eamine/procmine.hpp"
#include "eamine/util.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <set>
#include <system_error>

namespace eamine {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const std::string &base, const std::string &p) {
  const fs::path path(p);
  if (path.is_absolute() || base.empty())
    return path.lexically_normal().string();
  return (fs::path(base) / path).lexically_normal().string();
}

std::string get_string(const json &obj, const char *key, const std::string &where) {
  const auto &v = obj.at(key);
  if (!v.is_string() || v.get<std::string>().empty())
    throw ConfigError(where + "." + key + ": expected a non-empty string");
  return v.get<std::string>();
}

int get_int(const json &obj, const char *key, const std::string &where) {
  const auto &v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

void reject_unknown(const json &obj, std::initializer_list<std::string_view> known,
                    const std::string &where) {
  for (const auto &[k, v] : obj.items()) {
    bool ok = false;
    for (auto n : known)
      ok = ok || n == k;
    if (!ok)
      throw ConfigError((where.empty() ? "" : where + ".") + k + ": unknown field");
  }
}

template <class T, class F> T table_field(const std::string &path, const std::string &field, F load) {
  try {
    return load(path);
  } catch (const Error &e) {
    throw ConfigError(field + ": " + e.what());
  }
}

std::string run_timestamp(const RunConfig &cfg, const ObservationStore &store) {
  if (!cfg.run_timestamp.empty())
    return cfg.run_timestamp;
  if (const char *env = std::getenv("SOURCE_DATE_EPOCH"); env && *env)
    return std::string("SOURCE_DATE_EPOCH=") + env;
  std::optional<std::string> latest;
  std::int64_t best = 0;
  for (const auto &o : store.observations()) {
    if (!o.timestamp)
      continue;
    const auto t = parse_iso8601(*o.timestamp);
    if (t && (!latest || *t > best)) {
      best = *t;
      latest = *o.timestamp;
    }
  }
  return latest ? "latest observation " + *latest : "unspecified";
}

// Keeps the first occurrence of every finding id.
void append_unique(std::vector<Finding> &into, std::set<std::string> &seen,
                   const std::vector<Finding> &from) {
  for (const auto &f : from)
    if (seen.insert(f.finding_id).second)
      into.push_back(f);
}

} // namespace

RunConfig parse_run_config(std::string_view text, const std::string &base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config: expected a JSON object");
  reject_unknown(j,
                 {"name", "sources", "rules", "target", "metamodels", "catalogue", "enrichment",
                  "output_dir", "run_timestamp"},
                 "");
  RunConfig cfg;
  cfg.digest = hex64(fnv1a(text));
  const std::string data = bundled_data_dir();
  try {
    if (j.contains("name")) {
      cfg.name = get_string(j, "name", "config");
      for (char c : cfg.name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
          throw ConfigError("name: only letters, digits, '-', '_' and '.' are allowed");
    }

    if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty())
      throw ConfigError("sources: expected a non-empty list");
    std::set<std::string> paths;
    for (std::size_t i = 0; i < j["sources"].size(); ++i) {
      const auto &s = j["sources"][i];
      const std::string where = "sources[" + std::to_string(i) + "]";
      if (!s.is_object())
        throw ConfigError(where + ": expected an object");
      reject_unknown(s, {"path", "adapter", "priority", "agent_ip"}, where);
      if (!s.contains("path"))
        throw ConfigError(where + ".path: missing");
      if (!s.contains("adapter"))
        throw ConfigError(where + ".adapter: missing");
      SourceDescriptor d;
      d.path = resolve(base_dir, get_string(s, "path", where));
      try {
        d.adapter = adapter_from_string(get_string(s, "adapter", where));
      } catch (const Error &e) {
        throw ConfigError(where + ".adapter: " + e.what());
      }
      if (s.contains("priority")) {
        d.priority = get_int(s, "priority", where);
        if (d.priority < 0)
          throw ConfigError(where + ".priority: must be >= 0");
      }
      if (s.contains("agent_ip")) {
        const auto ip = canonical_ip(get_string(s, "agent_ip", where));
        if (!ip)
          throw ConfigError(where + ".agent_ip: not an IP address");
        d.agent_ip = *ip;
      }
      if (!paths.insert(d.path).second)
        throw ConfigError(where + ".path: listed twice");
      cfg.sources.push_back(std::move(d));
    }

    const json rules = j.value("rules", json::object());
    if (!rules.is_object())
      throw ConfigError("rules: expected an object");
    reject_unknown(rules,
                   {"ipv4_prefix_len", "dfg_edge_threshold", "oui_table", "os_heuristics",
                    "port_table", "snmp_account_oids"},
                   "rules");
    if (rules.contains("ipv4_prefix_len"))
      cfg.rules.ipv4_prefix_len = get_int(rules, "ipv4_prefix_len", "rules");
    if (rules.contains("dfg_edge_threshold"))
      cfg.rules.dfg_edge_threshold = get_int(rules, "dfg_edge_threshold", "rules");
    auto table_path = [&](const char *key, const char *file) {
      return rules.contains(key) ? resolve(base_dir, get_string(rules, key, "rules"))
                                 : resolve(data, file);
    };
    cfg.rules.oui_table = table_field<OuiTable>(table_path("oui_table", "oui.tsv"),
                                                "rules.oui_table", OuiTable::load);
    cfg.rules.os_port_heuristics = table_field<OsHeuristicTable>(
        table_path("os_heuristics", "os_heuristics.tsv"), "rules.os_heuristics",
        OsHeuristicTable::load);
    cfg.rules.port_table = table_field<PortTable>(table_path("port_table", "ports.tsv"),
                                                  "rules.port_table", PortTable::load);
    if (rules.contains("snmp_account_oids")) {
      const auto &oids = rules["snmp_account_oids"];
      if (!oids.is_array())
        throw ConfigError("rules.snmp_account_oids: expected a list of OIDs");
      cfg.ingest.snmp_account_oids.clear();
      for (const auto &o : oids) {
        const auto norm = o.is_string() ? normalize_oid(o.get<std::string>()) : std::string();
        if (norm.empty())
          throw ConfigError("rules.snmp_account_oids: bad OID " + o.dump());
        cfg.ingest.snmp_account_oids.push_back(norm);
      }
    }
    cfg.rules.validate();

    for (const char *mm : {"archimate-3", "naf-lite"})
      cfg.metamodels[mm] = {resolve(data, std::string(mm) + ".metamodel.json"),
                            resolve(data, std::string(mm) + ".rules.json")};
    if (j.contains("metamodels")) {
      if (!j["metamodels"].is_object())
        throw ConfigError("metamodels: expected an object keyed by metamodel name");
      for (const auto &[name, m] : j["metamodels"].items()) {
        const std::string where = "metamodels." + name;
        if (!m.is_object())
          throw ConfigError(where + ": expected an object");
        reject_unknown(m, {"metamodel", "rules"}, where);
        if (!m.contains("metamodel") || !m.contains("rules"))
          throw ConfigError(where + ": needs both 'metamodel' and 'rules'");
        cfg.metamodels[name] = {resolve(base_dir, get_string(m, "metamodel", where)),
                                resolve(base_dir, get_string(m, "rules", where))};
      }
    }
    if (j.contains("target"))
      cfg.target = get_string(j, "target", "config");
    if (!cfg.metamodels.count(cfg.target))
      throw ConfigError("target: unknown metamodel '" + cfg.target + "'");

    if (j.contains("catalogue"))
      cfg.catalogue = resolve(base_dir, get_string(j, "catalogue", "config"));
    if (j.contains("enrichment"))
      cfg.enrichment = resolve(base_dir, get_string(j, "enrichment", "config"));
    if (j.contains("output_dir"))
      cfg.output_dir = resolve(base_dir, get_string(j, "output_dir", "config"));
    else
      cfg.output_dir = resolve(base_dir, ".");
    if (j.contains("run_timestamp"))
      cfg.run_timestamp = get_string(j, "run_timestamp", "config");
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string &path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_run_config(text, fs::path(path).parent_path().string());
}

std::string default_config_path() {
  const char *env = std::getenv("EAMINE_CONFIG");
  return env ? env : "";
}

PipelineResult run_stages(const RunConfig &cfg, Stage last) {
  PipelineResult r;
  std::optional<Catalogue> custom;
  if (!cfg.catalogue.empty())
    custom = Catalogue::from_definition(parse_metamodel_definition(read_file(cfg.catalogue)));
  const Catalogue &cat = custom ? *custom : Catalogue::builtin();

  for (const auto &batch : ingest_sources(cfg.sources, cfg.ingest)) {
    r.store.register_source(batch.source);
    r.store.append_all(batch.result.observations, batch.source);
  }
  if (last == Stage::ingest)
    return r;

  auto mapped = map_observations(r.store, cat, cfg.rules.port_table);
  std::set<std::string> seen;
  std::vector<Finding> mapper_findings;
  for (const auto &obs_id : mapped.unmapped)
    mapper_findings.push_back(make_finding(Severity::info, FindingCategory::unmapped_observation,
                                           obs_id, "no mapping rule applies to this observation",
                                           "mapper"));
  append_unique(r.findings, seen, mapper_findings);

  GenericModel model = std::move(mapped.model);
  for (const auto &[log, events] : events_by_log(r.store.observations()))
    attach_mined(model, dfg_to_elements(build_dfg(events), cfg.rules.dfg_edge_threshold, log));
  model.check_integrity();

  // Dummies wait for the closing pass so that enrichment can still supply what
  // they would stand in for.
  auto first = reason(std::move(model), r.store, cfg.rules, cfg.enrichment.empty());
  append_unique(r.findings, seen, first.findings);
  model = std::move(first.model);
  if (!cfg.enrichment.empty()) {
    model = apply_manual_enrichment(model, read_file(cfg.enrichment), cat);
    auto closing = reason(std::move(model), r.store, cfg.rules);
    append_unique(r.findings, seen, closing.findings);
    model = std::move(closing.model);
  }
  r.model = std::move(model);
  if (last == Stage::build)
    return r;

  const auto &files = cfg.metamodels.at(cfg.target);
  const auto mm = TargetMetamodel::load(files.metamodel);
  const auto rules = RuleSet::load(files.rules, mm, cat);
  r.target = transform(r.model, rules, mm);
  std::vector<Finding> downgrades;
  for (const auto &c : r.target->changes.entries) {
    if (c.action == ChangeAction::downgraded)
      downgrades.push_back(make_finding(Severity::info, FindingCategory::relation_downgraded,
                                        c.subject, c.detail, "plausibility"));
    else if (c.action == ChangeAction::dropped && r.model.relations.count(c.subject))
      downgrades.push_back(make_finding(Severity::verify, FindingCategory::relation_downgraded,
                                        c.subject, c.detail, "plausibility"));
  }
  append_unique(r.findings, seen, downgrades);
  if (last == Stage::transform || last == Stage::export_models)
    return r;

  RunInfo info{cfg.name, run_timestamp(cfg, r.store), cfg.digest, cfg.target,
               r.store.sources()};
  r.report = build_report(r.model, r.target->model, r.findings, r.target->changes, r.store,
                          std::move(info));
  return r;
}

std::string model_to_json(const GenericModel &model) {
  json elements = json::array();
  for (const auto &[id, e] : model.elements) {
    elements.push_back({{"elem_id", id},
                        {"kind", e.kind},
                        {"natural_key", e.natural_key},
                        {"name", e.name},
                        {"attrs", e.attrs},
                        {"dummy", e.dummy},
                        {"confidence", std::string(to_string(e.confidence))},
                        {"provenance", e.provenance}});
  }
  json relations = json::array();
  for (const auto &[id, rel] : model.relations) {
    relations.push_back({{"rel_id", id},
                         {"kind", std::string(to_string(rel.kind))},
                         {"source", rel.source},
                         {"target", rel.target},
                         {"attrs", rel.attrs},
                         {"provenance", rel.provenance}});
  }
  return json{{"elements", elements}, {"relations", relations}}.dump(2) + "\n";
}

namespace {

std::string changelog_to_json(const ChangeLog &log) {
  json entries = json::array();
  for (const auto &c : log.entries)
    entries.push_back(
        {{"action", std::string(to_string(c.action))}, {"subject", c.subject}, {"detail", c.detail}});
  return entries.dump(2) + "\n";
}

} // namespace

std::map<std::string, std::string> render_artifacts(const RunConfig &cfg,
                                                    const PipelineResult &result, Stage last) {
  std::map<std::string, std::string> files;
  const auto &n = cfg.name;
  const bool all = last == Stage::all;
  if (last == Stage::ingest || all)
    files[n + ".store.jsonl"] = result.store.serialize();
  if (last == Stage::build)
    files[n + ".model.json"] = model_to_json(result.model);
  if (last == Stage::transform)
    files[n + ".changes.json"] = changelog_to_json(result.target->changes);
  if (last == Stage::export_models || all) {
    const auto &tm = result.target->model;
    if (tm.metamodel_name == "archimate-3")
      files[n + ".archimate.xml"] = write_archimate_xml(tm, n);
    files[n + ".dot"] = write_dot(tm, n);
  }
  if (last == Stage::report || all) {
    files[n + ".report.md"] = render_report(*result.report, ReportFormat::markdown);
    files[n + ".report.json"] = render_report(*result.report, ReportFormat::structured);
  }
  return files;
}

void commit_artifacts(const std::string &dir, const std::map<std::string, std::string> &files) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir + ": " + ec.message());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto &t : temps)
      fs::remove(t, ec);
  };
  try {
    for (const auto &[name, content] : files) {
      const auto tmp = root / (name + ".tmp");
      temps.push_back(tmp);
      write_file_atomic(tmp.string(), content);
    }
    for (const auto &[name, content] : files) {
      fs::rename(root / (name + ".tmp"), root / name);
    }
  } catch (const fs::filesystem_error &e) {
    cleanup();
    throw IoError(std::string("writing artifacts: ") + e.what());
  } catch (...) {
    cleanup();
    throw;
  }
}

int run_pipeline(const RunConfig &cfg, Stage last, bool strict, std::ostream &out,
                 std::ostream &err) {
  PipelineResult result;
  std::map<std::string, std::string> files;
  try {
    result = run_stages(cfg, last);
    files = render_artifacts(cfg, result, last);
    commit_artifacts(cfg.output_dir, files);
  } catch (const std::exception &e) {
    err << "eamine: error: " << e.what() << "\n";
    return kExitFatal;
  }
  for (const auto &[name, content] : files)
    out << "wrote " << (fs::path(cfg.output_dir) / name).string() << "\n";
  std::size_t warnings = 0;
  for (const auto &f : result.findings)
    if (f.severity == Severity::warning)
      ++warnings;
  out << result.findings.size() << " findings, " << warnings << " warnings\n";
  return strict && warnings > 0 ? kExitWarnings : kExitOk;
}

} // namespace eamine
