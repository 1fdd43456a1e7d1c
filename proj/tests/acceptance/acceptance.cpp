// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "eamine/error.hpp"
#include "eamine/exporter.hpp"
#include "eamine/ingest.hpp"
#include "eamine/mapper.hpp"
#include "eamine/pipeline.hpp"
#include "eamine/procmine.hpp"
#include "eamine/reasoner.hpp"
#include "eamine/util.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace eamine;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string &rel) { return std::string(EAMINE_FIXTURE_DIR) + "/" + rel; }

/// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string detail;

  void that(bool ok, const std::string &what) {
    if (!ok)
      failures.push_back(what);
  }
};

class Scratch {
public:
  explicit Scratch(const std::string &tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("eamine-acc-" + tag + "-" + hex64(rd() * 0x9e3779b97f4a7c15ULL + rd()));
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path &path() const { return path_; }
  std::string write(const std::string &name, const std::string &content) const {
    const auto p = (path_ / name).string();
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

private:
  fs::path path_;
};

std::string json_str(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Config text for nmap sources (absolute paths) with the given priorities.
std::string scan_config(const std::string &name,
                        const std::vector<std::pair<std::string, int>> &scans) {
  std::string s = "{\"name\": " + json_str(name) + ", \"sources\": [";
  for (std::size_t i = 0; i < scans.size(); ++i)
    s += std::string(i ? ", " : "") + "{\"path\": " + json_str(scans[i].first) +
         ", \"adapter\": \"nmap-xml\", \"priority\": " + std::to_string(scans[i].second) + "}";
  return s + "], \"run_timestamp\": \"2024-01-01T00:00:00Z\"}";
}

GenericModel without_provenance(GenericModel m) {
  for (auto &[id, e] : m.elements)
    e.provenance.clear();
  for (auto &[id, r] : m.relations)
    r.provenance.clear();
  return m;
}

std::size_t count_category(const std::vector<Finding> &fs_, FindingCategory c) {
  return static_cast<std::size_t>(
      std::count_if(fs_.begin(), fs_.end(), [c](const Finding &f) { return f.category == c; }));
}

std::map<std::string, std::string> read_dir(const fs::path &dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir))
    return out;
  for (const auto &e : fs::directory_iterator(dir))
    out[e.path().filename().string()] = read_file(e.path().string());
  return out;
}

int run_cli(const std::string &args) {
  const std::string cmd = std::string("\"") + EAMINE_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

const std::vector<std::string> kFixtures{"netinvm", "overlap", "clean", "orphan", "restrictive"};

// ---------------------------------------------------------------------------

void criterion1(Check &c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = load_run_config(fixture("netinvm/config.json"));
  const auto result = run_stages(cfg, Stage::all);
  const auto files = render_artifacts(cfg, result, Stage::all);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto it = files.find("netinvm.archimate.xml");
  c.that(it != files.end(), "exchange file produced");
  if (it == files.end())
    return;
  const auto doc = read_archimate_xml(it->second);
  std::map<std::string, const ExchangeDocument::Element *> by_id;
  std::map<std::string, std::size_t> per_type;
  for (const auto &e : doc.elements) {
    by_id[e.id] = &e;
    ++per_type[e.type];
  }
  c.that(per_type["CommunicationNetwork"] == 3,
         "exactly 3 CommunicationNetwork (got " + std::to_string(per_type["CommunicationNetwork"]) + ")");
  c.that(per_type["Node"] >= 2, "at least 2 Node elements");

  std::map<std::string, std::vector<std::string>> adj;
  for (const auto &r : doc.relationships) {
    adj[r.source].push_back(r.target);
    adj[r.target].push_back(r.source);
  }
  // Reachability through the node's own structure: other Nodes, networks and
  // paths are not crossed.
  auto reachable = [&](const std::string &from, const std::string &to) {
    std::set<std::string> seen{from};
    std::queue<std::string> q;
    q.push(from);
    while (!q.empty()) {
      const auto cur = q.front();
      q.pop();
      if (cur == to)
        return true;
      for (const auto &n : adj[cur]) {
        const auto *e = by_id.at(n);
        if (seen.count(n) || (n != to && (e->type == "Node" || e->type == "CommunicationNetwork" ||
                                          e->type == "Path")))
          continue;
        seen.insert(n);
        q.push(n);
      }
    }
    return false;
  };

  const std::map<std::string, std::string> expected{
      {"ssh", "10.5.0.10"}, {"http", "10.5.1.10"}, {"https", "10.5.1.10"}, {"ftp", "10.5.1.10"}};
  for (const auto &[svc, ip] : expected) {
    const ExchangeDocument::Element *s = nullptr, *node = nullptr;
    for (const auto &e : doc.elements) {
      const auto pip = e.properties.find("ip");
      if (pip == e.properties.end() || pip->second != ip)
        continue;
      if (e.type == "TechnologyService" && e.name == svc)
        s = &e;
      if (e.type == "Node" && e.properties.count("dummy") == 0)
        node = &e;
    }
    c.that(s != nullptr, "TechnologyService " + svc + " on " + ip);
    c.that(node != nullptr, "Node for " + ip);
    if (s && node)
      c.that(reachable(node->id, s->id), svc + " reachable from its Node");
  }
  c.that(secs < 5.0, "runtime < 5 s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "runtime %.3f s", secs);
  c.detail = buf;
}

void criterion2(Check &c) {
  const auto &cat = Catalogue::builtin();
  // Kinds with an automatic or semi-automatic rule in the source-to-kind table.
  // The "Business Actor / Role" row is mined as BusinessActor from SNMP accounts.
  const std::vector<std::string> mined{
      "Node", "Device", "SystemSoftware", "ApplicationInterface", "ITService", "Path",
      "CommunicationNetwork", "TechnologyFunction", "TechnologyProcess", "TechnologyEvent",
      "BusinessActor"};
  const std::vector<std::string> manual{"ApplicationCollaboration", "TechnologyInteraction"};

  auto cfg = load_run_config(fixture("netinvm/config.json"));
  std::set<Adapter> adapters;
  for (const auto &s : cfg.sources)
    adapters.insert(s.adapter);
  c.that(adapters.size() == 5, "fixture exercises all five source types");

  const auto enriched = run_stages(cfg, Stage::build).model;
  cfg.enrichment.clear();
  const auto plain = run_stages(cfg, Stage::build).model;

  for (const auto &k : mined) {
    const auto want = cat.automation(k);
    std::size_t matching = 0;
    for (const auto *e : plain.of_kind(k)) {
      if (e->dummy)
        continue;
      if (e->confidence == want) {
        ++matching;
        continue;
      }
      // Port-signature OS guesses are weaker than scanner evidence.
      const bool heuristic_os = k == "SystemSoftware" && e->confidence == Confidence::semi_automatic &&
                                e->attrs.count("os_source") && e->attrs.at("os_source") == "heuristic";
      c.that(heuristic_os, k + " '" + e->name + "' has confidence " +
                               std::string(to_string(e->confidence)));
    }
    c.that(matching > 0, k + " present with confidence " + std::string(to_string(want)));
  }
  for (const auto &k : manual) {
    c.that(cat.automation(k) == Confidence::manual, k + " is a manual kind");
    c.that(plain.of_kind(k).empty(), k + " absent before enrichment");
    const auto after = enriched.of_kind(k);
    c.that(!after.empty(), k + " present after enrichment");
    for (const auto *e : after)
      c.that(e->confidence == Confidence::manual, k + " enriched with manual confidence");
  }
  // Exhaustive: no kind outside the catalogue, and nothing manual without enrichment.
  for (const auto &[id, e] : plain.elements) {
    c.that(cat.contains(e.kind), "kind " + e.kind + " in catalogue");
    c.that(e.confidence != Confidence::manual, "no manual element without enrichment: " + e.name);
  }
  c.detail = std::to_string(plain.elements.size()) + " elements before, " +
             std::to_string(enriched.elements.size()) + " after enrichment";
}

void criterion3(Check &c) {
  const auto cfg = load_run_config(fixture("orphan/config.json"));
  const auto r = run_stages(cfg, Stage::all);
  const auto files = render_artifacts(cfg, r, Stage::all);
  const auto &rep = *r.report;

  const auto model_dummies = r.model.dummy_count();
  c.that(model_dummies > 0, "orphan ITService yields dummies");
  c.that(rep.dummies.size() == model_dummies, "report lists every dummy (" +
                                                  std::to_string(rep.dummies.size()) + " vs " +
                                                  std::to_string(model_dummies) + ")");
  std::set<std::string> listed;
  for (const auto &d : rep.dummies)
    listed.insert(d.elem_id);
  c.that(listed.size() == rep.dummies.size(), "no dummy listed twice");
  bool orphan_fixed = false;
  for (const auto &[id, e] : r.model.elements) {
    if (!e.dummy)
      continue;
    c.that(listed.count(id) == 1, "dummy " + e.name + " in report");
    if (e.kind == kind::ApplicationComponent)
      orphan_fixed = true;
  }
  c.that(orphan_fixed, "dummy ApplicationComponent realizes the orphan service");

  const auto md = files.at("orphan.report.md");
  c.that(md.find("Dummy objects for verification (" + std::to_string(model_dummies) + ")") !=
             std::string::npos,
         "markdown register header");
  for (const auto &id : listed)
    c.that(md.find("- `" + id + "`") != std::string::npos, "markdown lists " + id);
  c.that(parse_structured_report(files.at("orphan.report.json")).dummies == rep.dummies,
         "structured report lists the same dummies");

  const auto doc = read_archimate_xml(files.at("orphan.archimate.xml"));
  std::size_t flagged = 0;
  for (const auto &e : doc.elements)
    if (e.properties.count("dummy") && e.properties.at("dummy") == "true")
      ++flagged;
  c.that(flagged == model_dummies, "exported elements flagged dummy=true");
  c.detail = std::to_string(model_dummies) + " dummies, " + std::to_string(rep.dummies.size()) +
             " listed";
}

std::string random_scan(std::mt19937 &rng, const std::vector<int> &hosts,
                        const std::map<int, std::set<int>> &ports, const std::set<int> &with_mac,
                        const std::set<int> &with_os) {
  std::ostringstream x;
  x << "<?xml version=\"1.0\"?>\n<nmaprun scanner=\"nmap\" args=\"nmap\" version=\"7.94\">\n";
  for (int h : hosts) {
    x << "<host><status state=\"up\"/>"
      << "<address addr=\"10.20." << h / 200 << "." << h % 200 + 1 << "\" addrtype=\"ipv4\"/>";
    if (with_mac.count(h)) {
      char mac[32];
      std::snprintf(mac, sizeof mac, "00:50:56:%02X:00:%02X", h / 256, h % 256);
      x << "<address addr=\"" << mac << "\" addrtype=\"mac\" vendor=\"VMware\"/>";
    }
    x << "<hostnames><hostname name=\"h" << h << "\"/></hostnames><ports>";
    for (int p : ports.at(h))
      x << "<port protocol=\"tcp\" portid=\"" << p << "\"><state state=\"open\"/></port>";
    x << "</ports>";
    if (with_os.count(h))
      x << "<os><osmatch name=\"Linux " << h % 7 << ".x\" accuracy=\"90\"/></os>";
    x << "</host>\n";
  }
  (void)rng;
  x << "</nmaprun>\n";
  return x.str();
}

void criterion4(Check &c) {
  Scratch dir("dedup");
  // Same file twice, under two paths.
  {
    const auto a = fixture("netinvm/scan-internal.xml");
    const auto copy = dir.write("scan-internal-copy.xml", read_file(a));
    const auto single = run_stages(parse_run_config(scan_config("s", {{a, 0}}), "/"), Stage::build);
    const auto twice =
        run_stages(parse_run_config(scan_config("s", {{a, 0}, {copy, 1}}), "/"), Stage::build);
    c.that(without_provenance(twice.model) == without_provenance(single.model),
           "same scan twice equals single ingestion");
    c.that(count_category(twice.findings, FindingCategory::duplicate_merged) == 0,
           "identical keys merge silently");
  }
  // Same observations appended twice to one store.
  {
    const auto batch = ingest_source({fixture("netinvm/scan-dmz.xml"), Adapter::nmap_xml, 0, ""});
    ObservationStore once, twice;
    const SourceDescriptor src{fixture("netinvm/scan-dmz.xml"), Adapter::nmap_xml, 0, ""};
    once.register_source(src);
    twice.register_source(src);
    once.append_all(batch.observations, src);
    twice.append_all(batch.observations, src);
    twice.append_all(batch.observations, src);
    const auto rules = RuleConfig::bundled();
    auto build = [&](const ObservationStore &s) {
      return reason(map_observations(s, Catalogue::builtin(), rules.port_table).model, s, rules)
          .model;
    };
    c.that(build(twice) == build(once), "re-appended observations change nothing");
  }
  // Overlapping fixture.
  {
    const auto both = run_stages(load_run_config(fixture("overlap/config.json")), Stage::build);
    const auto single = run_stages(load_run_config(fixture("overlap/single.json")), Stage::build);
    c.that(without_provenance(both.model) == without_provenance(single.model),
           "overlapping scans equal the primary scan");
    c.that(count_category(both.findings, FindingCategory::duplicate_merged) >= 1,
           "overlap emits a merge finding");
  }
  // Randomized overlaps: scan B is a sub-view of scan A.
  std::mt19937 rng(4242);
  int mismatches = 0, merges = 0;
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<int> hosts;
    std::map<int, std::set<int>> ports;
    std::set<int> mac, os;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      const int h = iter * 10 + i;
      hosts.push_back(h);
      for (int p : {21, 22, 80, 443, 3389})
        if (rng() % 2)
          ports[h].insert(p);
      if (rng() % 3)
        mac.insert(h);
      if (rng() % 2)
        os.insert(h);
    }
    std::vector<int> sub;
    std::map<int, std::set<int>> sub_ports;
    std::set<int> sub_mac, sub_os;
    std::size_t expected_merges = 0;
    for (int h : hosts) {
      if (rng() % 3 == 0)
        continue;
      sub.push_back(h);
      for (int p : ports[h])
        if (rng() % 2)
          sub_ports[h].insert(p);
      sub_ports[h];
      if (mac.count(h) && rng() % 2)
        sub_mac.insert(h);
      else if (mac.count(h))
        ++expected_merges;
      if (os.count(h) && rng() % 2)
        sub_os.insert(h);
    }
    const auto a = dir.write("a" + std::to_string(iter) + ".xml", random_scan(rng, hosts, ports, mac, os));
    const auto b = dir.write("b" + std::to_string(iter) + ".xml", random_scan(rng, sub, sub_ports, sub_mac, sub_os));
    const auto single = run_stages(parse_run_config(scan_config("r", {{a, 0}}), "/"), Stage::build);
    const auto both = run_stages(parse_run_config(scan_config("r", {{a, 0}, {b, 1}}), "/"), Stage::build);
    if (without_provenance(both.model) != without_provenance(single.model)) {
      ++mismatches;
      c.that(false, "random overlap " + std::to_string(iter) + " differs from single scan");
    }
    const auto got = count_category(both.findings, FindingCategory::duplicate_merged);
    c.that(got == expected_merges, "random overlap " + std::to_string(iter) + ": " +
                                       std::to_string(got) + " merges, expected " +
                                       std::to_string(expected_merges));
    merges += static_cast<int>(got);
  }
  c.detail = "40 random overlaps, " + std::to_string(mismatches) + " mismatches, " +
             std::to_string(merges) + " merges";
}

void criterion5(Check &c) {
  std::mt19937 rng(5150);
  int edges_total = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const int cases = 1 + static_cast<int>(rng() % 5);
    struct Ev {
      std::string case_id, activity;
      int when;
    };
    std::vector<Ev> evs;
    for (int cs = 0; cs < cases; ++cs) {
      const int n = 1 + static_cast<int>(rng() % 5);
      for (int e = 0; e < n; ++e)
        evs.push_back({"c" + std::to_string(cs), std::string(1, char('A' + rng() % 4)),
                       static_cast<int>(rng() % 6)});
    }
    std::shuffle(evs.begin(), evs.end(), rng);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < evs.size(); ++i) {
      char ts[32];
      std::snprintf(ts, sizeof ts, "2024-03-01T10:00:%02dZ", evs[i].when);
      obs.push_back(make_observation("log.csv", i, ObsKind::process_event,
                                     {{"case_id", evs[i].case_id},
                                      {"activity", evs[i].activity},
                                      {"timestamp", ts},
                                      {"log", "log"}}));
    }
    const auto g = build_dfg(obs);

    // Brute force: every ordered pair (i, j) in a case where j is the
    // immediate successor of i under (time, input position).
    std::map<std::pair<std::string, std::string>, int> want;
    for (std::size_t i = 0; i < evs.size(); ++i) {
      std::size_t best = evs.size();
      for (std::size_t j = 0; j < evs.size(); ++j) {
        if (j == i || evs[j].case_id != evs[i].case_id)
          continue;
        const auto key_i = std::make_pair(evs[i].when, i);
        const auto key_j = std::make_pair(evs[j].when, j);
        if (key_j <= key_i)
          continue;
        if (best == evs.size() || key_j < std::make_pair(evs[best].when, best))
          best = j;
      }
      if (best != evs.size())
        ++want[{evs[i].activity, evs[best].activity}];
    }
    c.that(g.edges == want, "instance " + std::to_string(iter) + " matches brute force");

    int sum = 0;
    for (const auto &[e, f] : g.edges)
      sum += f;
    edges_total += sum;
    c.that(static_cast<std::size_t>(sum) == evs.size() - g.cases,
           "instance " + std::to_string(iter) + ": edges = events - cases");
    for (const auto &act : g.activities) {
      int out = g.end_acts.count(act) ? g.end_acts.at(act) : 0;
      int in = g.start_acts.count(act) ? g.start_acts.at(act) : 0;
      for (const auto &[e, f] : g.edges) {
        out += e.first == act ? f : 0;
        in += e.second == act ? f : 0;
      }
      c.that(out == g.occurrences.at(act) && in == g.occurrences.at(act),
             "instance " + std::to_string(iter) + ": conservation at " + act);
    }
  }
  c.detail = "200 logs, " + std::to_string(edges_total) + " edge occurrences";
}

void criterion6(Check &c) {
  std::size_t checked = 0;
  for (const auto &fx : kFixtures) {
    auto cfg = load_run_config(fixture(fx + "/config.json"));
    const auto model = run_stages(cfg, Stage::build).model;
    std::vector<std::string> targets{cfg.target};
    if (cfg.target != "naf-lite")
      targets.push_back("naf-lite");
    for (const auto &t : targets) {
      const auto &files = cfg.metamodels.at(t);
      const auto mm = TargetMetamodel::load(files.metamodel);
      const auto rules = RuleSet::load(files.rules, mm);
      GenerateResult gen;
      try {
        gen = transform(model, rules, mm);
      } catch (const Error &e) {
        c.that(false, fx + "/" + t + ": transform failed: " + e.what());
        continue;
      }
      std::set<std::string> dropped;
      for (const auto &e : gen.changes.entries)
        if (e.action == ChangeAction::dropped)
          dropped.insert(e.subject);
      for (const auto &[id, e] : model.elements) {
        const bool present = gen.model.elements.count(target_id(id)) == 1;
        c.that(present != (dropped.count(id) == 1),
               fx + "/" + t + ": element " + id + " in exactly one of model and unmapped list");
      }
      for (const auto &[id, r] : model.relations) {
        const bool present = gen.model.relations.count(target_id(id)) == 1;
        c.that(present != (dropped.count(id) == 1),
               fx + "/" + t + ": relation " + id + " accounted for");
      }
      for (const auto &[id, r] : gen.model.relations) {
        const auto &s = gen.model.elements.at(r.source);
        const auto &d = gen.model.elements.at(r.target);
        c.that(mm.allowed(s.type, r.type, d.type),
               fx + "/" + t + ": " + s.type + " -" + r.type + "-> " + d.type + " allowed");
      }
      ++checked;
    }
  }
  c.detail = std::to_string(checked) + " fixture/metamodel pairs";
}

void criterion7(Check &c) {
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const auto cfg = load_run_config(fixture("netinvm/config.json"));
    const auto files = render_artifacts(cfg, run_stages(cfg, Stage::export_models), Stage::export_models);
    const auto &xml = files.at("netinvm.archimate.xml");
    if (run == 0)
      first = xml;
    else
      c.that(xml == first, "repeated runs are byte-identical");
  }
  ExchangeDocument doc;
  try {
    doc = read_archimate_xml(first);
  } catch (const ParseError &e) {
    c.that(false, std::string("well-formed XML: ") + e.what());
    return;
  }
  c.that(doc.root_namespace == kArchimateNamespace, "exchange namespace");
  for (const auto &p : check_exchange_integrity(doc))
    c.that(false, p);
  std::set<std::string> ids;
  for (const auto &e : doc.elements)
    c.that(ids.insert(e.id).second, "unique id " + e.id);
  for (const auto &r : doc.relationships)
    c.that(ids.insert(r.id).second, "unique id " + r.id);
  const auto golden_path = std::string(EAMINE_GOLDEN_DIR) + "/netinvm.archimate.xml";
  if (const char *u = std::getenv("EAMINE_UPDATE_GOLDEN"); u && std::string(u) == "1")
    std::ofstream(golden_path, std::ios::binary) << first;
  c.that(fs::exists(golden_path) && read_file(golden_path) == first, "matches golden file");
  c.detail = std::to_string(doc.elements.size()) + " elements, " +
             std::to_string(doc.relationships.size()) + " relationships";
}

void criterion8(Check &c) {
  const auto cfg = load_run_config(fixture("restrictive/config.json"));
  const auto r = run_stages(cfg, Stage::all);
  const auto files = render_artifacts(cfg, r, Stage::all);
  const auto doc = read_archimate_xml(files.at("restrictive.archimate.xml"));
  std::size_t assoc = 0;
  for (const auto &rel : doc.relationships)
    assoc += rel.type == "Association";
  c.that(!doc.relationships.empty(), "relations exported");
  c.that(assoc == doc.relationships.size(), "every exported relation is Association");

  std::size_t non_assoc = 0;
  for (const auto &[id, rel] : r.model.relations)
    non_assoc += rel.kind != RelationKind::association;
  const auto &log = r.target->changes;
  std::map<std::string, int> per_subject;
  for (const auto &e : log.entries)
    if (e.action == ChangeAction::downgraded)
      ++per_subject[e.subject];
  c.that(per_subject.size() == non_assoc && log.count(ChangeAction::downgraded) == non_assoc,
         "one downgrade per non-association relation (" +
             std::to_string(log.count(ChangeAction::downgraded)) + " vs " +
             std::to_string(non_assoc) + ")");
  for (const auto &[id, rel] : r.model.relations)
    if (rel.kind != RelationKind::association)
      c.that(per_subject[id] == 1, "downgrade entry for " + id);
  c.detail = std::to_string(assoc) + "/" + std::to_string(doc.relationships.size()) +
             " Association, " + std::to_string(non_assoc) + " downgrades";
}

void criterion9(Check &c) {
  Scratch dir("e2e");
  const auto config = fixture("netinvm/config.json");
  const auto a = dir.path() / "a", b = dir.path() / "b";
  c.that(run_cli("run --config \"" + config + "\" --out \"" + a.string() + "\"") == 0,
         "first run exits 0");
  c.that(run_cli("run --config \"" + config + "\" --out \"" + b.string() + "\"") == 0,
         "second run exits 0");
  const auto fa = read_dir(a), fb = read_dir(b);
  c.that(fa.size() == 5, "five artifacts written (" + std::to_string(fa.size()) + ")");
  c.that(fa == fb, "outputs byte-identical across runs");

  // Fatal errors: missing source, and a malformed source after good ones.
  const auto bad_xml = dir.write("broken.xml", "<?xml version=\"1.0\"?>\n<nmaprun><host>\n");
  const std::vector<std::pair<std::string, std::string>> failing{
      {"missing", scan_config("missing", {{fixture("netinvm/scan-dmz.xml"), 0},
                                          {(dir.path() / "nope.xml").string(), 0}})},
      {"malformed", scan_config("malformed", {{fixture("netinvm/scan-dmz.xml"), 0}, {bad_xml, 1}})}};
  for (const auto &[tag, text] : failing) {
    const auto cfg_path = dir.write(tag + ".json", text);
    const auto fresh = dir.path() / ("out-" + tag);
    c.that(run_cli("run --config \"" + cfg_path + "\" --out \"" + fresh.string() + "\"") == 2,
           tag + ": exit status 2");
    c.that(!fs::exists(fresh), tag + ": output directory not created");
    const auto existing = dir.path() / ("existing-" + tag);
    fs::create_directories(existing);
    c.that(run_cli("run --config \"" + cfg_path + "\" --out \"" + existing.string() + "\"") == 2,
           tag + ": exit status 2 into existing dir");
    c.that(fs::is_empty(existing), tag + ": existing directory left empty");
  }
  c.detail = std::to_string(fa.size()) + " artifacts compared";
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check &)>>> criteria{
      {"1 scenario reproduction", criterion1},
      {"2 source-to-kind coverage", criterion2},
      {"3 dummy objects", criterion3},
      {"4 deduplication", criterion4},
      {"5 DFG oracle", criterion5},
      {"6 transformation totality", criterion6},
      {"7 export integrity", criterion7},
      {"8 association default", criterion8},
      {"9 determinism and atomicity", criterion9},
  };
  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception &e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << name;
    if (!c.detail.empty())
      std::cout << "  [" << c.detail << "]";
    std::cout << "\n";
    const std::size_t shown = std::min<std::size_t>(c.failures.size(), 10);
    for (std::size_t i = 0; i < shown; ++i)
      std::cout << "      - " << c.failures[i] << "\n";
    if (c.failures.size() > shown)
      std::cout << "      ... " << c.failures.size() - shown << " more\n";
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << "\n";
  return failed ? 1 : 0;
}
