#include "eamine/reasoner.hpp"

#include "eamine/error.hpp"
#include "eamine/mapper.hpp"
#include "eamine/util.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <climits>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

namespace eamine {

namespace {

constexpr std::array<std::pair<Severity, std::string_view>, 3> kSeverities{
    {{Severity::info, "info"}, {Severity::verify, "verify"}, {Severity::warning, "warning"}}};
constexpr std::array<std::pair<FindingCategory, std::string_view>, 5> kFindingCategories{
    {{FindingCategory::dummy_inserted, "dummy-inserted"},
     {FindingCategory::duplicate_merged, "duplicate-merged"},
     {FindingCategory::unmapped_observation, "unmapped-observation"},
     {FindingCategory::low_confidence, "low-confidence"},
     {FindingCategory::relation_downgraded, "relation-downgraded"}}};

} // namespace

std::string_view to_string(Severity s) noexcept {
  for (const auto &[k, n] : kSeverities)
    if (k == s)
      return n;
  return "?";
}

std::string_view to_string(FindingCategory c) noexcept {
  for (const auto &[k, n] : kFindingCategories)
    if (k == c)
      return n;
  return "?";
}

Severity severity_from_string(std::string_view s) {
  for (const auto &[k, n] : kSeverities)
    if (n == s)
      return k;
  throw ParseError("unknown severity '" + std::string(s) + "'");
}

FindingCategory finding_category_from_string(std::string_view s) {
  for (const auto &[k, n] : kFindingCategories)
    if (n == s)
      return k;
  throw ParseError("unknown finding category '" + std::string(s) + "'");
}

Finding make_finding(Severity severity, FindingCategory category, std::string subject,
                     std::string message, std::string rule) {
  Finding f;
  f.finding_id = "f-" + hex64(hash_fields({std::string(to_string(category)), subject, message}));
  f.severity = severity;
  f.category = category;
  f.subject = std::move(subject);
  f.message = std::move(message);
  f.rule = std::move(rule);
  return f;
}

RuleConfig RuleConfig::bundled() {
  const std::filesystem::path dir(bundled_data_dir());
  RuleConfig cfg;
  cfg.oui_table = OuiTable::load((dir / "oui.tsv").string());
  cfg.os_port_heuristics = OsHeuristicTable::load((dir / "os_heuristics.tsv").string());
  cfg.port_table = PortTable::load((dir / "ports.tsv").string());
  return cfg;
}

void RuleConfig::validate() const {
  if (ipv4_prefix_len < 8 || ipv4_prefix_len > 30)
    throw ConfigError("rules.ipv4_prefix_len: must be within 8..30, got " +
                      std::to_string(ipv4_prefix_len));
  if (dfg_edge_threshold < 1)
    throw ConfigError("rules.dfg_edge_threshold: must be >= 1");
  if (oui_table.empty())
    throw ConfigError("rules.oui_table: table is empty");
  if (os_port_heuristics.empty())
    throw ConfigError("rules.os_heuristics: table is empty");
  if (port_table.empty())
    throw ConfigError("rules.port_table: table is empty");
}

namespace {

const Catalogue &cat() { return Catalogue::builtin(); }

std::string attr_of(const GenericElement &e, const char *key) {
  const auto it = e.attrs.find(key);
  return it == e.attrs.end() ? std::string{} : it->second;
}

std::optional<std::string> subnet_of(const std::string &ip, int prefix_len) {
  if (const auto v4 = parse_ipv4(ip)) {
    const std::uint32_t mask = prefix_len == 0 ? 0 : ~std::uint32_t{0} << (32 - prefix_len);
    return format_ipv4(*v4 & mask) + "/" + std::to_string(prefix_len);
  }
  in6_addr addr{};
  if (inet_pton(AF_INET6, ip.c_str(), &addr) != 1)
    return std::nullopt;
  for (int i = 8; i < 16; ++i)
    addr.s6_addr[i] = 0;
  char buf[INET6_ADDRSTRLEN];
  inet_ntop(AF_INET6, &addr, buf, sizeof buf);
  return std::string(buf) + "/64";
}

std::vector<std::string> owner_nodes(const GenericModel &m, const std::string &elem_id) {
  std::vector<std::string> out;
  for (const auto *r : m.incoming(elem_id)) {
    const auto *src = m.get(r->source);
    if (r->kind == RelationKind::assignment && src && src->kind == kind::Node)
      out.push_back(r->source);
  }
  return out;
}

const GenericElement *assigned_of_kind(const GenericModel &m, const std::string &node_id,
                                       std::string_view k) {
  for (const auto *r : m.outgoing(node_id)) {
    if (r->kind != RelationKind::assignment)
      continue;
    const auto *t = m.get(r->target);
    if (t && t->kind == k)
      return t;
  }
  return nullptr;
}

/// Interfaces assigned from the node and the services serving them.
std::pair<std::vector<const GenericElement *>, std::vector<const GenericElement *>>
node_interfaces_and_services(const GenericModel &m, const std::string &node_id) {
  std::vector<const GenericElement *> ifaces, services;
  for (const auto *r : m.outgoing(node_id)) {
    const auto *t = m.get(r->target);
    if (r->kind != RelationKind::assignment || !t || t->kind != kind::ApplicationInterface)
      continue;
    ifaces.push_back(t);
    for (const auto *s : m.incoming(t->elem_id)) {
      const auto *svc = m.get(s->source);
      if (s->kind == RelationKind::serving && svc && svc->kind == kind::ITService &&
          std::find(services.begin(), services.end(), svc) == services.end())
        services.push_back(svc);
    }
  }
  return {ifaces, services};
}

/// Preferred Node for an address: evidence-backed over dummy, MAC-keyed over
/// IP-keyed, then lowest id.
const GenericElement *resolve_node(const GenericModel &m, const std::string &ip) {
  const GenericElement *best = nullptr;
  auto rank = [](const GenericElement &e) {
    return std::make_tuple(e.dummy, !starts_with(e.natural_key, "mac:"), e.elem_id);
  };
  for (const auto &[id, e] : m.elements) {
    if (e.kind != kind::Node || attr_of(e, "ip") != ip)
      continue;
    if (!best || rank(e) < rank(*best))
      best = &e;
  }
  return best;
}

GenericElement &add_dummy(GenericModel &m, std::string_view k, const std::string &key,
                          const std::string &name, const std::string &rule) {
  auto &e = m.upsert_element(k, key, name, Confidence::semi_automatic);
  e.dummy = true;
  e.attrs["dummy_rule"] = rule;
  return e;
}

} // namespace

ReasoningResult derive_networks(GenericModel model, const RuleConfig &cfg) {
  ReasoningResult out;
  std::vector<std::string> nodes;
  for (const auto *n : model.of_kind(kind::Node))
    if (!n->dummy)
      nodes.push_back(n->elem_id);
  const auto &info = cat().lookup_kind(kind::CommunicationNetwork);
  for (const auto &id : nodes) {
    auto &node = model.elements.at(id);
    const auto subnet = subnet_of(attr_of(node, "ip"), cfg.ipv4_prefix_len);
    if (!subnet) {
      if (attr_of(node, "network") == "unresolved")
        continue;
      node.attrs["network"] = "unresolved";
      out.findings.push_back(make_finding(Severity::verify, FindingCategory::low_confidence, id,
                                          "node '" + node.name +
                                              "' has no parseable IP; network membership unknown",
                                          "derive_networks"));
      continue;
    }
    const auto prov = node.provenance;
    auto &net = model.upsert_element(info.name, "net:" + *subnet, *subnet, *info.automation, prov);
    net.attrs.emplace("cidr", *subnet);
    model.add_relation(RelationKind::association, id, net.elem_id, prov);
  }
  out.model = std::move(model);
  return out;
}

ReasoningResult derive_paths(GenericModel model, const ObservationStore &store) {
  ReasoningResult out;
  const auto &node_info = cat().lookup_kind(kind::Node);
  const auto &path_info = cat().lookup_kind(kind::Path);
  auto endpoint = [&](const std::string &ip) -> std::string {
    if (const auto *n = resolve_node(model, ip))
      return n->elem_id;
    auto &d = add_dummy(model, node_info.name, "dummy-ip:" + ip, ip, "derive_paths");
    d.attrs["ip"] = ip;
    out.findings.push_back(make_finding(Severity::warning, FindingCategory::dummy_inserted,
                                        d.elem_id,
                                        "flow endpoint " + ip +
                                            " was never scanned; inserted dummy Node",
                                        "derive_paths"));
    return d.elem_id;
  };
  for (const auto &o : store.observations()) {
    if (o.kind != ObsKind::flow)
      continue;
    const auto src = endpoint(o.attrs.at("src_ip"));
    const auto dst = endpoint(o.attrs.at("dst_ip"));
    if (src == dst)
      continue;
    const auto &lo = std::min(src, dst);
    const auto &hi = std::max(src, dst);
    const auto name = model.elements.at(lo).name + " - " + model.elements.at(hi).name;
    auto &path = model.upsert_element(path_info.name, "path:" + lo + "|" + hi, name,
                                      *path_info.automation, {o.obs_id});
    const std::string path_id = path.elem_id;
    model.add_relation(RelationKind::flow, src, path_id, {o.obs_id});
    model.add_relation(RelationKind::flow, path_id, dst, {o.obs_id});
  }
  out.model = std::move(model);
  return out;
}

ReasoningResult classify_devices(GenericModel model, const RuleConfig &cfg) {
  ReasoningResult out;
  const auto &info = cat().lookup_kind(kind::Device);
  std::vector<std::string> nodes;
  for (const auto *n : model.of_kind(kind::Node))
    if (!n->dummy)
      nodes.push_back(n->elem_id);
  for (const auto &id : nodes) {
    if (assigned_of_kind(model, id, kind::Device) ||
        attr_of(model.elements.at(id), "device_class") == "unclassified")
      continue;
    auto &node = model.elements.at(id);
    const auto mac = attr_of(node, "mac");
    const auto vendor = attr_of(node, "vendor");
    const auto *entry = cfg.oui_table.classify(mac, vendor);
    if (!entry) {
      node.attrs["device_class"] = "unclassified";
      out.findings.push_back(make_finding(
          Severity::verify, FindingCategory::low_confidence, id,
          mac.empty() ? "node '" + node.name + "' has no MAC address; device type unknown"
                      : "no OUI/vendor match for node '" + node.name + "' (" + mac + ")",
          "classify_devices"));
      continue;
    }
    const auto prov = node.provenance;
    const auto name = node.name + " (" + entry->device_type + ")";
    auto &dev = model.upsert_element(info.name, "dev:" + id, name, *info.automation, prov);
    dev.attrs.emplace("device_type", entry->device_type);
    if (!mac.empty())
      dev.attrs.emplace("mac", mac);
    if (!vendor.empty())
      dev.attrs.emplace("vendor", vendor);
    model.add_relation(RelationKind::assignment, id, dev.elem_id, prov);
  }
  out.model = std::move(model);
  return out;
}

ReasoningResult estimate_os(GenericModel model, const RuleConfig &cfg) {
  ReasoningResult out;
  const auto &info = cat().lookup_kind(kind::SystemSoftware);
  std::vector<std::string> nodes;
  for (const auto *n : model.of_kind(kind::Node))
    nodes.push_back(n->elem_id);
  for (const auto &id : nodes) {
    const auto &node = model.elements.at(id);
    if (node.dummy || assigned_of_kind(model, id, kind::SystemSoftware))
      continue;
    const auto prov = node.provenance;
    const auto key = "os:" + id;
    if (const auto guess = attr_of(node, "os_guess"); !guess.empty()) {
      auto &os = model.upsert_element(info.name, key, guess, Confidence::automatic, prov);
      os.attrs.emplace("os_source", "scanner");
      model.add_relation(RelationKind::assignment, id, os.elem_id, prov);
      continue;
    }
    std::set<int> open;
    std::vector<std::string> port_prov;
    for (const auto *iface : node_interfaces_and_services(model, id).first) {
      if (const auto p = parse_int(attr_of(*iface, "port"))) {
        open.insert(*p);
        merge_provenance(port_prov, iface->provenance);
      }
    }
    if (const auto *entry = cfg.os_port_heuristics.estimate(open)) {
      merge_provenance(port_prov, prov);
      auto &os = model.upsert_element(info.name, key, entry->os, Confidence::semi_automatic,
                                      port_prov);
      os.attrs.emplace("os_source", "heuristic");
      model.add_relation(RelationKind::assignment, id, os.elem_id, prov);
      continue;
    }
    const auto name = node.name;
    auto &os = add_dummy(model, info.name, key, "unknown OS", "estimate_os");
    os.attrs["host"] = name;
    const std::string os_id = os.elem_id;
    model.add_relation(RelationKind::assignment, id, os_id);
    out.findings.push_back(make_finding(Severity::warning, FindingCategory::dummy_inserted, os_id,
                                        "no OS evidence for node '" + name +
                                            "'; inserted dummy SystemSoftware",
                                        "estimate_os"));
  }
  // Every OS realizes the services hosted on its node.
  for (const auto &id : nodes) {
    const auto *os = assigned_of_kind(model, id, kind::SystemSoftware);
    if (!os)
      continue;
    const std::string os_id = os->elem_id;
    for (const auto *svc : node_interfaces_and_services(model, id).second)
      model.add_relation(RelationKind::realization, os_id, svc->elem_id, svc->provenance);
  }
  out.model = std::move(model);
  return out;
}

ReasoningResult insert_dummies(GenericModel model) {
  ReasoningResult out;
  const std::size_t bound = (model.elements.size() + 1) * 3 * 4;
  std::size_t firings = 0;
  bool fired = true;
  while (fired) {
    fired = false;
    std::vector<std::string> ids;
    for (const auto &[id, e] : model.elements)
      ids.push_back(id);
    for (const auto &id : ids) {
      const auto &e = model.elements.at(id);
      if (e.kind == kind::ITService &&
          !model.has_incoming(id, RelationKind::realization, kind::SystemSoftware) &&
          !model.has_incoming(id, RelationKind::realization, kind::ApplicationComponent)) {
        const auto name = e.name;
        auto &d = add_dummy(model, kind::ApplicationComponent, "dummy-app:" + id,
                            name + " (dummy)", "insert_dummies.a");
        const std::string did = d.elem_id;
        model.add_relation(RelationKind::realization, did, id);
        out.findings.push_back(make_finding(
            Severity::warning, FindingCategory::dummy_inserted, did,
            "IT service '" + name + "' has no realizing software; inserted dummy component",
            "insert_dummies.a"));
        fired = true;
      } else if (e.kind == kind::ApplicationComponent &&
                 !model.has_incoming(id, RelationKind::assignment, kind::Node)) {
        const auto name = e.name;
        auto &d = add_dummy(model, kind::Node, "dummy-host:" + id, "host of " + name,
                            "insert_dummies.b");
        const std::string did = d.elem_id;
        model.add_relation(RelationKind::assignment, did, id);
        out.findings.push_back(make_finding(
            Severity::warning, FindingCategory::dummy_inserted, did,
            "application component '" + name + "' has no hosting node; inserted dummy Node",
            "insert_dummies.b"));
        fired = true;
      } else if (e.kind == kind::TechnologyProcess &&
                 !model.has_incoming(id, RelationKind::assignment, kind::BusinessActor) &&
                 !model.has_incoming(id, RelationKind::assignment, kind::BusinessRole)) {
        const auto name = e.name;
        auto &d = add_dummy(model, kind::BusinessRole, "dummy-role:" + id,
                            name + " owner (dummy)", "insert_dummies.c");
        const std::string did = d.elem_id;
        model.add_relation(RelationKind::assignment, did, id);
        out.findings.push_back(make_finding(
            Severity::warning, FindingCategory::dummy_inserted, did,
            "process '" + name + "' has no assigned actor or role; inserted dummy BusinessRole",
            "insert_dummies.c"));
        fired = true;
      } else {
        continue;
      }
      if (++firings > bound)
        throw IntegrityError("insert_dummies exceeded its firing bound");
    }
  }
  out.model = std::move(model);
  return out;
}

namespace {

using Rank = std::pair<int, std::string>;

Rank rank_of(const GenericElement &e, const std::map<std::string, Rank> &obs_rank) {
  Rank best{INT_MAX, std::string(1, '\x7f')};
  for (const auto &p : e.provenance)
    if (const auto it = obs_rank.find(p); it != obs_rank.end())
      best = std::min(best, it->second);
  return best;
}

/// Folds `members` into `winner`. Attributes and name come from the best-ranked
/// member that has them.
Finding merge_into(GenericModel &m, const std::string &winner, std::vector<std::string> members,
                   const std::map<std::string, Rank> &obs_rank) {
  // Scanner evidence beats a port heuristic regardless of source priority.
  auto strength = [](Confidence c) {
    return c == Confidence::manual ? 0 : c == Confidence::automatic ? 1 : 2;
  };
  std::sort(members.begin(), members.end(), [&](const auto &a, const auto &b) {
    const auto &ea = m.elements.at(a);
    const auto &eb = m.elements.at(b);
    return std::make_tuple(strength(ea.confidence), rank_of(ea, obs_rank), a) <
           std::make_tuple(strength(eb.confidence), rank_of(eb, obs_rank), b);
  });
  GenericElement merged = m.elements.at(winner);
  const auto &best = m.elements.at(members.front());
  merged.name = best.name;
  merged.confidence = best.confidence;
  Attrs attrs;
  for (const auto &id : members)
    for (const auto &[k, v] : m.elements.at(id).attrs)
      attrs.emplace(k, v);
  merged.attrs = std::move(attrs);
  std::vector<std::string> losers;
  for (const auto &id : members) {
    merge_provenance(merged.provenance, m.elements.at(id).provenance);
    if (id != winner)
      losers.push_back(id);
  }
  for (const auto &id : losers)
    m.elements.erase(id);
  m.elements[winner] = std::move(merged);

  std::map<std::string, GenericRelation> rels;
  auto remap = [&](const std::string &id) {
    return std::find(losers.begin(), losers.end(), id) != losers.end() ? winner : id;
  };
  for (auto &[id, r] : m.relations) {
    GenericRelation nr = r;
    nr.source = remap(r.source);
    nr.target = remap(r.target);
    if (nr.source == nr.target && nr.kind != RelationKind::association)
      continue;
    nr.rel_id = make_rel_id(nr.kind, nr.source, nr.target);
    auto [it, inserted] = rels.emplace(nr.rel_id, nr);
    if (!inserted) {
      merge_provenance(it->second.provenance, nr.provenance);
      for (const auto &[k, v] : nr.attrs)
        it->second.attrs.emplace(k, v);
    }
  }
  m.relations = std::move(rels);

  // Absence markers only survive if the merged element still lacks the thing.
  auto &w_attrs = m.elements.at(winner).attrs;
  if (attr_of(m.elements.at(winner), "device_class") == "unclassified" &&
      assigned_of_kind(m, winner, kind::Device))
    w_attrs.erase("device_class");
  if (attr_of(m.elements.at(winner), "network") == "unresolved" && w_attrs.count("ip"))
    w_attrs.erase("network");

  std::string joined;
  for (const auto &id : losers)
    joined += (joined.empty() ? "" : ", ") + id;
  const auto &w = m.elements.at(winner);
  return make_finding(Severity::info, FindingCategory::duplicate_merged, winner,
                      w.kind + " '" + w.name + "': merged " + joined + " into " + winner,
                      "dedup_merge");
}

} // namespace

ReasoningResult dedup_merge(GenericModel model, const ObservationStore &store) {
  ReasoningResult out;
  std::map<std::string, Rank> obs_rank;
  for (const auto &o : store.observations())
    if (const auto *src = store.find_source(o.source_id))
      obs_rank.emplace(o.obs_id, Rank{src->priority, src->path});

  bool merged = true;
  while (merged) {
    merged = false;
    // Groups keyed by identity; value = member ids. The first group with two
    // or more members is merged, then identities are recomputed.
    std::map<std::string, std::vector<std::string>> groups;
    std::map<std::string, std::set<std::string>> node_macs;
    for (const auto &[id, e] : model.elements) {
      if (e.dummy)
        continue;
      if (e.kind == kind::Node) {
        const auto ip = attr_of(e, "ip");
        if (ip.empty())
          continue;
        groups["node|" + ip].push_back(id);
        if (const auto mac = attr_of(e, "mac"); !mac.empty())
          node_macs["node|" + ip].insert(mac);
      } else if (e.kind == kind::Device || e.kind == kind::SystemSoftware) {
        const auto owners = owner_nodes(model, id);
        if (owners.size() == 1)
          groups[e.kind + "|" + owners.front()].push_back(id);
      } else if (e.kind == kind::Path) {
        std::set<std::string> ends;
        for (const auto *r : model.incoming(id))
          if (r->kind == RelationKind::flow)
            ends.insert(r->source);
        for (const auto *r : model.outgoing(id))
          if (r->kind == RelationKind::flow)
            ends.insert(r->target);
        if (ends.size() == 2)
          groups["path|" + *ends.begin() + "|" + *ends.rbegin()].push_back(id);
      }
    }
    for (auto &[gkey, members] : groups) {
      if (members.size() < 2 || node_macs[gkey].size() > 1)
        continue;
      std::string winner;
      if (starts_with(gkey, "node|")) {
        for (const auto &id : members)
          if (starts_with(model.elements.at(id).natural_key, "mac:"))
            winner = id;
      } else {
        const auto bar = gkey.find('|');
        const auto k = gkey.substr(0, bar);
        const auto rest = gkey.substr(bar + 1);
        const std::string canonical =
            k == kind::Device ? "dev:" + rest
            : k == kind::SystemSoftware ? "os:" + rest
                                        : "path:" + rest;
        for (const auto &id : members)
          if (model.elements.at(id).natural_key == canonical)
            winner = id;
      }
      if (winner.empty()) {
        winner = *std::min_element(members.begin(), members.end(), [&](const auto &a, const auto &b) {
          return std::make_pair(rank_of(model.elements.at(a), obs_rank), a) <
                 std::make_pair(rank_of(model.elements.at(b), obs_rank), b);
        });
      }
      out.findings.push_back(merge_into(model, winner, members, obs_rank));
      merged = true;
      break;
    }
  }
  out.model = std::move(model);
  return out;
}

ReasoningResult reason(GenericModel model, const ObservationStore &store, const RuleConfig &cfg,
                       bool with_dummies) {
  ReasoningResult acc;
  auto step = [&](ReasoningResult r) {
    r.model.check_integrity();
    acc.model = std::move(r.model);
    acc.findings.insert(acc.findings.end(), r.findings.begin(), r.findings.end());
  };
  model.check_integrity();
  acc.model = std::move(model);
  // Merging first keeps duplicates from growing their own derived elements;
  // the closing merge catches duplicates the derivations or enrichment made.
  step(dedup_merge(std::move(acc.model), store));
  step(derive_networks(std::move(acc.model), cfg));
  step(derive_paths(std::move(acc.model), store));
  step(classify_devices(std::move(acc.model), cfg));
  step(estimate_os(std::move(acc.model), cfg));
  if (with_dummies)
    step(insert_dummies(std::move(acc.model)));
  step(dedup_merge(std::move(acc.model), store));
  return acc;
}

} // namespace eamine
