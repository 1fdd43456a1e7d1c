#include "eamine/mapper.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <json.hpp>

#include <set>

namespace eamine {

using nlohmann::json;

std::string node_key(std::string_view mac, std::string_view ip) {
  return mac.empty() ? "ip:" + std::string(ip) : "mac:" + std::string(mac);
}

namespace {

void set_if_absent(Attrs &attrs, const std::string &key, const Attrs &from) {
  if (const auto it = from.find(key); it != from.end() && !attrs.count(key))
    attrs[key] = it->second;
}

std::string attr(const Observation &o, const char *key) {
  const auto it = o.attrs.find(key);
  return it == o.attrs.end() ? std::string{} : it->second;
}

GenericElement &node_for(GenericModel &model, const Catalogue &cat, const Observation &o) {
  const auto ip = attr(o, "ip");
  const auto mac = attr(o, "mac");
  const auto &info = cat.lookup_kind(kind::Node);
  auto &node = model.upsert_element(info.name, node_key(mac, ip),
                                    o.attrs.count("hostname") ? attr(o, "hostname") : ip,
                                    *info.automation, {o.obs_id});
  set_if_absent(node.attrs, "ip", o.attrs);
  set_if_absent(node.attrs, "mac", o.attrs);
  return node;
}

} // namespace

MapResult map_observations(const ObservationStore &store, const Catalogue &cat,
                           const PortTable &ports) {
  MapResult out;
  auto &model = out.model;
  const auto all = store.observations();

  for (const auto &o : all) {
    if (o.kind == ObsKind::host) {
      auto &node = node_for(model, cat, o);
      for (const char *k : {"vendor", "os_guess", "hostname"})
        set_if_absent(node.attrs, k, o.attrs);
    } else if (o.kind == ObsKind::port) {
      const std::string node_id = node_for(model, cat, o).elem_id;
      const auto ip = attr(o, "ip");
      const auto port = attr(o, "port");
      const auto proto = attr(o, "proto");
      const std::string key = ip + ":" + port + "/" + proto;
      const auto &iface_info = cat.lookup_kind(kind::ApplicationInterface);
      auto &iface =
          model.upsert_element(iface_info.name, key, key, *iface_info.automation, {o.obs_id});
      for (const char *k : {"ip", "port", "proto", "service_name"})
        set_if_absent(iface.attrs, k, o.attrs);
      const std::string iface_id = iface.elem_id;
      model.add_relation(RelationKind::assignment, node_id, iface_id, {o.obs_id});

      const auto service = ports.service_for(parse_int(port).value_or(-1), proto);
      if (!service)
        continue;
      const auto &svc_info = cat.lookup_kind(kind::ITService);
      auto &svc = model.upsert_element(svc_info.name, *service + "@" + ip, *service,
                                       *svc_info.automation, {o.obs_id});
      svc.attrs.emplace("service", *service);
      svc.attrs.emplace("ip", ip);
      svc.attrs.emplace("port", port);
      svc.attrs.emplace("proto", proto);
      model.add_relation(RelationKind::serving, svc.elem_id, iface_id, {o.obs_id});
    }
  }

  for (const auto &o : all) {
    switch (o.kind) {
    case ObsKind::host:
    case ObsKind::port:
    case ObsKind::flow:          // consumed by derive_paths
    case ObsKind::process_event: // consumed by procmine
      break;
    case ObsKind::log_event:
      out.unmapped.push_back(o.obs_id);
      break;
    case ObsKind::snmp_record: {
      const auto field = attr(o, "field");
      const auto value = attr(o, "value");
      const auto agent = attr(o, "agent_ip");
      std::vector<GenericElement *> agents;
      if (!agent.empty())
        for (auto &[id, e] : model.elements)
          if (e.kind == kind::Node && !e.dummy && e.attrs.count("ip") && e.attrs["ip"] == agent)
            agents.push_back(&e);
      if (field == "account" && !value.empty()) {
        const auto &info = cat.lookup_kind(kind::BusinessActor);
        auto &actor = model.upsert_element(info.name, "account:" + value, value,
                                           *info.automation, {o.obs_id});
        actor.attrs.emplace("account", value);
        const std::string actor_id = actor.elem_id;
        for (auto *n : agents)
          model.add_relation(RelationKind::association, actor_id, n->elem_id, {o.obs_id});
      } else if ((field == "sys_name" || field == "sys_descr") && !agents.empty()) {
        for (auto *n : agents) {
          if (n->attrs.count(field))
            continue;
          n->attrs[field] = value;
          if (field == "sys_name" && !value.empty())
            n->name = value;
          merge_provenance(n->provenance, {o.obs_id});
        }
      } else {
        out.unmapped.push_back(o.obs_id);
      }
      break;
    }
    }
  }
  model.check_integrity();
  return out;
}

GenericModel apply_manual_enrichment(const GenericModel &model, std::string_view doc,
                                     const Catalogue &cat) {
  if (trim(doc).empty())
    return model;
  json j;
  try {
    j = json::parse(doc);
  } catch (const json::exception &e) {
    throw ParseError(std::string("enrichment file is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError("enrichment file: top level must be an object");
  if (j.contains("format") && j["format"] != "eamine-enrichment")
    throw ParseError("enrichment file: format must be \"eamine-enrichment\"");
  if (j.contains("version") && j["version"] != 1)
    throw ParseError("enrichment file: unsupported version " + j["version"].dump());

  GenericModel out = model;
  std::map<std::string, std::string> declared; // key -> elem_id
  try {
    std::size_t idx = 0;
    for (const auto &e : j.value("elements", json::array())) {
      const std::string where = "elements[" + std::to_string(idx++) + "]";
      const auto key = e.at("key").get<std::string>();
      const auto kind_name = e.at("kind").get<std::string>();
      if (!cat.contains(kind_name))
        throw NotFound(where + ": unknown kind '" + kind_name + "'");
      const auto &info = cat.lookup_kind(kind_name);
      auto &el = out.upsert_element(info.name, "manual:" + key, e.value("name", key),
                                    Confidence::manual);
      el.confidence = Confidence::manual;
      if (e.contains("name"))
        el.name = e["name"].get<std::string>();
      if (e.contains("attrs"))
        for (const auto &[k, v] : e["attrs"].get<Attrs>())
          el.attrs[k] = v;
      declared[key] = el.elem_id;
    }
    auto resolve = [&](const std::string &ref, const std::string &where) {
      if (out.elements.count(ref))
        return ref;
      if (const auto it = declared.find(ref); it != declared.end())
        return it->second;
      if (const auto slash = ref.find('/'); slash != std::string::npos) {
        const auto kind_name = ref.substr(0, slash);
        if (cat.contains(kind_name))
          if (const auto *el = out.find(cat.lookup_kind(kind_name).name, ref.substr(slash + 1)))
            return el->elem_id;
      }
      throw NotFound(where + ": reference to nonexistent element '" + ref + "'");
    };
    idx = 0;
    for (const auto &r : j.value("relations", json::array())) {
      const std::string where = "relations[" + std::to_string(idx++) + "]";
      RelationKind k;
      try {
        k = relation_kind_from_string(r.at("kind").get<std::string>());
      } catch (const ParseError &) {
        throw NotFound(where + ": unknown relation kind " + r.at("kind").dump());
      }
      const auto src = resolve(r.at("source").get<std::string>(), where);
      const auto tgt = resolve(r.at("target").get<std::string>(), where);
      if (src == tgt && k != RelationKind::association)
        throw ParseError(where + ": self relation must be an association");
      out.add_relation(k, src, tgt).attrs["origin"] = "manual";
    }
    idx = 0;
    for (const auto &o : j.value("overrides", json::array())) {
      const std::string where = "overrides[" + std::to_string(idx++) + "]";
      const auto id = resolve(o.at("elem_id").get<std::string>(), where);
      auto &el = out.elements.at(id);
      if (o.contains("name"))
        el.name = o["name"].get<std::string>();
      if (o.contains("attrs"))
        for (const auto &[k, v] : o["attrs"].get<Attrs>())
          el.attrs[k] = v;
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("enrichment file: ") + e.what());
  }
  out.check_integrity();
  return out;
}

} // namespace eamine
