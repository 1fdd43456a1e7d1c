#include "eamine/procmine.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <algorithm>
#include <climits>

namespace eamine {

DirectlyFollowsGraph build_dfg(const std::vector<Observation> &events) {
  struct Ev {
    std::int64_t when;
    std::size_t pos;
    const Observation *obs;
  };
  std::map<std::string, std::vector<Ev>> cases;
  std::vector<std::string> case_order;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto &o = events[i];
    if (o.kind != ObsKind::process_event)
      continue;
    const auto &case_id = o.attrs.at("case_id");
    const auto when = parse_iso8601(o.attrs.at("timestamp")).value_or(LLONG_MIN);
    auto [it, fresh] = cases.try_emplace(case_id);
    if (fresh)
      case_order.push_back(case_id);
    it->second.push_back({when, i, &o});
  }

  DirectlyFollowsGraph g;
  g.cases = cases.size();
  for (auto &[case_id, trace] : cases) {
    std::stable_sort(trace.begin(), trace.end(), [](const Ev &a, const Ev &b) {
      return std::tie(a.when, a.pos) < std::tie(b.when, b.pos);
    });
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto &act = trace[i].obs->attrs.at("activity");
      g.activities.insert(act);
      ++g.occurrences[act];
      g.evidence[act].push_back(trace[i].obs->obs_id);
      if (i + 1 < trace.size())
        ++g.edges[{act, trace[i + 1].obs->attrs.at("activity")}];
    }
    ++g.start_acts[trace.front().obs->attrs.at("activity")];
    ++g.end_acts[trace.back().obs->attrs.at("activity")];
  }
  for (auto &[act, ids] : g.evidence)
    std::sort(ids.begin(), ids.end());
  return g;
}

MinedElements dfg_to_elements(const DirectlyFollowsGraph &dfg, int threshold,
                              std::string_view log_name) {
  if (threshold < 1)
    throw ConfigError("dfg edge threshold must be >= 1");
  MinedElements out;
  if (dfg.activities.empty())
    return out;

  const std::string log(log_name);
  auto element = [&](std::string_view k, const std::string &key, const std::string &name,
                     std::vector<std::string> prov) -> GenericElement & {
    GenericElement e;
    e.kind = std::string(k);
    e.natural_key = key;
    e.elem_id = make_elem_id(k, key);
    e.name = name;
    e.confidence = Confidence::semi_automatic;
    std::sort(prov.begin(), prov.end());
    e.provenance = std::move(prov);
    out.elements.push_back(std::move(e));
    return out.elements.back();
  };
  auto relation = [&](RelationKind k, const std::string &src, const std::string &tgt,
                      std::vector<std::string> prov) -> GenericRelation & {
    GenericRelation r;
    r.kind = k;
    r.source = src;
    r.target = tgt;
    r.rel_id = make_rel_id(k, src, tgt);
    std::sort(prov.begin(), prov.end());
    r.provenance = std::move(prov);
    out.relations.push_back(std::move(r));
    return out.relations.back();
  };

  std::vector<std::string> all;
  for (const auto &[act, ids] : dfg.evidence)
    all.insert(all.end(), ids.begin(), ids.end());
  auto &proc = element(kind::TechnologyProcess, "proc:" + log, log, all);
  proc.attrs["log"] = log;
  proc.attrs["cases"] = std::to_string(dfg.cases);
  const std::string proc_id = proc.elem_id;

  std::map<std::string, std::string> fn_ids;
  for (const auto &act : dfg.activities) {
    const auto ev_it = dfg.evidence.find(act);
    auto &fn = element(kind::TechnologyFunction, "func:" + log + "/" + act, act,
                       ev_it == dfg.evidence.end() ? std::vector<std::string>{} : ev_it->second);
    fn.attrs["log"] = log;
    fn.attrs["occurrences"] = std::to_string(dfg.occurrences.count(act) ? dfg.occurrences.at(act) : 0);
    if (const auto loop = dfg.edges.find({act, act});
        loop != dfg.edges.end() && loop->second >= threshold)
      fn.attrs["repeat_frequency"] = std::to_string(loop->second);
    fn_ids[act] = fn.elem_id;
    relation(RelationKind::composition, proc_id, fn.elem_id, fn.provenance);
  }
  auto evidence_of = [&](const std::string &act) {
    const auto it = dfg.evidence.find(act);
    return it == dfg.evidence.end() ? std::vector<std::string>{} : it->second;
  };
  for (const auto &[edge, freq] : dfg.edges) {
    if (freq < threshold || edge.first == edge.second)
      continue;
    auto prov = evidence_of(edge.first);
    merge_provenance(prov, evidence_of(edge.second));
    relation(RelationKind::flow, fn_ids.at(edge.first), fn_ids.at(edge.second), prov)
        .attrs["frequency"] = std::to_string(freq);
  }
  for (const auto &[act, count] : dfg.start_acts) {
    auto &ev = element(kind::TechnologyEvent, "event:" + log + "/start/" + act,
                       act + " (start)", evidence_of(act));
    ev.attrs["count"] = std::to_string(count);
    ev.attrs["position"] = "start";
    const std::string ev_id = ev.elem_id;
    relation(RelationKind::flow, ev_id, fn_ids.at(act), evidence_of(act));
  }
  for (const auto &[act, count] : dfg.end_acts) {
    auto &ev = element(kind::TechnologyEvent, "event:" + log + "/end/" + act, act + " (end)",
                       evidence_of(act));
    ev.attrs["count"] = std::to_string(count);
    ev.attrs["position"] = "end";
    const std::string ev_id = ev.elem_id;
    relation(RelationKind::flow, fn_ids.at(act), ev_id, evidence_of(act));
  }
  return out;
}

void attach_mined(GenericModel &model, const MinedElements &mined) {
  for (const auto &e : mined.elements) {
    auto &el = model.upsert_element(e.kind, e.natural_key, e.name, e.confidence, e.provenance);
    for (const auto &[k, v] : e.attrs)
      el.attrs[k] = v;
  }
  for (const auto &r : mined.relations) {
    auto &rel = model.add_relation(r.kind, r.source, r.target, r.provenance);
    for (const auto &[k, v] : r.attrs)
      rel.attrs[k] = v;
  }
}

std::vector<std::pair<std::string, std::vector<Observation>>>
events_by_log(const std::vector<Observation> &observations) {
  std::vector<std::pair<std::string, std::vector<Observation>>> out;
  std::map<std::string, std::size_t> index;
  for (const auto &o : observations) {
    if (o.kind != ObsKind::process_event)
      continue;
    const auto it = o.attrs.find("log");
    const std::string log = it == o.attrs.end() ? "event-log" : it->second;
    auto [pos, fresh] = index.try_emplace(log, out.size());
    if (fresh)
      out.push_back({log, {}});
    out[pos->second].second.push_back(o);
  }
  return out;
}

} // namespace eamine
