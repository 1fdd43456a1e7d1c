#include "eamine/transformer.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>

namespace eamine {

using nlohmann::json;

TargetMetamodel TargetMetamodel::from_definition(const MetamodelDefinition &def) {
  TargetMetamodel mm;
  mm.name_ = def.name;
  for (const auto &t : def.element_types)
    mm.element_types_.insert(t.name);
  mm.relation_types_.insert(def.relation_types.begin(), def.relation_types.end());
  mm.default_relation_ = def.default_relation;
  for (const auto &[generic, target] : def.relation_map) {
    if (!mm.relation_types_.count(target))
      throw ParseError("metamodel " + def.name + ": relation_map target '" + target +
                       "' is not a relation type");
    mm.relation_map_[relation_kind_from_string(generic)] = target;
  }
  mm.allow_by_default_ = def.allow_by_default;
  mm.allow_ = def.allow;
  mm.deny_ = def.deny;
  return mm;
}

TargetMetamodel TargetMetamodel::parse(std::string_view text) {
  return from_definition(parse_metamodel_definition(text));
}

TargetMetamodel TargetMetamodel::load(const std::string &path) {
  return parse(read_file(path));
}

const std::string *TargetMetamodel::translate(RelationKind kind) const {
  const auto it = relation_map_.find(kind);
  return it == relation_map_.end() ? nullptr : &it->second;
}

namespace {

bool matches(const RelationTriple &t, std::string_view s, std::string_view r,
             std::string_view g) {
  auto m = [](const std::string &pat, std::string_view v) { return pat == "*" || pat == v; };
  return m(t.source, s) && m(t.relation, r) && m(t.target, g);
}

} // namespace

bool TargetMetamodel::allowed(std::string_view s, std::string_view r, std::string_view t) const {
  for (const auto &d : deny_)
    if (matches(d, s, r, t))
      return false;
  for (const auto &a : allow_)
    if (matches(a, s, r, t))
      return true;
  return allow_by_default_;
}

RuleSet RuleSet::parse(std::string_view text, const TargetMetamodel &mm, const Catalogue &cat) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ParseError(std::string("rule file is not valid JSON: ") + e.what());
  }
  RuleSet rs;
  try {
    if (j.value("format", "") != "eamine-rules")
      throw ParseError("rule file: format must be \"eamine-rules\"");
    if (j.at("version").get<int>() != 1)
      throw ParseError("rule file: unsupported version " + j.at("version").dump());
    rs.metamodel = j.at("metamodel").get<std::string>();
    if (rs.metamodel != mm.name())
      throw ParseError("rule file targets '" + rs.metamodel + "' but metamodel is '" +
                       mm.name() + "'");
    std::set<std::string> unconditional;
    std::size_t idx = 0;
    for (const auto &r : j.at("rules")) {
      const std::string where = "rule file: rules[" + std::to_string(idx++) + "]";
      TransformRule rule;
      const auto from = r.at("from").get<std::string>();
      if (!cat.contains(from))
        throw ParseError(where + ": unknown generic kind '" + from + "'");
      rule.from_kind = cat.lookup_kind(from).name;
      rule.to_type = r.at("to").get<std::string>();
      if (!mm.element_types().count(rule.to_type))
        throw ParseError(where + ": '" + rule.to_type + "' is not a " + mm.name() +
                         " element type");
      if (r.contains("when"))
        rule.condition = r["when"].get<std::map<std::string, std::string>>();
      if (rule.condition.empty() && !unconditional.insert(rule.from_kind).second)
        throw ParseError(where + ": second unconditional rule for " + rule.from_kind);
      rs.rules.push_back(std::move(rule));
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("rule file: ") + e.what());
  }
  return rs;
}

RuleSet RuleSet::load(const std::string &path, const TargetMetamodel &mm, const Catalogue &cat) {
  return parse(read_file(path), mm, cat);
}

namespace {

constexpr std::array<std::pair<ChangeAction, std::string_view>, 4> kActions{
    {{ChangeAction::mapped, "mapped"},
     {ChangeAction::downgraded, "downgraded"},
     {ChangeAction::dropped, "dropped"},
     {ChangeAction::defaulted, "defaulted"}}};

} // namespace

std::string_view to_string(ChangeAction a) noexcept {
  for (const auto &[k, n] : kActions)
    if (k == a)
      return n;
  return "?";
}

ChangeAction change_action_from_string(std::string_view s) {
  for (const auto &[k, n] : kActions)
    if (n == s)
      return k;
  throw ParseError("unknown change action '" + std::string(s) + "'");
}

std::size_t ChangeLog::count(ChangeAction a) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [a](const ChangeEntry &e) { return e.action == a; }));
}

Assignment assign(const GenericModel &model, const RuleSet &rules, const TargetMetamodel &mm) {
  if (rules.metamodel != mm.name())
    throw ConfigError("rule set is for '" + rules.metamodel + "', not '" + mm.name() + "'");
  Assignment out;
  for (const auto &[id, e] : model.elements) {
    const TransformRule *hit = nullptr;
    for (const auto &r : rules.rules) {
      if (r.from_kind != e.kind || r.condition.empty())
        continue;
      const bool ok = std::all_of(r.condition.begin(), r.condition.end(), [&](const auto &c) {
        const auto it = e.attrs.find(c.first);
        return it != e.attrs.end() && it->second == c.second;
      });
      if (ok) {
        hit = &r;
        break;
      }
    }
    if (!hit)
      for (const auto &r : rules.rules)
        if (r.from_kind == e.kind && r.condition.empty()) {
          hit = &r;
          break;
        }
    if (hit)
      out.types[id] = hit->to_type;
    else
      out.unmapped.push_back(id);
  }
  return out;
}

PlausibilityResult check_plausibility(const Assignment &assignment, const GenericModel &model,
                                      const TargetMetamodel &mm) {
  PlausibilityResult out;
  for (const auto &[id, r] : model.relations) {
    const auto s = assignment.types.find(r.source);
    const auto t = assignment.types.find(r.target);
    if (s == assignment.types.end() || t == assignment.types.end()) {
      out.changes.entries.push_back(
          {ChangeAction::dropped, id,
           std::string(to_string(r.kind)) + " relation touches an unmapped element"});
      continue;
    }
    std::string type;
    if (const auto *translated = mm.translate(r.kind)) {
      type = *translated;
    } else {
      type = mm.default_relation();
      out.changes.entries.push_back({ChangeAction::defaulted, id,
                                     "no " + mm.name() + " translation for " +
                                         std::string(to_string(r.kind)) + "; using " + type});
    }
    if (!mm.allowed(s->second, type, t->second)) {
      const auto fallback = mm.default_relation();
      if (!mm.allowed(s->second, fallback, t->second)) {
        out.changes.entries.push_back({ChangeAction::dropped, id,
                                       s->second + " -" + type + "-> " + t->second +
                                           " not allowed, default relation forbidden too"});
        continue;
      }
      out.changes.entries.push_back({ChangeAction::downgraded, id,
                                     s->second + " -" + type + "-> " + t->second +
                                         " not allowed; using " + fallback});
      type = fallback;
    }
    out.relations.push_back({id, type, r.source, r.target});
  }
  return out;
}

std::string target_id(std::string_view generic_id) {
  const auto dash = generic_id.find('-');
  return "id-" + std::string(dash == std::string_view::npos ? generic_id
                                                            : generic_id.substr(dash + 1));
}

GenerateResult generate(const GenericModel &model, const Assignment &assignment,
                        const PlausibilityResult &adjusted, const TargetMetamodel &mm) {
  GenerateResult out;
  out.model.metamodel_name = mm.name();
  for (const auto &[gid, type] : assignment.types) {
    const auto *e = model.get(gid);
    if (!e)
      throw IntegrityError("assignment references unknown element " + gid);
    if (!mm.element_types().count(type))
      throw IntegrityError("type " + type + " not in metamodel " + mm.name());
    TargetElement te;
    te.id = target_id(gid);
    te.type = type;
    te.name = e->name;
    te.attrs = e->attrs;
    te.attrs["confidence"] = std::string(to_string(e->confidence));
    te.dummy = e->dummy;
    te.generic_id = gid;
    if (!out.model.elements.emplace(te.id, te).second)
      throw IntegrityError("duplicate target identifier " + te.id);
    if (type != e->kind)
      out.changes.entries.push_back({ChangeAction::mapped, gid, e->kind + " -> " + type});
  }
  for (const auto &gid : assignment.unmapped) {
    const auto *e = model.get(gid);
    out.changes.entries.push_back({ChangeAction::dropped, gid,
                                   "no " + mm.name() + " rule for kind " +
                                       (e ? e->kind : std::string("?"))});
  }
  out.changes.entries.insert(out.changes.entries.end(), adjusted.changes.entries.begin(),
                             adjusted.changes.entries.end());
  for (const auto &ar : adjusted.relations) {
    TargetRelation tr;
    tr.id = target_id(ar.rel_id);
    tr.type = ar.type;
    tr.source = target_id(ar.source);
    tr.target = target_id(ar.target);
    tr.generic_id = ar.rel_id;
    const auto s = out.model.elements.find(tr.source);
    const auto t = out.model.elements.find(tr.target);
    if (s == out.model.elements.end() || t == out.model.elements.end())
      throw IntegrityError("relation " + tr.id + " has a dangling endpoint");
    if (!mm.relation_types().count(tr.type) || !mm.allowed(s->second.type, tr.type, t->second.type))
      throw IntegrityError("relation " + tr.id + " violates the " + mm.name() + " metamodel");
    if (out.model.elements.count(tr.id) || !out.model.relations.emplace(tr.id, tr).second)
      throw IntegrityError("duplicate target identifier " + tr.id);
  }
  return out;
}

GenerateResult transform(const GenericModel &model, const RuleSet &rules,
                         const TargetMetamodel &mm) {
  const auto a = assign(model, rules, mm);
  const auto p = check_plausibility(a, model, mm);
  return generate(model, a, p, mm);
}

} // namespace eamine
