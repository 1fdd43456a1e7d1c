#include "eamine/model.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <algorithm>
#include <set>

namespace eamine {

std::string make_elem_id(std::string_view kind, std::string_view natural_key) {
  return "el-" + hex64(hash_fields({std::string(kind), std::string(natural_key)}));
}

std::string make_rel_id(RelationKind kind, std::string_view source, std::string_view target) {
  return "rel-" + hex64(hash_fields(
                      {std::string(to_string(kind)), std::string(source), std::string(target)}));
}

bool merge_provenance(std::vector<std::string> &into, const std::vector<std::string> &from) {
  const auto before = into.size();
  std::vector<std::string> merged;
  std::vector<std::string> sorted_from(from);
  std::sort(sorted_from.begin(), sorted_from.end());
  std::set_union(into.begin(), into.end(), sorted_from.begin(), sorted_from.end(),
                 std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  into = std::move(merged);
  return into.size() != before;
}

GenericElement &GenericModel::upsert_element(std::string_view kind, std::string_view natural_key,
                                             std::string_view name, Confidence confidence,
                                             const std::vector<std::string> &provenance) {
  const auto id = make_elem_id(kind, natural_key);
  auto it = elements.find(id);
  if (it == elements.end()) {
    GenericElement e;
    e.elem_id = id;
    e.kind = std::string(kind);
    e.natural_key = std::string(natural_key);
    e.name = std::string(name);
    e.confidence = confidence;
    it = elements.emplace(id, std::move(e)).first;
  }
  merge_provenance(it->second.provenance, provenance);
  return it->second;
}

GenericRelation &GenericModel::add_relation(RelationKind kind, const std::string &source,
                                            const std::string &target,
                                            const std::vector<std::string> &provenance) {
  if (!elements.count(source) || !elements.count(target))
    throw IntegrityError("relation endpoint missing: " + source + " -> " + target);
  if (source == target && kind != RelationKind::association)
    throw IntegrityError("self relation of kind " + std::string(to_string(kind)) + " on " +
                         source);
  const auto id = make_rel_id(kind, source, target);
  auto it = relations.find(id);
  if (it == relations.end()) {
    GenericRelation r;
    r.rel_id = id;
    r.kind = kind;
    r.source = source;
    r.target = target;
    it = relations.emplace(id, std::move(r)).first;
  }
  merge_provenance(it->second.provenance, provenance);
  return it->second;
}

const GenericElement *GenericModel::find(std::string_view kind,
                                         std::string_view natural_key) const {
  return get(make_elem_id(kind, natural_key));
}

GenericElement *GenericModel::find(std::string_view kind, std::string_view natural_key) {
  return get(make_elem_id(kind, natural_key));
}

const GenericElement *GenericModel::get(std::string_view elem_id) const {
  const auto it = elements.find(std::string(elem_id));
  return it == elements.end() ? nullptr : &it->second;
}

GenericElement *GenericModel::get(std::string_view elem_id) {
  const auto it = elements.find(std::string(elem_id));
  return it == elements.end() ? nullptr : &it->second;
}

std::vector<const GenericElement *> GenericModel::of_kind(std::string_view kind) const {
  std::vector<const GenericElement *> out;
  for (const auto &[id, e] : elements)
    if (e.kind == kind)
      out.push_back(&e);
  return out;
}

std::vector<const GenericRelation *> GenericModel::incoming(std::string_view elem_id) const {
  std::vector<const GenericRelation *> out;
  for (const auto &[id, r] : relations)
    if (r.target == elem_id)
      out.push_back(&r);
  return out;
}

std::vector<const GenericRelation *> GenericModel::outgoing(std::string_view elem_id) const {
  std::vector<const GenericRelation *> out;
  for (const auto &[id, r] : relations)
    if (r.source == elem_id)
      out.push_back(&r);
  return out;
}

bool GenericModel::has_incoming(std::string_view target, RelationKind kind,
                                std::string_view source_kind) const {
  for (const auto &[id, r] : relations) {
    if (r.target != target || r.kind != kind)
      continue;
    if (source_kind.empty())
      return true;
    const auto *src = get(r.source);
    if (src && src->kind == source_kind)
      return true;
  }
  return false;
}

std::size_t GenericModel::dummy_count() const {
  return static_cast<std::size_t>(std::count_if(
      elements.begin(), elements.end(), [](const auto &kv) { return kv.second.dummy; }));
}

void GenericModel::check_integrity() const {
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto &[id, e] : elements) {
    if (id != e.elem_id || id != make_elem_id(e.kind, e.natural_key))
      throw IntegrityError("element id does not match (kind, natural key): " + id);
    if (!keys.emplace(e.kind, e.natural_key).second)
      throw IntegrityError("duplicate (kind, natural key): " + e.kind + " " + e.natural_key);
    if (e.dummy && !e.provenance.empty())
      throw IntegrityError("dummy element with provenance: " + id);
  }
  for (const auto &[id, r] : relations) {
    if (id != r.rel_id || id != make_rel_id(r.kind, r.source, r.target))
      throw IntegrityError("relation id does not match content: " + id);
    if (!elements.count(r.source) || !elements.count(r.target))
      throw IntegrityError("dangling relation endpoint in " + id);
    if (r.source == r.target && r.kind != RelationKind::association)
      throw IntegrityError("forbidden self relation " + id);
  }
}

} // namespace eamine
