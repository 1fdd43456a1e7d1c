#pragma once

#include "eamine/catalogue.hpp"
#include "eamine/observation.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

struct GenericElement {
  std::string elem_id;
  std::string kind;        // catalogue kind name
  std::string natural_key; // evidence-derived identity within the kind
  std::string name;
  Attrs attrs;
  bool dummy = false;
  std::vector<std::string> provenance; // sorted, unique obs_ids
  Confidence confidence = Confidence::automatic;

  bool operator==(const GenericElement &) const = default;
};

struct GenericRelation {
  std::string rel_id;
  RelationKind kind = RelationKind::association;
  std::string source;
  std::string target;
  Attrs attrs;
  std::vector<std::string> provenance;

  bool operator==(const GenericRelation &) const = default;
};

std::string make_elem_id(std::string_view kind, std::string_view natural_key);
std::string make_rel_id(RelationKind kind, std::string_view source, std::string_view target);

/// Sorted-set union of provenance lists. Returns true when `into` grew.
bool merge_provenance(std::vector<std::string> &into, const std::vector<std::string> &from);

/// Framework-neutral EA graph. Element ids derive from (kind, natural key) and
/// relation ids from (kind, source, target), so both are unique by construction.
class GenericModel {
public:
  std::map<std::string, GenericElement> elements;
  std::map<std::string, GenericRelation> relations;

  /// Returns the element for (kind, key), creating it when absent. Provenance
  /// is merged into an existing element; name/attrs of existing elements are
  /// left alone.
  GenericElement &upsert_element(std::string_view kind, std::string_view natural_key,
                                 std::string_view name, Confidence confidence,
                                 const std::vector<std::string> &provenance = {});

  /// Adds or extends the relation (kind, source, target). Both endpoints must
  /// exist; source == target is only allowed for association.
  GenericRelation &add_relation(RelationKind kind, const std::string &source,
                                const std::string &target,
                                const std::vector<std::string> &provenance = {});

  const GenericElement *find(std::string_view kind, std::string_view natural_key) const;
  GenericElement *find(std::string_view kind, std::string_view natural_key);
  const GenericElement *get(std::string_view elem_id) const;
  GenericElement *get(std::string_view elem_id);

  std::vector<const GenericElement *> of_kind(std::string_view kind) const;
  std::vector<const GenericRelation *> incoming(std::string_view elem_id) const;
  std::vector<const GenericRelation *> outgoing(std::string_view elem_id) const;
  /// True when a relation `kind` from an element of `source_kind` points at
  /// `target`. Empty source_kind matches any kind.
  bool has_incoming(std::string_view target, RelationKind kind,
                    std::string_view source_kind = {}) const;

  std::size_t dummy_count() const;

  /// Throws IntegrityError on dangling endpoints, duplicate (kind, key),
  /// id/content mismatch or a forbidden self-relation.
  void check_integrity() const;

  bool operator==(const GenericModel &) const = default;
};

} // namespace eamine
