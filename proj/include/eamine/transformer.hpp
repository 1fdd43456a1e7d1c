#pragma once

#include "eamine/catalogue.hpp"
#include "eamine/model.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

/// Type system of a target EA framework.
class TargetMetamodel {
public:
  static TargetMetamodel from_definition(const MetamodelDefinition &def);
  static TargetMetamodel parse(std::string_view json_text);
  static TargetMetamodel load(const std::string &path);

  const std::string &name() const noexcept { return name_; }
  const std::set<std::string> &element_types() const noexcept { return element_types_; }
  const std::set<std::string> &relation_types() const noexcept { return relation_types_; }
  const std::string &default_relation() const noexcept { return default_relation_; }
  /// Target relation type for a generic relation kind; nullptr when the
  /// metamodel has no translation (the default relation is used).
  const std::string *translate(RelationKind kind) const;
  /// Matrix lookup: explicit deny wins, then explicit allow, then the default.
  bool allowed(std::string_view source_type, std::string_view relation_type,
               std::string_view target_type) const;

private:
  std::string name_;
  std::set<std::string> element_types_;
  std::set<std::string> relation_types_;
  std::string default_relation_;
  std::map<RelationKind, std::string> relation_map_;
  bool allow_by_default_ = true;
  std::vector<RelationTriple> allow_;
  std::vector<RelationTriple> deny_;
};

struct TransformRule {
  std::string from_kind;
  std::string to_type;
  std::map<std::string, std::string> condition; // attr equality tests; empty = unconditional
};

/// Rule file:
///   { "format": "eamine-rules", "version": 1, "metamodel": "<name>",
///     "rules": [ {"from": kind, "to": type, "when": {attr: value}?} ] }
struct RuleSet {
  std::string metamodel;
  std::vector<TransformRule> rules;

  /// Validates kinds against the catalogue and types against the metamodel.
  /// Two unconditional rules for one kind is an error.
  static RuleSet parse(std::string_view json_text, const TargetMetamodel &mm,
                       const Catalogue &cat = Catalogue::builtin());
  static RuleSet load(const std::string &path, const TargetMetamodel &mm,
                      const Catalogue &cat = Catalogue::builtin());
};

enum class ChangeAction { mapped, downgraded, dropped, defaulted };
std::string_view to_string(ChangeAction a) noexcept;
ChangeAction change_action_from_string(std::string_view s);

struct ChangeEntry {
  ChangeAction action = ChangeAction::mapped;
  std::string subject; // generic elem_id or rel_id
  std::string detail;

  bool operator==(const ChangeEntry &) const = default;
};

struct ChangeLog {
  std::vector<ChangeEntry> entries;

  std::size_t count(ChangeAction a) const;
  bool operator==(const ChangeLog &) const = default;
};

struct Assignment {
  std::map<std::string, std::string> types; // generic elem_id -> target type
  std::vector<std::string> unmapped;        // generic elem_ids without a rule
};

/// Conditional rules for a kind are tried first, in file order, then the
/// unconditional fallback.
Assignment assign(const GenericModel &model, const RuleSet &rules, const TargetMetamodel &mm);

struct AdjustedRelation {
  std::string rel_id; // generic relation id
  std::string type;
  std::string source; // generic elem_ids
  std::string target;
};

struct PlausibilityResult {
  std::vector<AdjustedRelation> relations;
  ChangeLog changes;
};

/// Translates every relation kind, downgrades forbidden triples to the default
/// relation and drops relations touching unmapped elements.
PlausibilityResult check_plausibility(const Assignment &assignment, const GenericModel &model,
                                      const TargetMetamodel &mm);

struct TargetElement {
  std::string id;
  std::string type;
  std::string name;
  Attrs attrs;
  bool dummy = false;
  std::string generic_id;

  bool operator==(const TargetElement &) const = default;
};

struct TargetRelation {
  std::string id;
  std::string type;
  std::string source;
  std::string target;
  std::string generic_id;

  bool operator==(const TargetRelation &) const = default;
};

struct TargetModel {
  std::string metamodel_name;
  std::map<std::string, TargetElement> elements;
  std::map<std::string, TargetRelation> relations;

  bool operator==(const TargetModel &) const = default;
};

/// Exchange identifier for a generic element or relation id: "id-<hash>".
std::string target_id(std::string_view generic_id);

struct GenerateResult {
  TargetModel model;
  ChangeLog changes;
};

/// Builds the target model. The returned ChangeLog holds the assigner's and
/// checker's entries plus one `dropped` entry per unmapped element. Throws
/// IntegrityError if the result would violate the metamodel.
GenerateResult generate(const GenericModel &model, const Assignment &assignment,
                        const PlausibilityResult &adjusted, const TargetMetamodel &mm);

/// assign + check_plausibility + generate.
GenerateResult transform(const GenericModel &model, const RuleSet &rules,
                         const TargetMetamodel &mm);

} // namespace eamine
