#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

enum class Layer { business, application, technology };
enum class Category { passive, active, behaviour };
enum class Confidence { automatic, semi_automatic, manual };
enum class RelationKind { association, assignment, realization, serving, composition, flow, access };

inline constexpr std::array<RelationKind, 7> kAllRelationKinds{
    RelationKind::association, RelationKind::assignment, RelationKind::realization,
    RelationKind::serving,     RelationKind::composition, RelationKind::flow,
    RelationKind::access};

std::string_view to_string(Layer l) noexcept;
std::string_view to_string(Category c) noexcept;
std::string_view to_string(Confidence c) noexcept; // "auto", "semi-auto", "manual"
std::string_view to_string(RelationKind k) noexcept;
Layer layer_from_string(std::string_view s);
Category category_from_string(std::string_view s);
Confidence confidence_from_string(std::string_view s);
RelationKind relation_kind_from_string(std::string_view s);

/// Canonical generic element kind names.
namespace kind {
inline constexpr std::string_view Node = "Node";
inline constexpr std::string_view Device = "Device";
inline constexpr std::string_view SystemSoftware = "SystemSoftware";
inline constexpr std::string_view ApplicationInterface = "ApplicationInterface";
inline constexpr std::string_view ApplicationComponent = "ApplicationComponent";
inline constexpr std::string_view ApplicationCollaboration = "ApplicationCollaboration";
inline constexpr std::string_view ITService = "ITService";
inline constexpr std::string_view Path = "Path";
inline constexpr std::string_view CommunicationNetwork = "CommunicationNetwork";
inline constexpr std::string_view TechnologyFunction = "TechnologyFunction";
inline constexpr std::string_view TechnologyProcess = "TechnologyProcess";
inline constexpr std::string_view TechnologyInteraction = "TechnologyInteraction";
inline constexpr std::string_view TechnologyEvent = "TechnologyEvent";
inline constexpr std::string_view BusinessActor = "BusinessActor";
inline constexpr std::string_view BusinessRole = "BusinessRole";
inline constexpr std::string_view BusinessProcess = "BusinessProcess";
} // namespace kind

/// Element type entry of a metamodel definition. The generic catalogue fills
/// every field; target metamodels may leave the optional ones empty.
struct TypeInfo {
  std::string name;
  std::optional<Layer> layer;
  std::optional<Category> category;
  std::optional<Confidence> automation;

  bool operator==(const TypeInfo &) const = default;
};

/// (source type, relation type, target type); "*" matches anything.
struct RelationTriple {
  std::string source;
  std::string relation;
  std::string target;

  bool operator==(const RelationTriple &) const = default;
};

/// Parsed form of a metamodel definition document. The generic catalogue and
/// every target framework share this schema:
///
///   { "format": "eamine-metamodel", "version": 1, "name": "...",
///     "element_types": [ {"name", "layer"?, "category"?, "automation"?} ],
///     "relation_types": [ ... ], "default_relation": "...",
///     "relation_map": { generic relation kind: relation type }?,
///     "allowed": { "default": bool, "allow": [[s,r,t]...]?, "deny": [[s,r,t]...]? }? }
struct MetamodelDefinition {
  inline static constexpr int kFormatVersion = 1;

  std::string name;
  std::vector<TypeInfo> element_types;
  std::vector<std::string> relation_types;
  std::string default_relation;
  std::map<std::string, std::string> relation_map;
  bool allow_by_default = true;
  std::vector<RelationTriple> allow;
  std::vector<RelationTriple> deny;
};

MetamodelDefinition parse_metamodel_definition(std::string_view json_text);

/// The generic, framework-neutral metamodel. Immutable once built.
class Catalogue {
public:
  /// The bundled generic catalogue.
  static const Catalogue &builtin();
  /// Builds a catalogue from a definition document. Every element type needs
  /// layer, category and automation; relation types must be generic kinds.
  static Catalogue from_definition(const MetamodelDefinition &def);

  /// Case-insensitive lookup on canonical names. Throws NotFound.
  const TypeInfo &lookup_kind(std::string_view name) const;
  bool contains(std::string_view name) const noexcept;
  const std::vector<TypeInfo> &kinds() const noexcept { return kinds_; }
  const std::vector<RelationKind> &relation_kinds() const noexcept { return relations_; }
  /// Automation degree of a kind; the confidence its automatic rule assigns.
  Confidence automation(std::string_view kind) const;

private:
  std::vector<TypeInfo> kinds_;
  std::vector<RelationKind> relations_;
};

} // namespace eamine
