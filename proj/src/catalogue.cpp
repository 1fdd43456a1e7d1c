#include "eamine/catalogue.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <utility>

namespace eamine {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
E enum_from(const std::array<std::pair<E, std::string_view>, N> &table, std::string_view s,
            const char *what) {
  for (const auto &[e, n] : table)
    if (n == s)
      return e;
  throw ParseError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <class E, std::size_t N>
std::string_view enum_name(const std::array<std::pair<E, std::string_view>, N> &table, E v) {
  for (const auto &[e, n] : table)
    if (e == v)
      return n;
  return "?";
}

constexpr std::array<std::pair<Layer, std::string_view>, 3> kLayers{
    {{Layer::business, "business"},
     {Layer::application, "application"},
     {Layer::technology, "technology"}}};
constexpr std::array<std::pair<Category, std::string_view>, 3> kCategories{
    {{Category::passive, "passive"},
     {Category::active, "active"},
     {Category::behaviour, "behaviour"}}};
constexpr std::array<std::pair<Confidence, std::string_view>, 3> kConfidences{
    {{Confidence::automatic, "auto"},
     {Confidence::semi_automatic, "semi-auto"},
     {Confidence::manual, "manual"}}};
constexpr std::array<std::pair<RelationKind, std::string_view>, 7> kRelations{
    {{RelationKind::association, "association"},
     {RelationKind::assignment, "assignment"},
     {RelationKind::realization, "realization"},
     {RelationKind::serving, "serving"},
     {RelationKind::composition, "composition"},
     {RelationKind::flow, "flow"},
     {RelationKind::access, "access"}}};

RelationTriple triple_from(const json &j) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError("allowed-matrix entry must be [source, relation, target]");
  return {j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::string>()};
}

} // namespace

std::string_view to_string(Layer l) noexcept { return enum_name(kLayers, l); }
std::string_view to_string(Category c) noexcept { return enum_name(kCategories, c); }
std::string_view to_string(Confidence c) noexcept { return enum_name(kConfidences, c); }
std::string_view to_string(RelationKind k) noexcept { return enum_name(kRelations, k); }
Layer layer_from_string(std::string_view s) { return enum_from(kLayers, s, "layer"); }
Category category_from_string(std::string_view s) {
  return enum_from(kCategories, s, "category");
}
Confidence confidence_from_string(std::string_view s) {
  return enum_from(kConfidences, s, "confidence");
}
RelationKind relation_kind_from_string(std::string_view s) {
  return enum_from(kRelations, s, "relation kind");
}

MetamodelDefinition parse_metamodel_definition(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ParseError(std::string("metamodel definition is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "eamine-metamodel")
      throw ParseError("metamodel definition: format must be \"eamine-metamodel\"");
    if (j.at("version").get<int>() != MetamodelDefinition::kFormatVersion)
      throw ParseError("metamodel definition: unsupported version " + j.at("version").dump());
    MetamodelDefinition def;
    def.name = j.at("name").get<std::string>();
    std::set<std::string> seen;
    for (const auto &t : j.at("element_types")) {
      TypeInfo info;
      if (t.is_string()) {
        info.name = t.get<std::string>();
      } else {
        info.name = t.at("name").get<std::string>();
        if (t.contains("layer"))
          info.layer = layer_from_string(t["layer"].get<std::string>());
        if (t.contains("category"))
          info.category = category_from_string(t["category"].get<std::string>());
        if (t.contains("automation"))
          info.automation = confidence_from_string(t["automation"].get<std::string>());
      }
      if (!seen.insert(info.name).second)
        throw ParseError("metamodel definition: duplicate element type " + info.name);
      def.element_types.push_back(std::move(info));
    }
    def.relation_types = j.at("relation_types").get<std::vector<std::string>>();
    def.default_relation = j.at("default_relation").get<std::string>();
    if (std::find(def.relation_types.begin(), def.relation_types.end(),
                  def.default_relation) == def.relation_types.end())
      throw ParseError("metamodel definition: default_relation '" + def.default_relation +
                       "' is not a relation type");
    if (j.contains("relation_map"))
      def.relation_map = j["relation_map"].get<std::map<std::string, std::string>>();
    if (j.contains("allowed")) {
      const auto &a = j["allowed"];
      def.allow_by_default = a.value("default", true);
      if (a.contains("allow"))
        for (const auto &t : a["allow"])
          def.allow.push_back(triple_from(t));
      if (a.contains("deny"))
        for (const auto &t : a["deny"])
          def.deny.push_back(triple_from(t));
    }
    return def;
  } catch (const json::exception &e) {
    throw ParseError(std::string("metamodel definition: ") + e.what());
  }
}

const Catalogue &Catalogue::builtin() {
  static const Catalogue cat = [] {
    using L = Layer;
    using C = Category;
    using A = Confidence;
    MetamodelDefinition def;
    def.name = "generic";
    auto add = [&](std::string_view n, L l, C c, A a) {
      def.element_types.push_back({std::string(n), l, c, a});
    };
    add(kind::Node, L::technology, C::active, A::automatic);
    add(kind::Device, L::technology, C::active, A::automatic);
    add(kind::SystemSoftware, L::technology, C::active, A::automatic);
    add(kind::ApplicationInterface, L::application, C::active, A::automatic);
    add(kind::ApplicationComponent, L::application, C::active, A::semi_automatic);
    add(kind::ApplicationCollaboration, L::application, C::active, A::manual);
    add(kind::ITService, L::technology, C::behaviour, A::semi_automatic);
    add(kind::Path, L::technology, C::active, A::automatic);
    add(kind::CommunicationNetwork, L::technology, C::active, A::automatic);
    add(kind::TechnologyFunction, L::technology, C::behaviour, A::semi_automatic);
    add(kind::TechnologyProcess, L::technology, C::behaviour, A::semi_automatic);
    add(kind::TechnologyInteraction, L::technology, C::behaviour, A::manual);
    add(kind::TechnologyEvent, L::technology, C::behaviour, A::semi_automatic);
    add(kind::BusinessActor, L::business, C::active, A::semi_automatic);
    add(kind::BusinessRole, L::business, C::active, A::semi_automatic);
    add(kind::BusinessProcess, L::business, C::behaviour, A::manual);
    for (auto k : kAllRelationKinds)
      def.relation_types.emplace_back(to_string(k));
    def.default_relation = "association";
    return from_definition(def);
  }();
  return cat;
}

Catalogue Catalogue::from_definition(const MetamodelDefinition &def) {
  Catalogue cat;
  for (const auto &t : def.element_types) {
    if (!t.layer || !t.category || !t.automation)
      throw ParseError("catalogue kind " + t.name + " needs layer, category and automation");
    cat.kinds_.push_back(t);
  }
  for (const auto &r : def.relation_types)
    cat.relations_.push_back(relation_kind_from_string(r));
  return cat;
}

const TypeInfo &Catalogue::lookup_kind(std::string_view name) const {
  for (const auto &k : kinds_)
    if (iequals(k.name, name))
      return k;
  throw NotFound("unknown element kind '" + std::string(name) + "'");
}

bool Catalogue::contains(std::string_view name) const noexcept {
  return std::any_of(kinds_.begin(), kinds_.end(),
                     [&](const TypeInfo &k) { return iequals(k.name, name); });
}

Confidence Catalogue::automation(std::string_view kind) const {
  return *lookup_kind(kind).automation;
}

} // namespace eamine
