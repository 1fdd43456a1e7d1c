#include "eamine/error.hpp"
#include "eamine/transformer.hpp"
#include "eamine/util.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace eamine;

namespace {

std::string data(const std::string &f) { return std::string(EAMINE_SOURCE_DATA_DIR) + "/" + f; }

const TargetMetamodel &archimate() {
  static const auto mm = TargetMetamodel::load(data("archimate-3.metamodel.json"));
  return mm;
}

const RuleSet &archimate_rules() {
  static const auto rs = RuleSet::load(data("archimate-3.rules.json"), archimate());
  return rs;
}

bool has_entry(const ChangeLog &log, ChangeAction a, const std::string &subject) {
  return std::any_of(log.entries.begin(), log.entries.end(), [&](const ChangeEntry &e) {
    return e.action == a && e.subject == subject;
  });
}

} // namespace

TEST_SUITE("transformer") {

TEST_CASE("Node stays Node, ITService becomes TechnologyService") {
  GenericModel m;
  const auto node = m.upsert_element(kind::Node, "ip:10.0.0.1", "web", Confidence::automatic).elem_id;
  const auto svc = m.upsert_element(kind::ITService, "http@10.0.0.1", "http", Confidence::automatic).elem_id;
  const auto r = transform(m, archimate_rules(), archimate());
  CHECK(r.model.elements.at(target_id(node)).type == "Node");
  CHECK(r.model.elements.at(target_id(svc)).type == "TechnologyService");
  CHECK(r.model.elements.at(target_id(node)).attrs.at("confidence") == "auto");
  CHECK(has_entry(r.changes, ChangeAction::mapped, svc));
  CHECK_FALSE(has_entry(r.changes, ChangeAction::mapped, node));
  CHECK(r.model.metamodel_name == "archimate-3");
}

TEST_CASE("kind without a rule is dropped and logged") {
  const auto naf = TargetMetamodel::load(data("naf-lite.metamodel.json"));
  const auto rules = RuleSet::load(data("naf-lite.rules.json"), naf);
  GenericModel m;
  const auto collab =
      m.upsert_element(kind::ApplicationCollaboration, "c", "c", Confidence::manual).elem_id;
  const auto a = assign(m, rules, naf);
  CHECK(a.types.empty());
  REQUIRE(a.unmapped == std::vector<std::string>{collab});
  const auto r = transform(m, rules, naf);
  CHECK(r.model.elements.empty());
  CHECK(has_entry(r.changes, ChangeAction::dropped, collab));
}

TEST_CASE("allowed relation passes unchanged") {
  GenericModel m;
  const auto node = m.upsert_element(kind::Node, "n", "n", Confidence::automatic).elem_id;
  const auto dev = m.upsert_element(kind::Device, "d", "d", Confidence::automatic).elem_id;
  const auto rel = m.add_relation(RelationKind::assignment, node, dev).rel_id;
  const auto r = transform(m, archimate_rules(), archimate());
  REQUIRE(r.model.relations.size() == 1);
  const auto &tr = r.model.relations.at(target_id(rel));
  CHECK(tr.type == "Assignment");
  CHECK(tr.source == target_id(node));
  CHECK(tr.target == target_id(dev));
  CHECK(r.changes.count(ChangeAction::downgraded) == 0);
}

TEST_CASE("forbidden triple is downgraded to the default relation") {
  GenericModel m;
  const auto node = m.upsert_element(kind::Node, "n", "n", Confidence::automatic).elem_id;
  const auto ifc =
      m.upsert_element(kind::ApplicationInterface, "i", "i", Confidence::automatic).elem_id;
  const auto rel = m.add_relation(RelationKind::assignment, node, ifc).rel_id;
  const auto r = transform(m, archimate_rules(), archimate());
  CHECK(r.model.relations.at(target_id(rel)).type == "Association");
  CHECK(has_entry(r.changes, ChangeAction::downgraded, rel));
}

TEST_CASE("relation touching an unmapped element is dropped") {
  const auto naf = TargetMetamodel::load(data("naf-lite.metamodel.json"));
  const auto rules = RuleSet::load(data("naf-lite.rules.json"), naf);
  GenericModel m;
  const auto node = m.upsert_element(kind::Node, "n", "n", Confidence::automatic).elem_id;
  const auto col =
      m.upsert_element(kind::ApplicationCollaboration, "c", "c", Confidence::manual).elem_id;
  const auto rel = m.add_relation(RelationKind::association, col, node).rel_id;
  const auto r = transform(m, rules, naf);
  CHECK(r.model.relations.empty());
  CHECK(has_entry(r.changes, ChangeAction::dropped, rel));
  CHECK(r.model.elements.at(target_id(node)).type == "PhysicalResource");
}

TEST_CASE("empty model gives an empty target model") {
  const auto r = transform(GenericModel{}, archimate_rules(), archimate());
  CHECK(r.model.elements.empty());
  CHECK(r.model.relations.empty());
  CHECK(r.changes.entries.empty());
}

TEST_CASE("NAF-lite maps every relation to its connector") {
  const auto naf = TargetMetamodel::load(data("naf-lite.metamodel.json"));
  const auto rules = RuleSet::load(data("naf-lite.rules.json"), naf);
  GenericModel m;
  const auto a = m.upsert_element(kind::Node, "n", "n", Confidence::automatic).elem_id;
  const auto b = m.upsert_element(kind::SystemSoftware, "s", "s", Confidence::automatic).elem_id;
  m.add_relation(RelationKind::assignment, a, b);
  m.add_relation(RelationKind::flow, b, a);
  const auto r = transform(m, rules, naf);
  CHECK(r.model.elements.at(target_id(a)).type == "PhysicalResource");
  CHECK(r.model.elements.at(target_id(b)).type == "Software");
  for (const auto &[id, rel] : r.model.relations)
    CHECK(rel.type == "connector");
}

TEST_CASE("conditional rules win over the fallback") {
  const auto rules = RuleSet::parse(R"({"format":"eamine-rules","version":1,
    "metamodel":"archimate-3","rules":[
      {"from":"Node","to":"Node"},
      {"from":"Node","to":"Device","when":{"device_class":"hardware"}}]})",
                                    archimate());
  GenericModel m;
  auto &hw = m.upsert_element(kind::Node, "a", "a", Confidence::automatic);
  hw.attrs["device_class"] = "hardware";
  const auto hw_id = hw.elem_id;
  const auto plain = m.upsert_element(kind::Node, "b", "b", Confidence::automatic).elem_id;
  const auto a = assign(m, rules, archimate());
  CHECK(a.types.at(hw_id) == "Device");
  CHECK(a.types.at(plain) == "Node");
}

TEST_CASE("bad rule files are rejected") {
  const auto &mm = archimate();
  CHECK_THROWS_AS(RuleSet::parse("{", mm), ParseError);
  CHECK_THROWS_AS(RuleSet::parse(R"({"format":"x","version":1,"metamodel":"archimate-3","rules":[]})", mm),
                  ParseError);
  CHECK_THROWS_AS(RuleSet::parse(R"({"format":"eamine-rules","version":1,"metamodel":"naf-lite","rules":[]})", mm),
                  ParseError);
  CHECK_THROWS_AS(RuleSet::parse(R"({"format":"eamine-rules","version":1,"metamodel":"archimate-3",
      "rules":[{"from":"Gizmo","to":"Node"}]})", mm),
                  ParseError);
  CHECK_THROWS_AS(RuleSet::parse(R"({"format":"eamine-rules","version":1,"metamodel":"archimate-3",
      "rules":[{"from":"Node","to":"Gizmo"}]})", mm),
                  ParseError);
  CHECK_THROWS_AS(RuleSet::parse(R"({"format":"eamine-rules","version":1,"metamodel":"archimate-3",
      "rules":[{"from":"Node","to":"Node"},{"from":"Node","to":"Device"}]})", mm),
                  ParseError);
}

TEST_CASE("association-only metamodel downgrades everything else") {
  const auto mm = TargetMetamodel::load(std::string(EAMINE_FIXTURE_DIR) +
                                        "/restrictive/association-only.metamodel.json");
  const auto rules = RuleSet::load(std::string(EAMINE_FIXTURE_DIR) +
                                       "/restrictive/association-only.rules.json",
                                   mm);
  GenericModel m;
  const auto n = m.upsert_element(kind::Node, "n", "n", Confidence::automatic).elem_id;
  const auto d = m.upsert_element(kind::Device, "d", "d", Confidence::automatic).elem_id;
  const auto s = m.upsert_element(kind::SystemSoftware, "s", "s", Confidence::automatic).elem_id;
  m.add_relation(RelationKind::assignment, n, d);
  m.add_relation(RelationKind::assignment, n, s);
  m.add_relation(RelationKind::association, n, s);
  const auto r = transform(m, rules, mm);
  CHECK(r.model.relations.size() == 3);
  for (const auto &[id, rel] : r.model.relations)
    CHECK(rel.type == "Association");
  CHECK(r.changes.count(ChangeAction::downgraded) == 2);
}

TEST_CASE("random models: every element and relation is accounted for, output is sound") {
  std::mt19937 rng(2024);
  const auto &cat = Catalogue::builtin();
  std::vector<std::string> kinds;
  for (const auto &k : cat.kinds())
    kinds.push_back(k.name);
  const auto &mm_all = archimate();
  std::vector<std::string> types(mm_all.element_types().begin(), mm_all.element_types().end());
  std::vector<std::string> rtypes(mm_all.relation_types().begin(), mm_all.relation_types().end());

  for (int iter = 0; iter < 100; ++iter) {
    // Random deny list on top of the bundled definition.
    auto def = parse_metamodel_definition(read_file(data("archimate-3.metamodel.json")));
    std::uniform_int_distribution<std::size_t> pt(0, types.size() - 1), pr(0, rtypes.size() - 1);
    for (int i = 0; i < 10; ++i)
      def.deny.push_back({types[pt(rng)], rtypes[pr(rng)], types[pt(rng)]});
    if (iter % 3 == 0)
      def.deny.push_back({types[pt(rng)], "Association", "*"});
    const auto mm = TargetMetamodel::from_definition(def);
    // Rules for a random subset of kinds.
    RuleSet rules{"archimate-3", {}};
    for (const auto &rule : archimate_rules().rules)
      if (rng() % 4 != 0)
        rules.rules.push_back(rule);

    GenericModel m;
    std::uniform_int_distribution<std::size_t> pk(0, kinds.size() - 1);
    std::vector<std::string> ids;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i)
      ids.push_back(m.upsert_element(kinds[pk(rng)], "k" + std::to_string(i), "e" + std::to_string(i),
                                     Confidence::automatic)
                        .elem_id);
    for (int i = 0; !ids.empty() && i < 20; ++i) {
      const auto &s = ids[rng() % ids.size()];
      const auto &t = ids[rng() % ids.size()];
      const auto rk = kAllRelationKinds[rng() % kAllRelationKinds.size()];
      if (s != t || rk == RelationKind::association)
        m.add_relation(rk, s, t);
    }

    const auto r = transform(m, rules, mm);
    CAPTURE(iter);
    for (const auto &[id, e] : m.elements) {
      const bool present = r.model.elements.count(target_id(id)) == 1;
      CHECK(present != has_entry(r.changes, ChangeAction::dropped, id));
    }
    for (const auto &[id, rel] : m.relations) {
      const bool present = r.model.relations.count(target_id(id)) == 1;
      CHECK(present != has_entry(r.changes, ChangeAction::dropped, id));
    }
    for (const auto &[id, rel] : r.model.relations) {
      const auto &s = r.model.elements.at(rel.source);
      const auto &t = r.model.elements.at(rel.target);
      CHECK(mm.allowed(s.type, rel.type, t.type));
      CHECK(m.relations.count(rel.generic_id) == 1);
    }
    for (const auto &[id, e] : r.model.elements) {
      CHECK(mm.element_types().count(e.type) == 1);
      CHECK(m.elements.count(e.generic_id) == 1);
    }
  }
}

TEST_CASE("target ids keep the hash and change the prefix") {
  CHECK(target_id("el-00ff") == "id-00ff");
  CHECK(target_id("rel-abc") == "id-abc");
}

TEST_CASE("change actions round-trip") {
  for (auto a : {ChangeAction::mapped, ChangeAction::downgraded, ChangeAction::dropped,
                 ChangeAction::defaulted})
    CHECK(change_action_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(change_action_from_string("nope"), ParseError);
}

} // TEST_SUITE
