#include "eamine/error.hpp"
#include "eamine/exporter.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>

using namespace eamine;
using testing_support::golden;

namespace {

TargetModel small_model() {
  TargetModel tm;
  tm.metamodel_name = "archimate-3";
  TargetElement node{"id-0001", "Node", "intfw", {{"ip", "10.5.0.1"}, {"confidence", "auto"}},
                     false, "el-0001"};
  TargetElement os{"id-0002", "SystemSoftware", "Linux 4.15 - 5.8",
                   {{"os_source", "scanner"}, {"confidence", "auto"}}, false, "el-0002"};
  TargetElement dummy{"id-0003", "Node", "203.0.113.5 (dummy)",
                      {{"ip", "203.0.113.5"}, {"confidence", "semi-auto"}}, true, "el-0003"};
  tm.elements = {{node.id, node}, {os.id, os}, {dummy.id, dummy}};
  TargetRelation r1{"id-0101", "Assignment", "id-0001", "id-0002", "rel-0101"};
  TargetRelation r2{"id-0102", "Association", "id-0003", "id-0001", "rel-0102"};
  tm.relations = {{r1.id, r1}, {r2.id, r2}};
  return tm;
}

std::string slurp(const std::string &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Compares against a checked-in file; EAMINE_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string &name, const std::string &actual) {
  const auto path = golden(name);
  if (const char *u = std::getenv("EAMINE_UPDATE_GOLDEN"); u && std::string(u) == "1") {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  CHECK(slurp(path) == actual);
}

std::size_t lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_SUITE("exporter") {

TEST_CASE("small model matches the golden exchange file") {
  check_golden("small.archimate.xml", write_archimate_xml(small_model(), "small"));
  check_golden("small.dot", write_dot(small_model(), "small"));
}

TEST_CASE("exchange file reads back with ids, types, names and properties") {
  const auto tm = small_model();
  const auto doc = read_archimate_xml(write_archimate_xml(tm, "small"));
  CHECK(doc.root_namespace == kArchimateNamespace);
  REQUIRE(doc.elements.size() == 3);
  REQUIRE(doc.relationships.size() == 2);
  for (const auto &e : doc.elements) {
    const auto &src = tm.elements.at(e.id);
    CHECK(e.type == src.type);
    CHECK(e.name == src.name);
    CHECK(e.properties.at("confidence") == src.attrs.at("confidence"));
    CHECK((e.properties.count("dummy") == 1) == src.dummy);
  }
  for (const auto &r : doc.relationships) {
    const auto &src = tm.relations.at(r.id);
    CHECK(r.type == src.type);
    CHECK(r.source == src.source);
    CHECK(r.target == src.target);
  }
  CHECK(check_exchange_integrity(doc).empty());
}

TEST_CASE("empty model is a valid, empty document") {
  TargetModel tm;
  tm.metamodel_name = "archimate-3";
  const auto doc = read_archimate_xml(write_archimate_xml(tm, "empty"));
  CHECK(doc.elements.empty());
  CHECK(doc.relationships.empty());
  CHECK(check_exchange_integrity(doc).empty());
  CHECK(lines(write_dot(tm, "empty")) == 4);
}

TEST_CASE("only archimate-3 models can be written as exchange files") {
  auto tm = small_model();
  tm.metamodel_name = "naf-lite";
  CHECK_THROWS(write_archimate_xml(tm, "x"));
}

TEST_CASE("integrity check finds dangling references and duplicate ids") {
  ExchangeDocument doc;
  doc.elements.push_back({"id-1", "Node", "a", {}});
  doc.elements.push_back({"id-1", "Node", "b", {}});
  doc.relationships.push_back({"id-2", "Association", "id-1", "id-9"});
  CHECK(check_exchange_integrity(doc).size() == 2);
}

TEST_CASE("malformed XML is a parse error") {
  CHECK_THROWS_AS(read_archimate_xml("<model><elements>"), ParseError);
  CHECK_THROWS_AS(read_archimate_xml("<other/>"), ParseError);
}

TEST_CASE("names with markup characters survive") {
  auto tm = small_model();
  tm.elements.at("id-0001").name = "a<b & \"c\"";
  const auto doc = read_archimate_xml(write_archimate_xml(tm, "esc"));
  const auto it = std::find_if(doc.elements.begin(), doc.elements.end(),
                               [](const auto &e) { return e.id == "id-0001"; });
  REQUIRE(it != doc.elements.end());
  CHECK(it->name == "a<b & \"c\"");
  const auto dot = write_dot(tm, "esc");
  CHECK(dot.find("a<b & \\\"c\\\"") != std::string::npos);
}

TEST_CASE("DOT has one line per element and relation plus framing") {
  const auto tm = small_model();
  const auto dot = write_dot(tm, "small");
  CHECK(lines(dot) == tm.elements.size() + tm.relations.size() + 4);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(std::count(dot.begin(), dot.end(), '>') == 2); // two "->" edges
}

TEST_CASE("writers are byte-deterministic") {
  const auto tm = small_model();
  CHECK(write_archimate_xml(tm, "x") == write_archimate_xml(tm, "x"));
  CHECK(write_dot(tm, "x") == write_dot(tm, "x"));
}

} // TEST_SUITE
