#pragma once

#include "eamine/transformer.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

inline constexpr std::string_view kArchimateNamespace = "http://www.opengroup.org/xsd/archimate/3.0/";

/// ArchiMate Model Exchange File Format (3.x) document. Elements and
/// relationships are emitted in identifier order. Every attribute becomes a
/// property; dummy elements carry the property `dummy` = "true" and every
/// element carries `confidence`. Requires an "archimate-3" target model.
std::string write_archimate_xml(const TargetModel &tm, std::string_view model_name);

/// Graphviz description: one node per element labelled "type: name", one
/// edge per relation, dummies dashed.
std::string write_dot(const TargetModel &tm, std::string_view graph_name);

/// What the minimal reader recovers from an exchange document.
struct ExchangeDocument {
  struct Element {
    std::string id;
    std::string type;
    std::string name;
    std::map<std::string, std::string> properties; // by property name
  };
  struct Relationship {
    std::string id;
    std::string type;
    std::string source;
    std::string target;
  };
  std::string root_namespace;
  std::vector<Element> elements;
  std::vector<Relationship> relationships;
};

/// Parses an exchange document (throws ParseError on malformed XML).
ExchangeDocument read_archimate_xml(std::string_view xml);

/// Post-parse checks: unique identifiers and every relationship endpoint
/// declared. Returns human-readable problems; empty when sound.
std::vector<std::string> check_exchange_integrity(const ExchangeDocument &doc);

} // namespace eamine
