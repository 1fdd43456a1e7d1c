#include "eamine/exporter.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>
#include <set>
#include <sstream>

namespace eamine {

namespace pt = boost::property_tree;

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default:
      // Control characters are not representable in XML 1.0.
      if (c < 0x20 && c != '\t' && c != '\n' && c != '\r')
        out += '?';
      else
        out += static_cast<char>(c);
    }
  }
  return out;
}

std::string property_id(std::string_view key) {
  std::string id = "propid-";
  for (unsigned char c : key)
    id += std::isalnum(c) ? static_cast<char>(c) : '_';
  return id;
}

Attrs properties_of(const TargetElement &e) {
  Attrs props = e.attrs;
  if (e.dummy)
    props["dummy"] = "true";
  return props;
}

} // namespace

std::string write_archimate_xml(const TargetModel &tm, std::string_view model_name) {
  if (tm.metamodel_name != "archimate-3")
    throw Error("cannot write ArchiMate exchange format for metamodel '" + tm.metamodel_name +
                "'");
  std::set<std::string> ids;
  for (const auto &[id, e] : tm.elements)
    if (!ids.insert(id).second)
      throw IntegrityError("duplicate identifier " + id);
  for (const auto &[id, r] : tm.relations)
    if (!ids.insert(id).second)
      throw IntegrityError("duplicate identifier " + id);

  std::set<std::string> prop_keys;
  for (const auto &[id, e] : tm.elements)
    for (const auto &[k, v] : properties_of(e))
      prop_keys.insert(k);

  std::ostringstream x;
  x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<model xmlns=\"" << kArchimateNamespace << "\"\n"
    << "       xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
    << "       xsi:schemaLocation=\"" << kArchimateNamespace
    << " http://www.opengroup.org/xsd/archimate/3.1/archimate3_Model.xsd\"\n"
    << "       identifier=\"id-" << hex64(fnv1a(model_name)) << "\">\n"
    << "  <name xml:lang=\"en\">" << xml_escape(model_name) << "</name>\n";

  if (tm.elements.empty()) {
    x << "  <elements/>\n";
  } else {
    x << "  <elements>\n";
    for (const auto &[id, e] : tm.elements) {
      x << "    <element identifier=\"" << xml_escape(id) << "\" xsi:type=\""
        << xml_escape(e.type) << "\">\n"
        << "      <name xml:lang=\"en\">" << xml_escape(e.name) << "</name>\n";
      const auto props = properties_of(e);
      if (!props.empty()) {
        x << "      <properties>\n";
        for (const auto &[k, v] : props)
          x << "        <property propertyDefinitionRef=\"" << property_id(k) << "\">\n"
            << "          <value xml:lang=\"en\">" << xml_escape(v) << "</value>\n"
            << "        </property>\n";
        x << "      </properties>\n";
      }
      x << "    </element>\n";
    }
    x << "  </elements>\n";
  }

  if (tm.relations.empty()) {
    x << "  <relationships/>\n";
  } else {
    x << "  <relationships>\n";
    for (const auto &[id, r] : tm.relations)
      x << "    <relationship identifier=\"" << xml_escape(id) << "\" source=\""
        << xml_escape(r.source) << "\" target=\"" << xml_escape(r.target) << "\" xsi:type=\""
        << xml_escape(r.type) << "\"/>\n";
    x << "  </relationships>\n";
  }

  if (!prop_keys.empty()) {
    x << "  <propertyDefinitions>\n";
    for (const auto &k : prop_keys)
      x << "    <propertyDefinition identifier=\"" << property_id(k) << "\" type=\"string\">\n"
        << "      <name xml:lang=\"en\">" << xml_escape(k) << "</name>\n"
        << "    </propertyDefinition>\n";
    x << "  </propertyDefinitions>\n";
  }
  x << "</model>\n";
  return x.str();
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string write_dot(const TargetModel &tm, std::string_view graph_name) {
  std::ostringstream d;
  d << "digraph " << dot_quote(graph_name) << " {\n"
    << "  rankdir=LR;\n"
    << "  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const auto &[id, e] : tm.elements) {
    d << "  " << dot_quote(id) << " [label=" << dot_quote(e.type + ": " + e.name);
    if (e.dummy)
      d << ", style=dashed, color=red";
    d << "];\n";
  }
  for (const auto &[id, r] : tm.relations)
    d << "  " << dot_quote(r.source) << " -> " << dot_quote(r.target)
      << " [label=" << dot_quote(r.type) << "];\n";
  d << "}\n";
  return d.str();
}

ExchangeDocument read_archimate_xml(std::string_view xml) {
  pt::ptree doc;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error &e) {
    throw ParseError("malformed exchange XML: " + e.message(), e.line());
  }
  const auto root = doc.get_child_optional("model");
  if (!root)
    throw ParseError("exchange XML: root element is not <model>");
  ExchangeDocument out;
  out.root_namespace = root->get<std::string>("<xmlattr>.xmlns", "");

  std::map<std::string, std::string> prop_names;
  if (const auto defs = root->get_child_optional("propertyDefinitions"))
    for (const auto &[tag, d] : *defs)
      if (tag == "propertyDefinition")
        prop_names[d.get<std::string>("<xmlattr>.identifier", "")] = d.get<std::string>("name", "");

  if (const auto els = root->get_child_optional("elements")) {
    for (const auto &[tag, e] : *els) {
      if (tag != "element")
        continue;
      ExchangeDocument::Element el;
      el.id = e.get<std::string>("<xmlattr>.identifier", "");
      el.type = e.get<std::string>("<xmlattr>.xsi:type", "");
      el.name = e.get<std::string>("name", "");
      if (const auto props = e.get_child_optional("properties"))
        for (const auto &[ptag, p] : *props)
          if (ptag == "property") {
            const auto ref = p.get<std::string>("<xmlattr>.propertyDefinitionRef", "");
            const auto it = prop_names.find(ref);
            el.properties[it == prop_names.end() ? ref : it->second] =
                p.get<std::string>("value", "");
          }
      out.elements.push_back(std::move(el));
    }
  }
  if (const auto rels = root->get_child_optional("relationships")) {
    for (const auto &[tag, r] : *rels) {
      if (tag != "relationship")
        continue;
      out.relationships.push_back({r.get<std::string>("<xmlattr>.identifier", ""),
                                   r.get<std::string>("<xmlattr>.xsi:type", ""),
                                   r.get<std::string>("<xmlattr>.source", ""),
                                   r.get<std::string>("<xmlattr>.target", "")});
    }
  }
  return out;
}

std::vector<std::string> check_exchange_integrity(const ExchangeDocument &doc) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::set<std::string> element_ids;
  for (const auto &e : doc.elements) {
    if (e.id.empty())
      problems.push_back("element without identifier");
    else if (!ids.insert(e.id).second)
      problems.push_back("duplicate identifier " + e.id);
    element_ids.insert(e.id);
  }
  for (const auto &r : doc.relationships) {
    if (!ids.insert(r.id).second)
      problems.push_back("duplicate identifier " + r.id);
    if (!element_ids.count(r.source))
      problems.push_back("relationship " + r.id + " source " + r.source + " is not declared");
    if (!element_ids.count(r.target))
      problems.push_back("relationship " + r.id + " target " + r.target + " is not declared");
  }
  return problems;
}

} // namespace eamine
