#include "eamine/ingest.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <exception>
#include <filesystem>
#include <map>
#include <regex>
#include <sstream>

namespace eamine {

namespace pt = boost::property_tree;

namespace {

std::string xml_attr(const pt::ptree &node, const std::string &name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

struct CsvTable {
  std::map<std::string, std::size_t> columns;
  std::size_t header_line = 0;
};

/// Locates the header row and checks the required columns. Returns the index of
/// the first data line in `lines`.
std::size_t read_csv_header(const std::vector<std::string> &lines,
                            const std::vector<std::string_view> &required, CsvTable &table,
                            std::string_view what) {
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty())
    ++i;
  if (i == lines.size())
    throw SchemaError(std::string(what) + ": missing header row");
  const auto header = parse_csv_record(lines[i]);
  for (std::size_t c = 0; c < header.size(); ++c)
    table.columns.emplace(to_lower(trim(header[c])), c);
  for (auto col : required)
    if (!table.columns.count(std::string(col)))
      throw SchemaError(std::string(what) + ": missing column '" + std::string(col) + "'");
  table.header_line = i + 1;
  return i + 1;
}

std::string stem_of(std::string_view path) {
  return std::filesystem::path(std::string(path)).stem().string();
}

} // namespace

ParseResult parse_nmap(std::string_view xml, std::string_view source_path) {
  pt::ptree doc;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error &e) {
    throw ParseError("malformed scanner XML: " + e.message(), e.line());
  }
  const auto root = doc.find("nmaprun");
  if (root == doc.not_found())
    throw UnsupportedFormat("unsupported scanner XML: root element is not <nmaprun>");

  ParseResult result;
  std::size_t seq = 0;
  for (const auto &[tag, host] : root->second) {
    if (tag != "host")
      continue;
    if (const auto status = host.get_child_optional("status")) {
      if (xml_attr(*status, "state") != "up")
        continue;
    }
    std::string ip, ip6, mac, vendor;
    for (const auto &[atag, addr] : host) {
      if (atag != "address")
        continue;
      const auto type = xml_attr(addr, "addrtype");
      const auto value = xml_attr(addr, "addr");
      if (type == "ipv4" && ip.empty()) {
        if (auto c = canonical_ip(value))
          ip = *c;
      } else if (type == "ipv6" && ip6.empty()) {
        if (auto c = canonical_ip(value))
          ip6 = *c;
      } else if (type == "mac" && mac.empty()) {
        if (auto c = canonical_mac(value)) {
          mac = *c;
          vendor = trim(xml_attr(addr, "vendor"));
        }
      }
    }
    if (ip.empty())
      ip = ip6;
    if (ip.empty()) {
      ++result.skipped;
      result.errors.push_back({0, "host entry without a usable address"});
      continue;
    }

    Attrs hattrs{{"ip", ip}};
    if (!mac.empty())
      hattrs["mac"] = mac;
    if (!vendor.empty())
      hattrs["vendor"] = vendor;
    if (const auto names = host.get_child_optional("hostnames")) {
      for (const auto &[ntag, n] : *names) {
        if (ntag == "hostname" && !xml_attr(n, "name").empty()) {
          hattrs["hostname"] = xml_attr(n, "name");
          break;
        }
      }
    }
    if (const auto os = host.get_child_optional("os")) {
      int best = -1;
      for (const auto &[otag, m] : *os) {
        if (otag != "osmatch")
          continue;
        const int acc = parse_int(xml_attr(m, "accuracy")).value_or(0);
        if (acc > best && !xml_attr(m, "name").empty()) {
          best = acc;
          hattrs["os_guess"] = xml_attr(m, "name");
        }
      }
    }
    result.observations.push_back(
        make_observation(source_path, seq++, ObsKind::host, std::move(hattrs)));

    const auto ports = host.get_child_optional("ports");
    if (!ports)
      continue;
    for (const auto &[ptag, port] : *ports) {
      if (ptag != "port")
        continue;
      const auto state = port.get_child_optional("state");
      if (!state || xml_attr(*state, "state") != "open")
        continue;
      const auto num = parse_int(xml_attr(port, "portid"));
      if (!num || *num < 0 || *num > 65535) {
        ++result.skipped;
        result.errors.push_back({0, "port entry with invalid portid on " + ip});
        continue;
      }
      Attrs pattrs{{"ip", ip},
                   {"port", std::to_string(*num)},
                   {"proto", to_lower(xml_attr(port, "protocol"))}};
      if (!mac.empty())
        pattrs["mac"] = mac;
      if (const auto svc = port.get_child_optional("service")) {
        const auto name = xml_attr(*svc, "name");
        if (!name.empty())
          pattrs["service_name"] = to_lower(name);
      }
      result.observations.push_back(
          make_observation(source_path, seq++, ObsKind::port, std::move(pattrs)));
    }
  }
  return result;
}

ParseResult parse_flows(std::string_view csv, std::string_view source_path) {
  const auto lines = split_lines(csv);
  CsvTable table;
  const std::size_t first =
      read_csv_header(lines, {"src_ip", "dst_ip", "src_port", "dst_port", "proto"}, table,
                      "flow CSV");
  ParseResult result;
  std::size_t seq = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (trim(lines[i]).empty())
      continue;
    const std::size_t lineno = i + 1;
    const auto rec = parse_csv_record(lines[i]);
    auto field = [&](const char *name) -> std::string {
      const auto idx = table.columns.at(name);
      return idx < rec.size() ? trim(rec[idx]) : std::string{};
    };
    auto fail = [&](std::string msg) {
      ++result.skipped;
      result.errors.push_back({lineno, std::move(msg)});
    };
    const auto src = canonical_ip(field("src_ip"));
    const auto dst = canonical_ip(field("dst_ip"));
    if (!src || !dst) {
      fail("unparseable IP address");
      continue;
    }
    const auto sport = parse_int(field("src_port"));
    const auto dport = parse_int(field("dst_port"));
    if (!sport || !dport || *sport < 0 || *sport > 65535 || *dport < 0 || *dport > 65535) {
      fail("invalid port number");
      continue;
    }
    const auto proto = to_lower(field("proto"));
    if (proto.empty()) {
      fail("missing protocol");
      continue;
    }
    result.observations.push_back(make_observation(
        source_path, seq++, ObsKind::flow,
        Attrs{{"src_ip", *src},
              {"dst_ip", *dst},
              {"src_port", std::to_string(*sport)},
              {"dst_port", std::to_string(*dport)},
              {"proto", proto}}));
  }
  return result;
}

ParseResult parse_syslog(std::string_view text, std::string_view source_path) {
  static const std::regex line_re(
      R"(^([A-Z][a-z]{2} +\d{1,2} \d{2}:\d{2}:\d{2}|\d{4}-\d{2}-\d{2}T\S+)\s+(\S+)\s+([^\s\[:]+)(?:\[(\d+)\])?:\s?(.*)$)");
  ParseResult result;
  std::size_t seq = 0;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty())
      continue;
    std::smatch m;
    if (!std::regex_match(lines[i], m, line_re)) {
      ++result.skipped;
      result.errors.push_back({i + 1, "not a syslog line"});
      continue;
    }
    Attrs attrs{{"time", m[1].str()},
                {"host", m[2].str()},
                {"app", m[3].str()},
                {"message", trim(m[5].str())}};
    if (m[4].matched)
      attrs["pid"] = m[4].str();
    std::optional<std::string> ts;
    if (parse_iso8601(m[1].str()))
      ts = m[1].str();
    result.observations.push_back(
        make_observation(source_path, seq++, ObsKind::log_event, std::move(attrs), ts));
  }
  return result;
}

std::string normalize_oid(std::string_view raw) {
  static const std::map<std::string, std::string, std::less<>> symbolic{
      {"sysDescr", std::string(snmp_oid::sys_descr)},
      {"sysName", std::string(snmp_oid::sys_name)},
      {"svUserName", std::string(snmp_oid::lanmgr_user_name)},
  };
  std::string oid = trim(raw);
  if (const auto sep = oid.find("::"); sep != std::string::npos) {
    const std::string rest = oid.substr(sep + 2);
    const auto dot = rest.find('.');
    const auto it = symbolic.find(rest.substr(0, dot));
    if (it == symbolic.end())
      return {};
    return dot == std::string::npos ? it->second : it->second + rest.substr(dot);
  }
  if (starts_with(oid, "."))
    oid.erase(0, 1);
  if (starts_with(oid, "iso."))
    oid.replace(0, 3, "1");
  return oid;
}

namespace {

bool oid_under(std::string_view oid, std::string_view prefix) {
  return oid == prefix ||
         (oid.size() > prefix.size() && starts_with(oid, prefix) && oid[prefix.size()] == '.');
}

bool numeric_oid(std::string_view oid) {
  if (oid.empty() || oid.front() == '.' || oid.back() == '.')
    return false;
  for (std::size_t i = 0; i < oid.size(); ++i) {
    const char c = oid[i];
    if (c == '.') {
      if (oid[i - 1] == '.')
        return false;
    } else if (c < '0' || c > '9') {
      return false;
    }
  }
  return true;
}

} // namespace

ParseResult parse_snmp_walk(std::string_view text, std::string_view source_path,
                            std::string_view agent_ip,
                            const std::vector<std::string> &account_oids) {
  ParseResult result;
  std::size_t seq = 0;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty())
      continue;
    const auto eq = line.find(" = ");
    const std::string raw_oid = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    if (raw_oid.empty()) {
      ++result.skipped;
      result.errors.push_back({i + 1, "malformed walk line"});
      continue;
    }
    const std::string oid = normalize_oid(raw_oid);
    if (oid.empty()) {
      ++result.ignored;
      continue;
    }
    if (!numeric_oid(oid)) {
      ++result.skipped;
      result.errors.push_back({i + 1, "malformed OID '" + raw_oid + "'"});
      continue;
    }
    std::string field;
    if (oid_under(oid, snmp_oid::sys_name))
      field = "sys_name";
    else if (oid_under(oid, snmp_oid::sys_descr))
      field = "sys_descr";
    else
      for (const auto &acct : account_oids)
        if (oid_under(oid, normalize_oid(acct)))
          field = "account";
    if (field.empty()) {
      ++result.ignored;
      continue;
    }
    std::string value = trim(line.substr(eq + 3));
    if (const auto colon = value.find(": "); colon != std::string::npos) {
      const auto type = value.substr(0, colon);
      if (!type.empty() && type.find(' ') == std::string::npos && type.find('"') == std::string::npos)
        value = trim(value.substr(colon + 2));
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    Attrs attrs{{"oid", oid}, {"field", field}, {"value", value}};
    if (!agent_ip.empty())
      attrs["agent_ip"] = std::string(agent_ip);
    result.observations.push_back(
        make_observation(source_path, seq++, ObsKind::snmp_record, std::move(attrs)));
  }
  return result;
}

ParseResult parse_eventlog(std::string_view csv, std::string_view source_path) {
  const auto lines = split_lines(csv);
  CsvTable table;
  const std::size_t first =
      read_csv_header(lines, {"case_id", "activity", "timestamp"}, table, "event log CSV");
  const std::string log = stem_of(source_path);
  ParseResult result;
  std::size_t seq = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (trim(lines[i]).empty())
      continue;
    const auto rec = parse_csv_record(lines[i]);
    auto field = [&](const char *name) -> std::string {
      const auto idx = table.columns.at(name);
      return idx < rec.size() ? trim(rec[idx]) : std::string{};
    };
    const auto case_id = field("case_id");
    const auto activity = field("activity");
    const auto ts = field("timestamp");
    if (case_id.empty() || activity.empty()) {
      ++result.skipped;
      result.errors.push_back({i + 1, "empty case_id or activity"});
      continue;
    }
    if (!parse_iso8601(ts)) {
      ++result.skipped;
      result.errors.push_back({i + 1, "bad timestamp '" + ts + "'"});
      continue;
    }
    result.observations.push_back(make_observation(
        source_path, seq++, ObsKind::process_event,
        Attrs{{"case_id", case_id}, {"activity", activity}, {"timestamp", ts}, {"log", log}},
        ts));
  }
  return result;
}

std::string snmp_agent_for(const SourceDescriptor &src) {
  if (!src.agent_ip.empty())
    return canonical_ip(src.agent_ip).value_or(src.agent_ip);
  static const std::regex lead(R"(^(\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}))");
  const auto name = std::filesystem::path(src.path).filename().string();
  std::smatch m;
  if (std::regex_search(name, m, lead))
    if (auto ip = canonical_ip(m[1].str()))
      return *ip;
  return {};
}

ParseResult ingest_source(const SourceDescriptor &src, const IngestOptions &opts) {
  const std::string text = read_file(src.path);
  switch (src.adapter) {
  case Adapter::nmap_xml: return parse_nmap(text, src.path);
  case Adapter::flow_csv: return parse_flows(text, src.path);
  case Adapter::syslog: return parse_syslog(text, src.path);
  case Adapter::snmp_walk:
    return parse_snmp_walk(text, src.path, snmp_agent_for(src), opts.snmp_account_oids);
  case Adapter::event_log_csv: return parse_eventlog(text, src.path);
  }
  throw UnsupportedFormat("unknown adapter");
}

std::vector<SourceBatch> ingest_sources_serial(const std::vector<SourceDescriptor> &sources,
                                               const IngestOptions &opts) {
  std::vector<SourceBatch> out;
  out.reserve(sources.size());
  for (const auto &src : sources)
    out.push_back({src, ingest_source(src, opts)});
  return out;
}

std::vector<SourceBatch> ingest_sources(const std::vector<SourceDescriptor> &sources,
                                        const IngestOptions &opts) {
  const auto n = static_cast<long>(sources.size());
  std::vector<SourceBatch> out(sources.size());
  std::vector<std::exception_ptr> failures(sources.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = {sources[i], ingest_source(sources[i], opts)};
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto &f : failures)
    if (f)
      std::rethrow_exception(f);
  return out;
}

} // namespace eamine
