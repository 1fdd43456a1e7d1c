#include "eamine/tables.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <algorithm>
#include <cstdlib>

#ifndef EAMINE_DEFAULT_DATA_DIR
#define EAMINE_DEFAULT_DATA_DIR "data"
#endif

namespace eamine {

namespace {

struct Row {
  std::size_t line;
  std::vector<std::string> cols;
};

std::vector<Row> read_table(std::string_view text, std::string_view name) {
  const auto lines = split_lines(text);
  if (lines.empty())
    throw ParseError("table '" + std::string(name) + "': empty file");
  std::vector<std::string> words;
  for (auto &w : split(trim(lines[0]), ' '))
    if (!w.empty())
      words.push_back(w);
  if (words.size() != 4 || words[0] != "#!" || words[1] != "eamine-table")
    throw ParseError("table '" + std::string(name) + "': missing '#! eamine-table' header", 1);
  if (words[2] != name)
    throw ParseError("expected table '" + std::string(name) + "', got '" + words[2] + "'", 1);
  if (words[3] != "1")
    throw ParseError("table '" + std::string(name) + "': unsupported version " + words[3], 1);
  std::vector<Row> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line[0] == '#')
      continue;
    Row row{i + 1, {}};
    for (auto &c : split(line, '\t')) {
      auto t = trim(c);
      if (!t.empty())
        row.cols.push_back(std::move(t));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

PortTable PortTable::parse(std::string_view text) {
  PortTable t;
  for (const auto &row : read_table(text, "ports")) {
    const auto port = row.cols.size() == 3 ? parse_int(row.cols[0]) : std::nullopt;
    if (!port || *port < 0 || *port > 65535)
      throw ParseError("ports table: expected <port> <proto> <service>", row.line);
    t.add(*port, row.cols[1], row.cols[2]);
  }
  return t;
}

PortTable PortTable::load(const std::string &path) { return parse(read_file(path)); }

void PortTable::add(int port, std::string proto, std::string service) {
  entries_[{port, to_lower(proto)}] = std::move(service);
}

std::optional<std::string> PortTable::service_for(int port, std::string_view proto) const {
  const auto it = entries_.find({port, to_lower(proto)});
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

OuiTable OuiTable::parse(std::string_view text) {
  OuiTable t;
  for (const auto &row : read_table(text, "oui")) {
    if (row.cols.size() < 2 || row.cols.size() > 3)
      throw ParseError("oui table: expected <prefix> <device_type> [vendor_keyword]", row.line);
    const auto prefix = canonical_mac(row.cols[0] + ":00:00:00");
    if (!prefix)
      throw ParseError("oui table: bad prefix '" + row.cols[0] + "'", row.line);
    t.add({prefix->substr(0, 8), row.cols[1], row.cols.size() == 3 ? row.cols[2] : ""});
  }
  return t;
}

OuiTable OuiTable::load(const std::string &path) { return parse(read_file(path)); }

void OuiTable::add(Entry e) {
  e.vendor_keyword = to_lower(e.vendor_keyword);
  entries_.push_back(std::move(e));
}

const OuiTable::Entry *OuiTable::classify(std::string_view mac, std::string_view vendor) const {
  if (const auto canon = canonical_mac(mac)) {
    const auto prefix = canon->substr(0, 8);
    for (const auto &e : entries_)
      if (e.prefix == prefix)
        return &e;
  }
  const auto v = to_lower(vendor);
  if (!v.empty())
    for (const auto &e : entries_)
      if (!e.vendor_keyword.empty() && v.find(e.vendor_keyword) != std::string::npos)
        return &e;
  return nullptr;
}

OsHeuristicTable OsHeuristicTable::parse(std::string_view text) {
  OsHeuristicTable t;
  for (const auto &row : read_table(text, "os-heuristics")) {
    if (row.cols.size() != 2)
      throw ParseError("os-heuristics table: expected <port,port,...> <os>", row.line);
    Entry e;
    for (const auto &p : split(row.cols[0], ',')) {
      const auto port = parse_int(trim(p));
      if (!port || *port < 0 || *port > 65535)
        throw ParseError("os-heuristics table: bad port '" + p + "'", row.line);
      e.ports.insert(*port);
    }
    e.os = row.cols[1];
    t.add(std::move(e));
  }
  return t;
}

OsHeuristicTable OsHeuristicTable::load(const std::string &path) {
  return parse(read_file(path));
}

void OsHeuristicTable::add(Entry e) { entries_.push_back(std::move(e)); }

const OsHeuristicTable::Entry *OsHeuristicTable::estimate(const std::set<int> &open_ports) const {
  const Entry *best = nullptr;
  for (const auto &e : entries_) {
    if (e.ports.empty() ||
        !std::includes(open_ports.begin(), open_ports.end(), e.ports.begin(), e.ports.end()))
      continue;
    if (!best || e.ports.size() > best->ports.size())
      best = &e;
  }
  return best;
}

std::string bundled_data_dir() {
  if (const char *env = std::getenv("EAMINE_DATA_DIR"); env && *env)
    return env;
  return EAMINE_DEFAULT_DATA_DIR;
}

} // namespace eamine
