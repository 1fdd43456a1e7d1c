#include "eamine/observation.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <array>
#include <utility>
#include <vector>

namespace eamine {

namespace {

constexpr std::array<std::pair<Adapter, std::string_view>, 5> kAdapters{{
    {Adapter::nmap_xml, "nmap-xml"},
    {Adapter::flow_csv, "flow-csv"},
    {Adapter::syslog, "syslog"},
    {Adapter::snmp_walk, "snmp-walk"},
    {Adapter::event_log_csv, "event-log-csv"},
}};

constexpr std::array<std::pair<ObsKind, std::string_view>, 6> kKinds{{
    {ObsKind::host, "host"},
    {ObsKind::port, "port"},
    {ObsKind::flow, "flow"},
    {ObsKind::log_event, "log-event"},
    {ObsKind::snmp_record, "snmp-record"},
    {ObsKind::process_event, "process-event"},
}};

} // namespace

std::string_view to_string(Adapter a) noexcept {
  for (const auto &[k, n] : kAdapters)
    if (k == a)
      return n;
  return "?";
}

std::string_view to_string(ObsKind kind) noexcept {
  for (const auto &[k, n] : kKinds)
    if (k == kind)
      return n;
  return "?";
}

Adapter adapter_from_string(std::string_view s) {
  for (const auto &[k, n] : kAdapters)
    if (n == s)
      return k;
  throw ConfigError("unknown adapter '" + std::string(s) + "'");
}

ObsKind obs_kind_from_string(std::string_view s) {
  for (const auto &[k, n] : kKinds)
    if (n == s)
      return k;
  throw ParseError("unknown observation kind '" + std::string(s) + "'");
}

const std::set<std::string> &attribute_schema(ObsKind kind) {
  static const std::set<std::string> host{"ip", "mac", "vendor", "os_guess", "hostname"};
  static const std::set<std::string> port{"ip", "mac", "port", "proto", "service_name"};
  static const std::set<std::string> flow{"src_ip", "dst_ip", "src_port", "dst_port", "proto"};
  static const std::set<std::string> log{"host", "app", "pid", "message", "time"};
  static const std::set<std::string> snmp{"oid", "field", "value", "agent_ip"};
  static const std::set<std::string> proc{"case_id", "activity", "timestamp", "log"};
  switch (kind) {
  case ObsKind::host: return host;
  case ObsKind::port: return port;
  case ObsKind::flow: return flow;
  case ObsKind::log_event: return log;
  case ObsKind::snmp_record: return snmp;
  case ObsKind::process_event: return proc;
  }
  return host;
}

std::string make_obs_id(std::string_view source_path, std::size_t seq, ObsKind kind,
                        const Attrs &attrs) {
  std::vector<std::string> fields{std::string(source_path), std::to_string(seq),
                                  std::string(to_string(kind))};
  for (const auto &[k, v] : attrs) {
    fields.push_back(k);
    fields.push_back(v);
  }
  return "obs-" + hex64(hash_fields(fields));
}

Observation make_observation(std::string_view source_path, std::size_t seq, ObsKind kind,
                             Attrs attrs, std::optional<std::string> timestamp) {
  Observation o;
  o.obs_id = make_obs_id(source_path, seq, kind, attrs);
  o.source_id = std::string(source_path);
  o.seq = seq;
  o.kind = kind;
  o.attrs = std::move(attrs);
  o.timestamp = std::move(timestamp);
  return o;
}

} // namespace eamine
