#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace eamine {

enum class Adapter { nmap_xml, flow_csv, syslog, snmp_walk, event_log_csv };

enum class ObsKind { host, port, flow, log_event, snmp_record, process_event };

std::string_view to_string(Adapter a) noexcept;
std::string_view to_string(ObsKind k) noexcept;
Adapter adapter_from_string(std::string_view s);
ObsKind obs_kind_from_string(std::string_view s);

struct SourceDescriptor {
  std::string path;
  Adapter adapter = Adapter::nmap_xml;
  int priority = 0; // lower = more authoritative
  std::string agent_ip; // snmp-walk only; empty = derive from file name

  bool operator==(const SourceDescriptor &) const = default;
};

using Attrs = std::map<std::string, std::string>;

struct Observation {
  std::string obs_id;
  std::string source_id; // SourceDescriptor::path
  std::size_t seq = 0;
  ObsKind kind = ObsKind::host;
  Attrs attrs;
  std::optional<std::string> timestamp;

  bool operator==(const Observation &) const = default;
};

/// Allowed attribute keys per observation kind.
const std::set<std::string> &attribute_schema(ObsKind kind);

/// Content hash of (source path, seq, kind, sorted attrs).
std::string make_obs_id(std::string_view source_path, std::size_t seq, ObsKind kind,
                        const Attrs &attrs);

/// Builds an observation with its id filled in.
Observation make_observation(std::string_view source_path, std::size_t seq, ObsKind kind,
                             Attrs attrs, std::optional<std::string> timestamp = {});

} // namespace eamine
