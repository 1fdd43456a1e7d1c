#pragma once

#include "eamine/observation.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

struct RowError {
  std::size_t line = 0;
  std::string message;
};

/// Parse summary. Row-level problems are skipped and counted, never fatal.
struct ParseResult {
  std::vector<Observation> observations;
  std::size_t skipped = 0; // malformed rows/lines
  std::size_t ignored = 0; // well-formed but not recognized (snmp OIDs)
  std::vector<RowError> errors;
};

namespace snmp_oid {
inline constexpr std::string_view sys_descr = "1.3.6.1.2.1.1.1";
inline constexpr std::string_view sys_name = "1.3.6.1.2.1.1.5";
/// LanMgr-Mib-II svUserName column. Default account subtree.
inline constexpr std::string_view lanmgr_user_name = "1.3.6.1.4.1.77.1.2.25.1.1";
} // namespace snmp_oid

struct IngestOptions {
  std::vector<std::string> snmp_account_oids{std::string(snmp_oid::lanmgr_user_name)};
};

ParseResult parse_nmap(std::string_view xml, std::string_view source_path);
ParseResult parse_flows(std::string_view csv, std::string_view source_path);
ParseResult parse_syslog(std::string_view text, std::string_view source_path);
ParseResult parse_snmp_walk(std::string_view text, std::string_view source_path,
                            std::string_view agent_ip,
                            const std::vector<std::string> &account_oids);
ParseResult parse_eventlog(std::string_view csv, std::string_view source_path);

/// Normalizes a walk OID: drops a leading '.', expands "iso." and the known
/// symbolic names. Returns empty for unknown symbolic names.
std::string normalize_oid(std::string_view oid);

/// Agent address for a walk file: the descriptor's agent_ip, else a leading
/// dotted quad in the file name, else empty.
std::string snmp_agent_for(const SourceDescriptor &src);

/// Reads and parses one source file.
ParseResult ingest_source(const SourceDescriptor &src, const IngestOptions &opts = {});

struct SourceBatch {
  SourceDescriptor source;
  ParseResult result;
};

/// Parses all sources, one OpenMP task per file. Output order matches input
/// order. The first failure (I/O, parse, schema) is rethrown after the loop.
std::vector<SourceBatch> ingest_sources(const std::vector<SourceDescriptor> &sources,
                                        const IngestOptions &opts = {});

/// Serial reference for ingest_sources.
std::vector<SourceBatch> ingest_sources_serial(const std::vector<SourceDescriptor> &sources,
                                               const IngestOptions &opts = {});

} // namespace eamine
