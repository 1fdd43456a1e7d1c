#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eamine {

// --- hashing -----------------------------------------------------------------

/// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a(std::string_view data,
                    std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

/// Hash of a field list; fields are length-prefixed so ("ab","c") != ("a","bc").
std::uint64_t hash_fields(const std::vector<std::string> &fields) noexcept;

std::string hex64(std::uint64_t v);

// --- strings -----------------------------------------------------------------

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool starts_with(std::string_view s, std::string_view prefix) noexcept;

/// Splits text into lines, accepting LF and CRLF. A trailing newline does not
/// produce an empty last line.
std::vector<std::string> split_lines(std::string_view text);

std::optional<int> parse_int(std::string_view s);

// --- addresses ---------------------------------------------------------------

/// Canonical IPv4 dotted quad (leading zeros dropped) or RFC 5952 IPv6.
std::optional<std::string> canonical_ip(std::string_view s);
std::optional<std::uint32_t> parse_ipv4(std::string_view s);
std::string format_ipv4(std::uint32_t addr);

/// Lowercase colon-separated MAC. Accepts ':', '-', Cisco dotted and bare hex.
std::optional<std::string> canonical_mac(std::string_view s);

// --- time --------------------------------------------------------------------

/// ISO-8601 date or date-time to microseconds since the Unix epoch (UTC).
/// Missing zone means UTC.
std::optional<std::int64_t> parse_iso8601(std::string_view s);

// --- csv ---------------------------------------------------------------------

/// One RFC 4180 record. Quoted fields may contain commas and doubled quotes but
/// not newlines.
std::vector<std::string> parse_csv_record(std::string_view line);

// --- files -------------------------------------------------------------------

std::string read_file(const std::string &path);

/// Writes via a sibling temp file and rename, so readers never see a partial
/// file.
void write_file_atomic(const std::string &path, std::string_view content);

} // namespace eamine
