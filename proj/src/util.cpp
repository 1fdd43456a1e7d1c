#include "eamine/util.hpp"

#include "eamine/error.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace eamine {

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_fields(const std::vector<std::string> &fields) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto &f : fields) {
    const std::string len = std::to_string(f.size()) + ":";
    h = fnv1a(len, h);
    h = fnv1a(f, h);
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto *ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

bool starts_with(std::string_view s, std::string_view prefix) noexcept {
  return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos)
      pos = text.size();
    auto line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.emplace_back(line);
    start = pos + 1;
  }
  return lines;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  if (s.empty())
    return std::nullopt;
  const auto *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    return std::nullopt;
  return v;
}

std::optional<std::uint32_t> parse_ipv4(std::string_view s) {
  const auto parts = split(s, '.');
  if (parts.size() != 4)
    return std::nullopt;
  std::uint32_t addr = 0;
  for (const auto &p : parts) {
    if (p.empty() || p.size() > 3 ||
        !std::all_of(p.begin(), p.end(), [](unsigned char c) { return std::isdigit(c); }))
      return std::nullopt;
    const int v = *parse_int(p);
    if (v > 255)
      return std::nullopt;
    addr = (addr << 8) | static_cast<std::uint32_t>(v);
  }
  return addr;
}

std::string format_ipv4(std::uint32_t a) {
  return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 0xff) + "." +
         std::to_string((a >> 8) & 0xff) + "." + std::to_string(a & 0xff);
}

std::optional<std::string> canonical_ip(std::string_view raw) {
  const std::string s = trim(raw);
  if (auto v4 = parse_ipv4(s))
    return format_ipv4(*v4);
  if (s.find(':') == std::string::npos)
    return std::nullopt;
  in6_addr addr{};
  if (inet_pton(AF_INET6, s.c_str(), &addr) != 1)
    return std::nullopt;
  char buf[INET6_ADDRSTRLEN];
  if (!inet_ntop(AF_INET6, &addr, buf, sizeof buf))
    return std::nullopt;
  return std::string(buf);
}

std::optional<std::string> canonical_mac(std::string_view raw) {
  std::string hex;
  for (unsigned char c : trim(raw)) {
    if (std::isxdigit(c))
      hex.push_back(static_cast<char>(std::tolower(c)));
    else if (c != ':' && c != '-' && c != '.')
      return std::nullopt;
  }
  if (hex.size() != 12)
    return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < 12; i += 2) {
    if (i)
      out.push_back(':');
    out.append(hex, i, 2);
  }
  return out;
}

namespace {

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

} // namespace

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  static const std::regex re(
      R"(^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:[.,](\d{1,9}))?)?)?(Z|[+-]\d{2}(?::?\d{2})?)?$)");
  std::cmatch m;
  const std::string str = trim(s);
  if (!std::regex_match(str.c_str(), m, re))
    return std::nullopt;
  const int year = std::stoi(m[1]);
  const int mon = std::stoi(m[2]);
  const int day = std::stoi(m[3]);
  static constexpr int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (mon < 1 || mon > 12 || day < 1 ||
      day > mdays[mon - 1] + (mon == 2 && leap(year) ? 1 : 0))
    return std::nullopt;
  const int hh = m[4].matched ? std::stoi(m[4]) : 0;
  const int mm = m[5].matched ? std::stoi(m[5]) : 0;
  const int ss = m[6].matched ? std::stoi(m[6]) : 0;
  if (hh > 23 || mm > 59 || ss > 60)
    return std::nullopt;
  std::int64_t micros = 0;
  if (m[7].matched) {
    std::string frac = m[7].str();
    frac.resize(6, '0');
    micros = std::stoll(frac.substr(0, 6));
  }
  std::int64_t offset_s = 0;
  if (m[8].matched && m[8].str() != "Z") {
    const std::string z = m[8].str();
    const int sign = z[0] == '-' ? -1 : 1;
    std::string digits;
    for (char c : z.substr(1))
      if (c != ':')
        digits.push_back(c);
    const int oh = std::stoi(digits.substr(0, 2));
    const int om = digits.size() >= 4 ? std::stoi(digits.substr(2, 2)) : 0;
    if (oh > 23 || om > 59)
      return std::nullopt;
    offset_s = sign * (oh * 3600 + om * 60);
  }
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(mon),
                                            static_cast<unsigned>(day));
  const std::int64_t secs = days * 86400 + hh * 3600 + mm * 60 + ss - offset_s;
  return secs * 1000000 + micros;
}

std::vector<std::string> parse_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("read failed: " + path);
  return ss.str();
}

void write_file_atomic(const std::string &path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into place: " + path);
  }
}

} // namespace eamine
