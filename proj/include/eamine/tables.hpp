#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eamine {

// Lookup tables use a tab-separated columnar text format:
//
//   #! eamine-table <table-name> <version>
//   # free comment lines
//   col1<TAB>col2<TAB>...
//
// Runs of tabs count as one separator, so columns may be aligned.

/// Well-known port -> service name (subset of the IANA registry).
class PortTable {
public:
  static PortTable parse(std::string_view text);
  static PortTable load(const std::string &path);

  void add(int port, std::string proto, std::string service);
  std::optional<std::string> service_for(int port, std::string_view proto) const;
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::map<std::pair<int, std::string>, std::string> entries_;
};

/// MAC OUI prefix (and vendor keyword) -> device type.
class OuiTable {
public:
  struct Entry {
    std::string prefix; // "00:50:56"
    std::string device_type;
    std::string vendor_keyword; // lowercase; may be empty
  };

  static OuiTable parse(std::string_view text);
  static OuiTable load(const std::string &path);

  void add(Entry e);
  /// Prefix match on the canonical MAC first, then a case-insensitive keyword
  /// search in the vendor string. First matching row wins.
  const Entry *classify(std::string_view mac, std::string_view vendor) const;
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::vector<Entry> entries_;
};

/// Open-port signature -> OS guess.
class OsHeuristicTable {
public:
  struct Entry {
    std::set<int> ports;
    std::string os;
  };

  static OsHeuristicTable parse(std::string_view text);
  static OsHeuristicTable load(const std::string &path);

  void add(Entry e);
  /// The entry whose port set is the largest subset of `open_ports`; ties go
  /// to the earlier row.
  const Entry *estimate(const std::set<int> &open_ports) const;
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::vector<Entry> entries_;
};

/// Directory of the bundled data files: $EAMINE_DATA_DIR if set, otherwise
/// the build-time default.
std::string bundled_data_dir();

} // namespace eamine
