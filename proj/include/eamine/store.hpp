#pragma once

#include "eamine/observation.hpp"

#include <cstddef>
#include <map>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace eamine {

/// Central sink for harmonized observations.
///
/// Observations are unique by obs_id and iterate in (source priority, source
/// path, seq) order regardless of insertion order. Appends are serialized;
/// readers get a consistent copy.
class ObservationStore {
public:
  inline static constexpr int kFormatVersion = 1;

  ObservationStore() = default;
  ObservationStore(const ObservationStore &other);
  ObservationStore &operator=(const ObservationStore &other);
  ObservationStore(ObservationStore &&other) noexcept;
  ObservationStore &operator=(ObservationStore &&other) noexcept;

  /// Re-registering an identical descriptor is a no-op; a different descriptor
  /// for a known path is a ConfigError.
  void register_source(const SourceDescriptor &src);

  /// Returns the number of observations actually inserted. Duplicates by
  /// obs_id are dropped.
  std::size_t append_all(const std::vector<Observation> &obs, const SourceDescriptor &src);

  std::vector<Observation> observations() const;
  std::vector<SourceDescriptor> sources() const;
  const SourceDescriptor *find_source(std::string_view path) const;
  std::size_t size() const;
  std::size_t duplicates_dropped() const;
  bool empty() const { return size() == 0; }

  /// Serialized snapshot: JSON Lines with a versioned header record, source
  /// records, observation records in iteration order and an end record.
  std::string serialize() const;
  static ObservationStore deserialize(std::string_view text);

  void snapshot(const std::string &path) const;
  static ObservationStore load(const std::string &path);

private:
  using Key = std::tuple<int, std::string, std::size_t, std::string>;

  mutable std::shared_mutex mutex_;
  std::map<std::string, SourceDescriptor, std::less<>> sources_;
  std::map<Key, Observation> observations_;
  std::unordered_set<std::string> ids_;
  std::size_t duplicates_ = 0;
};

} // namespace eamine
