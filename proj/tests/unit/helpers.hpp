#pragma once

#include "eamine/util.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline std::string fixture(const std::string &rel) {
  return std::string(EAMINE_FIXTURE_DIR) + "/" + rel;
}

inline std::string golden(const std::string &rel) {
  return std::string(EAMINE_GOLDEN_DIR) + "/" + rel;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("eamine-test-" + tag + "-" + eamine::hex64(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

} // namespace testing_support

#include "eamine/observation.hpp"
#include "eamine/store.hpp"

#include <utility>
#include <vector>

namespace testing_support {

/// Store holding one synthetic source per entry; seq follows vector order.
inline eamine::ObservationStore
store_of(const std::vector<std::pair<eamine::SourceDescriptor,
                                     std::vector<std::pair<eamine::ObsKind, eamine::Attrs>>>>
             &sources) {
  eamine::ObservationStore s;
  for (const auto &[src, rows] : sources) {
    s.register_source(src);
    std::vector<eamine::Observation> obs;
    for (std::size_t i = 0; i < rows.size(); ++i)
      obs.push_back(eamine::make_observation(src.path, i, rows[i].first, rows[i].second));
    s.append_all(obs, src);
  }
  return s;
}

inline eamine::SourceDescriptor scan(const std::string &path, int priority = 0) {
  return {path, eamine::Adapter::nmap_xml, priority, ""};
}

} // namespace testing_support
