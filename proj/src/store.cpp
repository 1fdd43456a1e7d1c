#include "eamine/store.hpp"

#include "eamine/error.hpp"
#include "eamine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <mutex>

namespace eamine {

using nlohmann::json;

ObservationStore::ObservationStore(const ObservationStore &other) {
  std::shared_lock lock(other.mutex_);
  sources_ = other.sources_;
  observations_ = other.observations_;
  ids_ = other.ids_;
  duplicates_ = other.duplicates_;
}

ObservationStore &ObservationStore::operator=(const ObservationStore &other) {
  if (this != &other) {
    ObservationStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

ObservationStore::ObservationStore(ObservationStore &&other) noexcept
    : sources_(std::move(other.sources_)), observations_(std::move(other.observations_)),
      ids_(std::move(other.ids_)), duplicates_(other.duplicates_) {}

ObservationStore &ObservationStore::operator=(ObservationStore &&other) noexcept {
  if (this != &other) {
    std::unique_lock lock(mutex_);
    sources_ = std::move(other.sources_);
    observations_ = std::move(other.observations_);
    ids_ = std::move(other.ids_);
    duplicates_ = other.duplicates_;
  }
  return *this;
}

void ObservationStore::register_source(const SourceDescriptor &src) {
  if (src.priority < 0)
    throw ConfigError("source priority must be >= 0: " + src.path);
  std::unique_lock lock(mutex_);
  const auto it = sources_.find(src.path);
  if (it != sources_.end()) {
    if (!(it->second == src))
      throw ConfigError("source path registered twice with different settings: " + src.path);
    return;
  }
  sources_.emplace(src.path, src);
}

std::size_t ObservationStore::append_all(const std::vector<Observation> &obs,
                                         const SourceDescriptor &src) {
  std::unique_lock lock(mutex_);
  const auto it = sources_.find(src.path);
  if (it == sources_.end() || !(it->second == src))
    throw Error("append from unregistered source: " + src.path);
  for (const auto &o : obs)
    if (o.source_id != src.path)
      throw Error("observation " + o.obs_id + " does not originate from " + src.path);
  std::size_t inserted = 0;
  for (const auto &o : obs) {
    if (!ids_.insert(o.obs_id).second) {
      ++duplicates_;
      continue;
    }
    observations_.emplace(Key{src.priority, src.path, o.seq, o.obs_id}, o);
    ++inserted;
  }
  return inserted;
}

std::vector<Observation> ObservationStore::observations() const {
  std::shared_lock lock(mutex_);
  std::vector<Observation> out;
  out.reserve(observations_.size());
  for (const auto &[k, o] : observations_)
    out.push_back(o);
  return out;
}

std::vector<SourceDescriptor> ObservationStore::sources() const {
  std::shared_lock lock(mutex_);
  std::vector<SourceDescriptor> out;
  for (const auto &[p, s] : sources_)
    out.push_back(s);
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(a.priority, a.path) < std::tie(b.priority, b.path);
  });
  return out;
}

const SourceDescriptor *ObservationStore::find_source(std::string_view path) const {
  std::shared_lock lock(mutex_);
  const auto it = sources_.find(path);
  return it == sources_.end() ? nullptr : &it->second;
}

std::size_t ObservationStore::size() const {
  std::shared_lock lock(mutex_);
  return observations_.size();
}

std::size_t ObservationStore::duplicates_dropped() const {
  std::shared_lock lock(mutex_);
  return duplicates_;
}

std::string ObservationStore::serialize() const {
  std::string out;
  out += json{{"record", "header"}, {"format", "eamine-store"}, {"version", kFormatVersion}}
             .dump();
  out += '\n';
  for (const auto &s : sources()) {
    json j{{"record", "source"},
           {"path", s.path},
           {"adapter", std::string(to_string(s.adapter))},
           {"priority", s.priority}};
    if (!s.agent_ip.empty())
      j["agent_ip"] = s.agent_ip;
    out += j.dump();
    out += '\n';
  }
  const auto obs = observations();
  for (const auto &o : obs) {
    json j{{"record", "obs"},
           {"obs_id", o.obs_id},
           {"source_id", o.source_id},
           {"seq", o.seq},
           {"kind", std::string(to_string(o.kind))},
           {"attrs", o.attrs}};
    if (o.timestamp)
      j["timestamp"] = *o.timestamp;
    out += j.dump();
    out += '\n';
  }
  out += json{{"record", "end"}, {"count", obs.size()}}.dump();
  out += '\n';
  return out;
}

ObservationStore ObservationStore::deserialize(std::string_view text) {
  if (text.empty() || text.back() != '\n')
    throw ParseError("store snapshot is truncated");
  const auto lines = split_lines(text);
  ObservationStore store;
  bool ended = false;
  std::size_t obs_count = 0;
  std::map<std::string, std::vector<Observation>> pending;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (ended)
      throw ParseError("data after end record", lineno);
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception &e) {
      throw ParseError(std::string("corrupt store snapshot: ") + e.what(), lineno);
    }
    try {
      const auto record = j.at("record").get<std::string>();
      if (i == 0) {
        if (record != "header" || j.at("format") != "eamine-store")
          throw ParseError("not a store snapshot", lineno);
        if (j.at("version") != kFormatVersion)
          throw ParseError("unsupported store snapshot version " + j.at("version").dump(),
                           lineno);
        continue;
      }
      if (record == "source") {
        SourceDescriptor s;
        s.path = j.at("path").get<std::string>();
        s.adapter = adapter_from_string(j.at("adapter").get<std::string>());
        s.priority = j.at("priority").get<int>();
        s.agent_ip = j.value("agent_ip", "");
        store.register_source(s);
      } else if (record == "obs") {
        Observation o;
        o.obs_id = j.at("obs_id").get<std::string>();
        o.source_id = j.at("source_id").get<std::string>();
        o.seq = j.at("seq").get<std::size_t>();
        o.kind = obs_kind_from_string(j.at("kind").get<std::string>());
        o.attrs = j.at("attrs").get<Attrs>();
        if (j.contains("timestamp"))
          o.timestamp = j.at("timestamp").get<std::string>();
        if (make_obs_id(o.source_id, o.seq, o.kind, o.attrs) != o.obs_id)
          throw ParseError("observation id does not match its content", lineno);
        pending[o.source_id].push_back(std::move(o));
        ++obs_count;
      } else if (record == "end") {
        if (j.at("count").get<std::size_t>() != obs_count)
          throw ParseError("observation count mismatch", lineno);
        ended = true;
      } else {
        throw ParseError("unknown record '" + record + "'", lineno);
      }
    } catch (const json::exception &e) {
      throw ParseError(std::string("corrupt store snapshot: ") + e.what(), lineno);
    } catch (const ConfigError &e) {
      throw ParseError(std::string("corrupt store snapshot: ") + e.what(), lineno);
    }
  }
  if (!ended)
    throw ParseError("store snapshot is truncated (no end record)");
  for (auto &[path, obs] : pending) {
    const auto *src = store.find_source(path);
    if (!src)
      throw ParseError("observation references unknown source " + path);
    store.append_all(obs, *src);
  }
  return store;
}

void ObservationStore::snapshot(const std::string &path) const {
  write_file_atomic(path, serialize());
}

ObservationStore ObservationStore::load(const std::string &path) {
  return deserialize(read_file(path));
}

} // namespace eamine
