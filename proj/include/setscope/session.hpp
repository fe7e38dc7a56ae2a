#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setscope/config.hpp"
#include "setscope/detection.hpp"
#include "setscope/errors.hpp"
#include "setscope/pipeline.hpp"

namespace setscope {

/// Per-subscriber queue of serialized round-result events.
class EventQueue {
 public:
  void push(std::string event) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      events_.push_back(std::move(event));
    }
    cv_.notify_all();
  }

  /// Waits up to `timeout` for the next event. Empty on timeout or close.
  std::optional<std::string> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !events_.empty(); });
    if (events_.empty()) return std::nullopt;
    std::string e = std::move(events_.front());
    events_.pop_front();
    return e;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> events_;
  bool closed_ = false;
};

class EventHub {
 public:
  std::shared_ptr<EventQueue> subscribe() {
    auto q = std::make_shared<EventQueue>();
    std::lock_guard lock(mu_);
    subscribers_.push_back(q);
    return q;
  }

  void publish(const std::string& event) {
    std::lock_guard lock(mu_);
    std::erase_if(subscribers_, [&](const std::weak_ptr<EventQueue>& w) {
      auto q = w.lock();
      if (!q || q->closed()) return true;
      q->push(event);
      return false;
    });
  }

  void close_all() {
    std::lock_guard lock(mu_);
    for (auto& w : subscribers_) {
      if (auto q = w.lock()) q->close();
    }
    subscribers_.clear();
  }

 private:
  std::mutex mu_;
  std::vector<std::weak_ptr<EventQueue>> subscribers_;
};

/// One match being analysed. Submissions are serialized; readers get
/// consistent snapshots while a submission is in flight.
class Session {
 public:
  Session(std::string id, const EngineConfig& cfg, std::filesystem::path dir)
      : id_(std::move(id)), dir_(std::move(dir)), analyzer_(cfg, cfg.tracker.filter_mode) {}

  const std::string& id() const { return id_; }
  const EngineConfig& config() const { return analyzer_.config(); }
  FilterMode mode() const { return analyzer_.mode(); }

  /// Checks `key` against the last accepted key. Within a set keys must
  /// strictly increase in (score, round); 1_1 after a later key opens a new set.
  void check_order(const RoundKey& key) const {
    if (!last_key_) return;
    const auto c = compare_in_set(key, *last_key_);
    if (c > 0) return;
    if (key.score == 1 && key.round == 1 && c < 0) return;
    throw OrderError("round " + key.str() + " does not follow " + last_key_->str());
  }

  /// Runs one round and appends it to the log. The log and statistics are
  /// untouched when any step fails.
  RoundResult submit(const RoundKey& key, const std::vector<DetectionRecord>& records,
                     std::optional<Team> possession = std::nullopt) {
    std::lock_guard serial(submit_mu_);
    check_order(key);
    validate_frame_order(records);
    MatchAnalyzer next = analyzer_;
    RoundResult result = next.analyze(key, records, possession);
    append_log(result);
    {
      std::unique_lock write(state_mu_);
      analyzer_ = std::move(next);
      results_.push_back(result);
      stats_.add(result);
      last_key_ = key;
    }
    events_.publish(to_json(result).dump());
    return result;
  }

  TacticDistribution stats() const {
    std::shared_lock read(state_mu_);
    return stats_;
  }

  std::vector<RoundResult> rounds() const {
    std::shared_lock read(state_mu_);
    return results_;
  }

  std::size_t round_count() const {
    std::shared_lock read(state_mu_);
    return results_.size();
  }

  EventHub& events() { return events_; }

  static std::filesystem::path log_path(const std::filesystem::path& dir) {
    return dir / "rounds.ndjson";
  }
  static std::filesystem::path config_path(const std::filesystem::path& dir) {
    return dir / "config.json";
  }

  /// Rebuilds state from the session directory. A final line without a
  /// trailing newline is a torn write and is cut off.
  void replay_log() {
    std::ifstream in(log_path(dir_), std::ios::binary);
    if (!in) return;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
      const auto end = content.find('\n', start);
      if (end == std::string::npos) {
        std::filesystem::resize_file(log_path(dir_), start);
        break;
      }
      ++line_no;
      const std::string line = content.substr(start, end - start);
      start = end + 1;
      if (line.empty()) continue;
      RoundResult r;
      try {
        r = round_result_from_json(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(log_path(dir_).string() + " line " + std::to_string(line_no) + ": " +
                          e.what());
      }
      analyzer_.replay(r.key);
      results_.push_back(r);
      stats_.add(r);
      last_key_ = r.key;
    }
  }

 private:
  void append_log(const RoundResult& r) {
    std::ofstream out(log_path(dir_), std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to " + log_path(dir_).string());
    out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw Error("write failed for " + log_path(dir_).string());
  }

  std::string id_;
  std::filesystem::path dir_;
  std::mutex submit_mu_;
  mutable std::shared_mutex state_mu_;
  MatchAnalyzer analyzer_;
  std::vector<RoundResult> results_;
  TacticDistribution stats_;
  std::optional<RoundKey> last_key_;
  EventHub events_;
};

/// Owns all sessions under `<data_dir>/sessions/<id>/`, each holding
/// config.json and an append-only rounds.ndjson. Existing sessions are
/// replayed on construction.
class SessionManager {
 public:
  explicit SessionManager(std::filesystem::path data_dir) : root_(std::move(data_dir)) {
    std::filesystem::create_directories(root_ / "sessions");
    for (const auto& entry : std::filesystem::directory_iterator(root_ / "sessions")) {
      if (!entry.is_directory()) continue;
      const auto cfg_file = Session::config_path(entry.path());
      if (!std::filesystem::exists(cfg_file)) continue;
      std::ifstream in(cfg_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(cfg_file.string() + ": " + e.what());
      }
      auto s = std::make_shared<Session>(entry.path().filename().string(), config_from_json(j),
                                         entry.path());
      s->replay_log();
      sessions_.emplace(s->id(), std::move(s));
    }
  }

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  ~SessionManager() {
    for (auto& [id, s] : sessions_) s->events().close_all();
  }

  /// Validates and persists a new empty session.
  std::shared_ptr<Session> create(const EngineConfig& cfg, std::optional<std::string> id = {}) {
    cfg.validate();
    if (cfg.initial_positions.empty()) {
      throw ValidationError("initial_positions must list at least the first set");
    }
    std::unique_lock lock(mu_);
    std::string sid = id ? *id : fresh_id();
    if (sid.empty() || sid.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-_") !=
                           std::string::npos) {
      throw ValidationError("session id must be lowercase alphanumeric, '-' or '_'");
    }
    if (sessions_.contains(sid)) {
      throw ConflictError("session '" + sid + "' already exists");
    }
    const auto dir = root_ / "sessions" / sid;
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(Session::config_path(dir));
      out << config_to_json(cfg).dump(2) << '\n';
      if (!out) throw Error("cannot write " + Session::config_path(dir).string());
    }
    auto s = std::make_shared<Session>(sid, cfg, dir);
    sessions_.emplace(sid, s);
    return s;
  }

  std::shared_ptr<Session> get(const std::string& id) const {
    std::shared_lock lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("no session '" + id + "'");
    return it->second;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
  }

  RoundResult submit_round(const std::string& id, const RoundKey& key,
                           const std::vector<DetectionRecord>& records,
                           std::optional<Team> possession = std::nullopt) {
    return get(id)->submit(key, records, possession);
  }

  TacticDistribution get_stats(const std::string& id) const { return get(id)->stats(); }

  const std::filesystem::path& data_dir() const { return root_; }

 private:
  std::string fresh_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    for (;;) {
      std::string id;
      for (int i = 0; i < 16; ++i) id += kHex[rng_() & 15];
      if (!sessions_.contains(id)) return id;
    }
  }

  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace setscope
