#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "setscope/config.hpp"
#include "setscope/detection.hpp"
#include "setscope/errors.hpp"
#include "setscope/pipeline.hpp"
#include "setscope/session.hpp"

namespace setscope {

/// HTTP status for an engine error.
inline int http_status(const std::exception& e) {
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const OrderError*>(&e)) return 409;
  if (dynamic_cast<const ConflictError*>(&e)) return 409;
  if (dynamic_cast<const ValidationError*>(&e)) return 400;
  if (dynamic_cast<const FormatError*>(&e)) return 400;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 400;
  return 500;
}

/// Body of POST /sessions/{id}/rounds.
struct RoundSubmission {
  RoundKey key;
  std::optional<Team> possession;
  std::vector<DetectionRecord> records;  // court-view
};

inline RoundSubmission parse_submission(const nlohmann::json& j, double frame_height) {
  if (!j.is_object()) throw FormatError("round body must be a JSON object");
  auto integer = [&](const char* name) {
    if (!j.contains(name) || !j.at(name).is_number_integer()) {
      throw FormatError(std::string("'") + name + "' must be an integer");
    }
    return j.at(name).get<int>();
  };
  RoundSubmission s;
  s.key.score = integer("score");
  s.key.round = integer("round");
  if (s.key.score < 1 || s.key.round < 1) {
    throw ValidationError("score and round start at 1");
  }
  if (!j.contains("team") || !j.at("team").is_string()) {
    throw FormatError("'team' must be \"a\" or \"b\"");
  }
  s.key.team = parse_team(j.at("team").get<std::string>());
  if (j.contains("possession") && !j.at("possession").is_null()) {
    if (!j.at("possession").is_string()) throw FormatError("'possession' must be \"a\" or \"b\"");
    s.possession = parse_team(j.at("possession").get<std::string>());
  }
  if (!j.contains("detections") || !j.at("detections").is_array()) {
    throw FormatError("'detections' must be an array of detection records");
  }
  std::size_t i = 0;
  for (const auto& rec : j.at("detections")) {
    try {
      s.records.push_back(record_from_json(rec, frame_height));
    } catch (const Error& e) {
      throw FormatError("detections[" + std::to_string(i) + "]: " + e.what());
    }
    ++i;
  }
  try {
    validate_frame_order(s.records);
  } catch (const OrderError& e) {
    throw FormatError(std::string("detections: ") + e.what());
  }
  return s;
}

/// REST + server-sent-events front end over a SessionManager.
///
///   POST /sessions                 create a session
///   GET  /sessions                 list session ids
///   POST /sessions/{id}/rounds     submit one round
///   GET  /sessions/{id}/stats      tactic distribution
///   GET  /sessions/{id}/rounds     round-result history
///   GET  /sessions/{id}/events     text/event-stream of round results
class Service {
 public:
  Service(SessionManager& sessions, std::optional<EngineConfig> defaults = std::nullopt)
      : sessions_(sessions), defaults_(std::move(defaults)) {
    routes();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ~Service() { stop(); }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  /// Binds to an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1") {
    const int port = server_.bind_to_any_port(host);
    if (port <= 0) throw Error("service: cannot bind " + host);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  void stop() {
    stopping_ = true;
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Server& server() { return server_; }

 private:
  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      reply(res, http_status(e), {{"error", e.what()}});
    }
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    try {
      return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("request body is not valid JSON: ") + e.what());
    }
  }

  void routes() {
    server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const EngineConfig cfg = config_from_json(body, defaults_);
        std::optional<std::string> id;
        if (body.contains("session_id")) id = body.at("session_id").get<std::string>();
        const auto s = sessions_.create(cfg, id);
        reply(res, 201, {{"session_id", s->id()}, {"config", config_to_json(s->config())}});
      });
    });

    server_.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { reply(res, 200, {{"sessions", sessions_.ids()}}); });
    });

    server_.Post(R"(/sessions/([a-z0-9_-]+)/rounds)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   guarded(res, [&] {
                     const auto s = sessions_.get(req.matches[1]);
                     const auto sub = parse_submission(parse_body(req),
                                                       s->config().calibration.frame_height);
                     const RoundResult r = s->submit(sub.key, sub.records, sub.possession);
                     reply(res, 200, to_json(r));
                   });
                 });

    server_.Get(R"(/sessions/([a-z0-9_-]+)/rounds)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    nlohmann::json rounds = nlohmann::json::array();
                    for (const auto& r : sessions_.get(req.matches[1])->rounds()) {
                      rounds.push_back(to_json(r));
                    }
                    reply(res, 200, {{"rounds", rounds}});
                  });
                });

    server_.Get(R"(/sessions/([a-z0-9_-]+)/stats)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { reply(res, 200, to_json(sessions_.get_stats(req.matches[1]))); });
                });

    server_.Get(R"(/sessions/([a-z0-9_-]+)/events)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    auto queue = sessions_.get(req.matches[1])->events().subscribe();
                    res.set_header("Cache-Control", "no-cache");
                    res.set_chunked_content_provider(
                        "text/event-stream",
                        [this, queue](std::size_t, httplib::DataSink& sink) {
                          if (stopping_ || queue->closed()) return false;
                          const auto event = queue->pop(std::chrono::milliseconds(500));
                          if (!sink.is_writable()) return false;
                          const std::string chunk =
                              event ? "event: round\ndata: " + *event + "\n\n" : ": keepalive\n\n";
                          return sink.write(chunk.data(), chunk.size());
                        },
                        [queue](bool) { queue->close(); });
                  });
                });
  }

  SessionManager& sessions_;
  std::optional<EngineConfig> defaults_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
};

}  // namespace setscope
