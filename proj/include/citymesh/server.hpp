#pragma once

#include <citymesh/session.hpp>

#include <httplib.h>

#include <functional>
#include <string>

namespace citymesh {

// Local wire API for one Session.
//
//   POST /rpc     body: JSON request {"op": ..., ...}; reply: JSON response
//   GET  /health  reply: {"ok": true, "revision": n}
//
// Every response carries "ok" and the "revision" it reflects; failures add
// "error": {"code", "message"}. Malformed JSON is rejected with code
// "bad_request" and HTTP 400.
class SessionServer {
public:
  using Logger = std::function<void(const std::string& op, bool ok)>;

  explicit SessionServer(Session& session, Logger log = {}) : session_(session), log_(std::move(log)) {
    http_.Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) { rpc(req, res); });
    http_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(Json{{"ok", true}, {"revision", session_.revision()}}.dump(), "application/json");
    });
  }

  bool listen(const std::string& host, int port) { return http_.listen(host, port); }

  // Binds an ephemeral port and returns it; serve with listenAfterBind().
  int bindToAnyPort(const std::string& host) { return http_.bind_to_any_port(host); }
  bool listenAfterBind() { return http_.listen_after_bind(); }
  void waitUntilReady() const { http_.wait_until_ready(); }
  void stop() { http_.stop(); }

private:
  void rpc(const httplib::Request& req, httplib::Response& res) {
    Json request;
    try {
      request = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      res.status = 400;
      res.set_content(Json{{"ok", false},
                           {"revision", session_.revision()},
                           {"error", {{"code", "bad_request"}, {"message", e.what()}}}}
                          .dump(),
                      "application/json");
      return;
    }
    const Json response = session_.handle(request);
    if (log_)
      log_(request.is_object() ? request.value("op", std::string("?")) : "?", response.value("ok", false));
    res.set_content(response.dump(), "application/json");
  }

  Session& session_;
  Logger log_;
  httplib::Server http_;
};

} // namespace citymesh
