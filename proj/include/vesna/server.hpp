#pragma once

// HTTP front ends.
//
//   scene port (8081)  GET /{obj}/{posX}/{posY}, GET /remove/{ref}, GET /list
//   chat port  (8080)  POST /chat, POST /webhook, GET /scene, GET /healthz

#include <chrono>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "vesna/agent.hpp"
#include "vesna/json_util.hpp"
#include "vesna/messages.hpp"
#include "vesna/pipeline.hpp"
#include "vesna/scene_service.hpp"

namespace vesna::server {

inline constexpr int kDefaultChatPort = 8080;
inline constexpr int kDefaultScenePort = 8081;
inline constexpr std::chrono::seconds kSceneTimeout{5};

/// Scene client speaking the scene-command protocol over HTTP.
class HttpSceneClient : public agent::SceneClient {
 public:
  HttpSceneClient(std::string host, int port, std::chrono::milliseconds timeout = kSceneTimeout)
      : client_(std::move(host), port) {
    client_.set_url_encode(false);
    client_.set_connection_timeout(timeout);
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
  }

  protocol::SceneCommandResponse execute(const protocol::SceneCommandRequest& req) override {
    auto res = client_.Get(protocol::encode_scene_request(req));
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::Write ||
          err == httplib::Error::ConnectionTimeout) {
        return protocol::SceneCommandResponse::error("timeout", "the scene did not answer in time");
      }
      return protocol::SceneCommandResponse::error("unavailable",
                                                   "the scene is unreachable (" + httplib::to_string(err) + ")");
    }
    try {
      return protocol::SceneCommandResponse::parse(res->body);
    } catch (const protocol::ProtocolError& e) {
      return protocol::SceneCommandResponse::error("malformed", e.what());
    }
  }

 private:
  httplib::Client client_;
};

/// Raw request path, still percent-encoded, without query or fragment.
inline std::string raw_path(const httplib::Request& req) {
  std::string target = req.target;
  auto q = target.find('?');
  if (q != std::string::npos) target.erase(q);
  return target;
}

inline std::unique_ptr<httplib::Server> make_scene_server(SceneService& service) {
  auto svr = std::make_unique<httplib::Server>();
  svr->set_pre_routing_handler([&service](const httplib::Request& req, httplib::Response& res) {
    if (req.method != "GET") {
      res.status = 405;
      res.set_content("error:method:use GET", "text/plain");
      return httplib::Server::HandlerResponse::Handled;
    }
    auto response = service.handle_path(raw_path(req));
    res.status = response.http_status();
    res.set_content(response.body(), "text/plain; charset=utf-8");
    return httplib::Server::HandlerResponse::Handled;
  });
  return svr;
}

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

inline std::unique_ptr<httplib::Server> make_chat_server(Pipeline& pipeline) {
  auto svr = std::make_unique<httplib::Server>();

  svr->Post("/chat", [&pipeline](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      send_json(res, 400, {{"error", "schema"}, {"reason", "missing:text"}});
      return;
    }
    const auto text = body["text"].get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      send_json(res, 400, {{"error", "schema"}, {"reason", "empty:text"}});
      return;
    }
    auto result = pipeline.serve_chat(text);
    send_json(res, 200, {{"reply", result.reply}, {"scene_version", result.scene_version}});
  });

  svr->Post("/webhook", [&pipeline](const httplib::Request& req, httplib::Response& res) {
    auto result = pipeline.serve_webhook(req.body);
    send_json(res, result.http_status, result.body);
  });

  svr->Get("/scene", [&pipeline](const httplib::Request& req, httplib::Response& res) {
    auto snap = pipeline.scene_service().snapshot();
    const std::string etag = "\"" + std::to_string(snap.version) + "\"";
    res.set_header("ETag", etag);
    if (req.get_header_value("If-None-Match") == etag) {
      res.status = 304;
      return;
    }
    send_json(res, 200, scene_state_json(snap));
  });

  svr->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ready"}});
  });

  svr->Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match");
    res.status = 204;
  });

  return svr;
}

/// Runs a server on its own thread until stopped or destroyed.
class Listener {
 public:
  Listener(std::unique_ptr<httplib::Server> server, const std::string& host, int port)
      : server_(std::move(server)) {
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  ~Listener() { stop(); }

  int port() const { return port_; }

  void stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }

  /// Blocks until the server stops.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

 private:
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
  std::thread thread_;
};

}  // namespace vesna::server
