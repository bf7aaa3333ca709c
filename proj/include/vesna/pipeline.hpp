#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "vesna/agent.hpp"
#include "vesna/messages.hpp"
#include "vesna/nlu.hpp"
#include "vesna/scene_service.hpp"

namespace vesna {

struct ChatResult {
  std::string reply;
  std::uint64_t scene_version = 0;
  nlu::IntentMatch match;
  std::optional<agent::Outcome> outcome;  // set when the intent was fulfilled

  bool fulfillment_error() const {
    return outcome && outcome->status != agent::Outcome::Status::ok;
  }
};

struct WebhookResult {
  int http_status = 200;
  json body;
  std::optional<agent::Outcome> outcome;
};

/// Chat text in, reply out. Every request passes through one mailbox, so a
/// request is fully handled before the next one starts.
class Pipeline {
 public:
  Pipeline(nlu::NluConfig nlu, agent::Agent agent, SceneService& scene,
           agent::SceneClient& client, std::string session_id = "vesna-session")
      : nlu_(std::move(nlu)),
        agent_(std::move(agent)),
        scene_(scene),
        client_(client),
        session_id_(std::move(session_id)) {}

  const nlu::NluConfig& nlu_config() const { return nlu_; }
  SceneService& scene_service() { return scene_; }

  ChatResult serve_chat(std::string_view text) {
    std::lock_guard lock(mailbox_);
    ChatResult result;
    const auto snap = scene_.snapshot();
    result.match = nlu::classify(nlu_, scene_.catalog().names(), snap.scene.ref_names(), text);

    if (result.match.is_fallback()) {
      result.reply = nlu_.fallback_response;
    } else {
      const auto* intent = nlu_.find_intent(result.match.intent);
      if (!intent->fulfillment) {
        result.reply = nlu::render_static_response(*intent, result.match);
      } else {
        protocol::FulfillmentRequest req;
        req.response_id = session_id_ + "-" + std::to_string(++request_counter_);
        req.query_text = std::string(text);
        req.intent_name = intent->name;
        req.parameters = nlu::ordered_params(*intent, result.match);
        req.session = session_id_;
        result.outcome = fulfill(req);
        result.reply = result.outcome->reply;
      }
    }
    result.scene_version = scene_.version();
    return result;
  }

  /// A fulfillment request arriving from outside (POST /webhook).
  WebhookResult serve_webhook(std::string_view body) {
    protocol::FulfillmentRequest req;
    try {
      req = protocol::FulfillmentRequest::from_json(body);
    } catch (const protocol::ProtocolError& e) {
      return {400, json{{"error", "schema"}, {"reason", e.reason()}, {"message", e.what()}}, std::nullopt};
    }
    std::lock_guard lock(mailbox_);
    WebhookResult result;
    result.outcome = fulfill(req);
    result.body = protocol::FulfillmentResponse{result.outcome->reply}.to_json();
    result.http_status = result.outcome->status == agent::Outcome::Status::timeout ? 504 : 200;
    return result;
  }

  /// Direct access for callers that already built a request belief.
  agent::Outcome handle_request(const RequestBelief& req) {
    std::lock_guard lock(mailbox_);
    return agent_.handle_request(req, client_, [](const std::string&) {});
  }

 private:
  agent::Outcome fulfill(const protocol::FulfillmentRequest& req) {
    return agent_.handle_request(req.to_request_belief(), client_, [](const std::string&) {});
  }

  nlu::NluConfig nlu_;
  agent::Agent agent_;
  SceneService& scene_;
  agent::SceneClient& client_;
  std::string session_id_;
  std::uint64_t request_counter_ = 0;
  std::mutex mailbox_;
};

}  // namespace vesna
