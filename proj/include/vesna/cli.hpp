#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "vesna/agent.hpp"
#include "vesna/json_util.hpp"
#include "vesna/pipeline.hpp"
#include "vesna/scene_service.hpp"
#include "vesna/store.hpp"

namespace vesna::cli {

enum ExitCode : int { kOk = 0, kPipelineError = 1, kConfigError = 2 };

/// Everything needed to run the pipeline in one process, scene included.
class LocalRuntime {
 public:
  explicit LocalRuntime(const store::Workspace& ws, std::string session_id = "vesna-session")
      : service_(ws.catalog, ws.scene),
        client_(service_),
        pipeline_(ws.nlu, agent::Agent(ws.plans), service_, client_, std::move(session_id)) {}

  Pipeline& pipeline() { return pipeline_; }
  SceneService& service() { return service_; }

 private:
  SceneService service_;
  LocalSceneClient client_;
  Pipeline pipeline_;
};

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct ScriptOptions {
  bool keep_going = false;
};

struct ScriptReport {
  json transcript;
  int exit_code = kOk;
};

/// Replays one utterance per line. Blank lines are skipped. Stops at the
/// first fulfillment error unless `keep_going`.
inline ScriptReport run_script(Pipeline& pipeline, std::istream& in, const ScriptOptions& opts = {}) {
  ScriptReport report;
  json turns = json::array();
  bool aborted = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;

    auto r = pipeline.serve_chat(text);
    std::string status = "ok";
    if (r.match.is_fallback()) status = "fallback";
    else if (!r.outcome) status = "static";
    else if (r.fulfillment_error()) status = "error";

    json params = json::object();
    for (const auto& [k, v] : r.match.params) params[k] = v;
    json turn{{"line", line_no},     {"utterance", std::string(text)}, {"intent", r.match.intent},
              {"confidence", r.match.confidence}, {"params", params}, {"reply", r.reply},
              {"status", status},    {"scene_version", r.scene_version}};
    if (r.fulfillment_error()) turn["error_code"] = r.outcome->error_code.empty() ? "unknown-intent" : r.outcome->error_code;
    turns.push_back(std::move(turn));

    if (r.fulfillment_error()) {
      report.exit_code = kPipelineError;
      if (!opts.keep_going) {
        aborted = true;
        break;
      }
    }
  }
  report.transcript = json{{"turns", turns},
                           {"aborted", aborted},
                           {"scene", scene_state_json(pipeline.scene_service().snapshot())}};
  return report;
}

/// Interactive loop: each line runs the whole pipeline. `:scene` prints the
/// scene document, `:quit` leaves.
inline void run_chat(Pipeline& pipeline, std::istream& in, std::ostream& out) {
  std::string line;
  while (true) {
    out << "you> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text == ":quit") break;
    if (text == ":scene") {
      out << scene_state_json(pipeline.scene_service().snapshot()).dump(2) << "\n";
      continue;
    }
    out << "vesna> " << pipeline.serve_chat(text).reply << "\n";
  }
  out << "\n";
}

}  // namespace vesna::cli
