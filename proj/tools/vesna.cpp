#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "vesna/cli.hpp"
#include "vesna/server.hpp"
#include "vesna/store.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::string default_workspace() {
  if (const char* dir = std::getenv("VESNA_CONFIG_DIR")) return dir;
  return "workspace";
}

int serve(const vesna::store::Workspace& ws, const std::string& host, int chat_port, int scene_port) {
  using namespace vesna;
  SceneService service(ws.catalog, ws.scene);
  server::Listener scene_listener(server::make_scene_server(service), host, scene_port);
  server::HttpSceneClient client(host == "0.0.0.0" ? "127.0.0.1" : host, scene_listener.port());
  Pipeline pipeline(ws.nlu, agent::Agent(ws.plans), service, client);
  server::Listener chat_listener(server::make_chat_server(pipeline), host, chat_port);

  std::cerr << "vesna: scene commands on " << host << ":" << scene_listener.port() << "\n"
            << "vesna: chat, webhook and scene state on " << host << ":" << chat_listener.port()
            << "\n";

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));

  chat_listener.stop();
  scene_listener.stop();
  return vesna::cli::kOk;
}

void print_text_transcript(const vesna::json& transcript) {
  for (const auto& turn : transcript["turns"]) {
    std::cout << "> " << turn["utterance"].get<std::string>() << "\n"
              << "< " << turn["reply"].get<std::string>() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a simulated scene by chatting with an agent"};
  app.require_subcommand(1);

  std::string workspace = default_workspace();
  app.add_option("--workspace", workspace, "Workspace directory (nlu, plans, catalog, scene)");

  int chat_port = vesna::server::kDefaultChatPort;
  int scene_port = vesna::server::kDefaultScenePort;
  std::string host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Run the chat/webhook service and the scene listener");
  serve_cmd->add_option("--chat-port", chat_port, "Port for /chat, /webhook, /scene, /healthz")
      ->envname("VESNA_CHAT_PORT");
  serve_cmd->add_option("--scene-port", scene_port, "Port for scene commands")->envname("VESNA_SCENE_PORT");
  serve_cmd->add_option("--host", host, "Address to bind");

  auto* chat_cmd = app.add_subcommand("chat", "Interactive chat in the terminal");

  std::string script_path;
  bool keep_going = false;
  bool as_json = false;
  auto* script_cmd = app.add_subcommand("script", "Replay a file with one utterance per line");
  script_cmd->add_option("file", script_path, "Script file")->required();
  script_cmd->add_flag("--keep-going", keep_going, "Continue after a fulfillment error");
  script_cmd->add_flag("--json", as_json, "Print the transcript as JSON");

  auto* validate_cmd = app.add_subcommand("validate", "Check the workspace documents and exit");
  validate_cmd->add_flag("--json", as_json, "Print the summary as JSON");

  CLI11_PARSE(app, argc, argv);

  vesna::store::Workspace ws;
  try {
    ws = vesna::store::load_workspace(workspace);
  } catch (const vesna::ConfigError& e) {
    std::cerr << "vesna: config error: " << e.what() << "\n";
    return vesna::cli::kConfigError;
  }

  if (*validate_cmd) {
    vesna::json summary{{"intents", ws.nlu.intents.size()},
                        {"plans", ws.plans.size()},
                        {"prototypes", ws.catalog.prototypes().size()},
                        {"objects", ws.scene.objects().size()}};
    if (as_json) {
      std::cout << summary.dump(2) << "\n";
    } else {
      std::cout << "workspace " << workspace << " is valid: " << ws.nlu.intents.size()
                << " intents, " << ws.plans.size() << " plans, " << ws.catalog.prototypes().size()
                << " prototypes, " << ws.scene.objects().size() << " objects\n";
    }
    return vesna::cli::kOk;
  }

  if (*serve_cmd) {
    try {
      return serve(ws, host, chat_port, scene_port);
    } catch (const std::exception& e) {
      std::cerr << "vesna: " << e.what() << "\n";
      return vesna::cli::kPipelineError;
    }
  }

  vesna::cli::LocalRuntime runtime(ws);

  if (*chat_cmd) {
    vesna::cli::run_chat(runtime.pipeline(), std::cin, std::cout);
    return vesna::cli::kOk;
  }

  std::ifstream in(script_path);
  if (!in) {
    std::cerr << "vesna: cannot open script " << script_path << "\n";
    return vesna::cli::kConfigError;
  }
  auto report = vesna::cli::run_script(runtime.pipeline(), in, {keep_going});
  if (as_json) {
    std::cout << report.transcript.dump(2) << "\n";
  } else {
    print_text_transcript(report.transcript);
  }
  return report.exit_code;
}
