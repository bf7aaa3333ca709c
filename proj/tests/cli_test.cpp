#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "vesna/cli.hpp"
#include "vesna/store.hpp"

using namespace vesna;

namespace {

store::Workspace workspace() { return store::load_workspace(VESNA_WORKSPACE_DIR); }

std::string paper_script() {
  std::ifstream in(std::string(VESNA_SCRIPTS_DIR) + "/paper_scenario.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::ScriptReport run(const std::string& script, cli::ScriptOptions opts = {}) {
  cli::LocalRuntime rt(workspace());
  std::istringstream in(script);
  return cli::run_script(rt.pipeline(), in, opts);
}

}  // namespace

TEST(RunScript, PaperScenarioTranscript) {
  auto report = run(paper_script());
  EXPECT_EQ(report.exit_code, cli::kOk);
  const auto& turns = report.transcript["turns"];
  ASSERT_EQ(turns.size(), 3u);
  EXPECT_EQ(turns[0]["intent"], "AddObject");
  EXPECT_EQ(turns[0]["params"]["objName"], "Yaskawa MA2010");
  EXPECT_EQ(turns[1]["params"]["posX"], "left of");
  EXPECT_EQ(turns[2]["intent"], "RemoveObject");
  for (const auto& t : turns) EXPECT_EQ(t["status"], "ok");
  EXPECT_EQ(turns[2]["scene_version"], 3);
  EXPECT_EQ(report.transcript["aborted"], false);
  ASSERT_EQ(report.transcript["scene"]["objects"].size(), 1u);
  EXPECT_EQ(report.transcript["scene"]["objects"][0]["ref_name"], "ABB IRB 2600");
}

TEST(RunScript, TwoRunsAreByteIdentical) {
  const std::string script = paper_script() + "\nHello\nqwzzx\nList the objects\n";
  EXPECT_EQ(run(script).transcript.dump(2), run(script).transcript.dump(2));
}

TEST(RunScript, BlankLinesSkippedButCounted) {
  auto report = run("\n   \nHello\n");
  ASSERT_EQ(report.transcript["turns"].size(), 1u);
  EXPECT_EQ(report.transcript["turns"][0]["line"], 3);
  EXPECT_EQ(report.transcript["turns"][0]["status"], "static");
}

TEST(RunScript, StopsAtFirstFulfillmentError) {
  const std::string script =
      "Add a Yaskawa MA2010 in front on the right\n"
      "Add a Yaskawa MA2010 in front on the right\n"
      "List the objects\n";
  auto stopped = run(script);
  EXPECT_EQ(stopped.exit_code, cli::kPipelineError);
  EXPECT_EQ(stopped.transcript["aborted"], true);
  ASSERT_EQ(stopped.transcript["turns"].size(), 2u);
  EXPECT_EQ(stopped.transcript["turns"][1]["status"], "error");
  EXPECT_EQ(stopped.transcript["turns"][1]["error_code"], "occupied");

  auto kept = run(script, {true});
  EXPECT_EQ(kept.exit_code, cli::kPipelineError);
  EXPECT_EQ(kept.transcript["aborted"], false);
  EXPECT_EQ(kept.transcript["turns"].size(), 3u);
}

TEST(RunScript, FallbackIsNotAnError) {
  auto report = run("qwzzx blorp\n");
  EXPECT_EQ(report.exit_code, cli::kOk);
  EXPECT_EQ(report.transcript["turns"][0]["status"], "fallback");
  EXPECT_EQ(report.transcript["turns"][0]["confidence"], 0.0);
}

TEST(RunChat, PromptsRepliesAndCommands) {
  cli::LocalRuntime rt(workspace());
  std::istringstream in("Hello\n\nAdd a Yaskawa MA2010 in front on the right\n:scene\n:quit\nHello\n");
  std::ostringstream out;
  cli::run_chat(rt.pipeline(), in, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("you> "), std::string::npos);
  EXPECT_NE(text.find("vesna> Hello! Tell me what to add to the scene."), std::string::npos);
  EXPECT_NE(text.find("vesna> Done! Yaskawa MA2010 is now in the front right position."), std::string::npos);
  EXPECT_NE(text.find("\"scene_version\": 1"), std::string::npos);
  // Nothing after :quit is processed.
  EXPECT_EQ(text.find("vesna> Hello"), text.rfind("vesna> Hello"));
}

TEST(Trim, Whitespace) {
  EXPECT_EQ(cli::trim("  a b \r\n"), "a b");
  EXPECT_EQ(cli::trim(" \t "), "");
}
