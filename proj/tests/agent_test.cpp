#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vesna/agent.hpp"

using namespace vesna;
using namespace vesna::agent;
using protocol::SceneCommandRequest;
using protocol::SceneCommandResponse;

namespace {

// Records every command and answers from a fixed script.
class ScriptedScene : public SceneClient, public Effects {
 public:
  std::vector<SceneCommandRequest> calls;
  std::vector<std::string> replies;
  SceneCommandResponse answer = SceneCommandResponse::done("Yaskawa MA2010");

  SceneCommandResponse execute(const SceneCommandRequest& req) override {
    calls.push_back(req);
    return answer;
  }
  SceneCommandResponse scene(const SceneCommandRequest& req) override { return execute(req); }
  void reply(const std::string& text) override { replies.push_back(text); }
};

RequestBelief request(std::string intent, std::vector<std::pair<std::string, std::string>> params) {
  RequestBelief r;
  r.session_id = "s-1";
  r.intent_name = std::move(intent);
  r.params = std::move(params);
  return r;
}

RequestBelief add_global() {
  return request("AddObject", {{"posX", "right"}, {"posY", "front"}, {"objName", "Yaskawa MA2010"}});
}

std::string plan_error(const std::string& plan_json) {
  try {
    parse_plan(json::parse(plan_json));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "accepted";
}

}  // namespace

TEST(DefaultPlans, LoadInOrder) {
  auto plans = default_plans();
  ASSERT_EQ(plans.size(), 4u);
  EXPECT_EQ(plans[0].label, "add_global");
  EXPECT_EQ(plans[1].label, "add_relative");
  EXPECT_EQ(plans[2].label, "remove");
  EXPECT_EQ(plans[3].label, "list");
}

TEST(SelectPlan, AddObjectBindsNameAndPosition) {
  Agent agent;
  auto sel = agent.select_plan(add_global().to_belief());
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->plan_index, 0u);
  EXPECT_EQ(sel->bindings.at("Name"), Term::string("Yaskawa MA2010"));
  EXPECT_EQ(sel->bindings.at("X"), Term::string("right"));
  EXPECT_EQ(sel->bindings.at("Y"), Term::string("front"));
}

TEST(SelectPlan, RelativeAddTakesTheSecondPlan) {
  Agent agent;
  auto sel = agent.select_plan(
      request("AddObject", {{"posX", "left of"}, {"posY", "Yaskawa MA2010"}, {"objName", "ABB IRB 2600"}})
          .to_belief());
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->plan_index, 1u);
  EXPECT_EQ(sel->bindings.at("Anchor"), Term::string("Yaskawa MA2010"));
}

TEST(SelectPlan, UnknownIntentHasNoPlan) {
  Agent agent;
  EXPECT_FALSE(agent.select_plan(request("Unknown", {}).to_belief()).has_value());
}

TEST(SelectPlan, FailingGuardFallsThroughToNextPlan) {
  // Library: [centre-only, anything]. posX = "right" fails the first guard
  // (X == "center"), so the second plan is selected; with posX = "center"
  // the first one is.
  auto plans = load_plans(R"j({
    "schema_version": 1,
    "plans": [
      {"label": "centre_only",
       "trigger": "+request(_, _, \"AddObject\", Params, _)",
       "context": ["member(param(\"posX\", X), Params)", "X == \"center\""],
       "body": ["reply(\"centre\")"]},
      {"label": "anything",
       "trigger": "+request(_, _, \"AddObject\", _, _)",
       "body": ["reply(\"anything\")"]}
    ]})j");
  Agent agent(plans);
  EXPECT_EQ(agent.select_plan(add_global().to_belief())->plan_index, 1u);
  EXPECT_EQ(agent.select_plan(request("AddObject", {{"posX", "center"}}).to_belief())->plan_index, 0u);
}

TEST(SelectPlan, ContextBacktracksOverMembers) {
  // The first posX entry fails grid_column, the second satisfies it.
  auto plans = load_plans(R"j({
    "schema_version": 1,
    "plans": [
      {"label": "p",
       "trigger": "+request(_, _, \"A\", Params, _)",
       "context": ["member(param(\"posX\", X), Params)", "grid_column(X)"],
       "body": ["reply(\"{X}\")"]}
    ]})j");
  Agent agent(plans);
  auto sel = agent.select_plan(request("A", {{"posX", "up"}, {"posX", "left"}}).to_belief());
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->bindings.at("X"), Term::string("left"));
}

TEST(SelectPlan, BeliefBaseQueriesAndNegation) {
  auto plans = load_plans(R"j({
    "schema_version": 1,
    "plans": [
      {"label": "demo",
       "trigger": "+request(_, _, \"A\", _, _)",
       "context": ["mode(M)", "M \\== \"off\""],
       "body": ["reply(\"mode {M}\")"]}
    ]})j");
  Agent agent(plans);
  const Belief event = request("A", {}).to_belief();
  EXPECT_FALSE(agent.select_plan(event).has_value());
  agent.assert_belief(parse_belief(R"(mode("off"))"));
  EXPECT_FALSE(agent.select_plan(event).has_value());
  agent.assert_belief(parse_belief(R"(mode("demo"))"));
  EXPECT_EQ(agent.select_plan(event)->bindings.at("M"), Term::string("demo"));
}

TEST(SelectPlan, DeterministicForIdenticalState) {
  Agent a, b;
  for (const auto& req : {add_global(), request("RemoveObject", {{"objName", "X"}}),
                          request("ListObjects", {}), request("Nope", {})}) {
    auto sa = a.select_plan(req.to_belief());
    auto sb = b.select_plan(req.to_belief());
    ASSERT_EQ(sa.has_value(), sb.has_value());
    if (sa) {
      EXPECT_EQ(sa->plan_index, sb->plan_index);
      EXPECT_EQ(sa->bindings, sb->bindings);
    }
  }
}

TEST(AssertBelief, IdempotentOnCanonicalForm) {
  Agent agent;
  const Belief b = parse_belief(R"(mode( "demo" ))");
  EXPECT_TRUE(agent.assert_belief(b));
  EXPECT_FALSE(agent.assert_belief(parse_belief(R"(mode("demo"))")));
  EXPECT_EQ(agent.belief_base().size(), 1u);
  EXPECT_EQ(agent.event_queue().size(), 1u);
  EXPECT_TRUE(agent.believes(b));
  EXPECT_TRUE(agent.retract_belief(b));
  EXPECT_FALSE(agent.believes(b));
}

TEST(Step, EmptyQueueIsNoOp) {
  Agent agent;
  ScriptedScene sink;
  auto r = agent.step(sink);
  EXPECT_FALSE(r.event.has_value());
  EXPECT_TRUE(sink.calls.empty());
  EXPECT_TRUE(sink.replies.empty());
}

TEST(Step, RunsBodyInOrder) {
  Agent agent;
  ScriptedScene sink;
  agent.assert_belief(add_global().to_belief());
  auto r = agent.step(sink);
  EXPECT_EQ(r.plan_index, 0u);
  ASSERT_EQ(sink.calls.size(), 1u);
  EXPECT_EQ(sink.calls[0], SceneCommandRequest::add("Yaskawa MA2010", "right", "front"));
  EXPECT_EQ(sink.replies, std::vector<std::string>{"Done! Yaskawa MA2010 is now in the front right position."});
}

TEST(Step, SceneFailureSkipsRemainingActions) {
  auto plans = load_plans(R"j({
    "schema_version": 1,
    "plans": [
      {"label": "two_adds",
       "trigger": "+request(_, _, \"A\", _, _)",
       "body": ["scene_add(\"X\", \"left\", \"front\")", "scene_add(\"Y\", \"right\", \"front\")",
                "reply(\"both placed\")"]}
    ]})j");
  Agent agent(plans);
  ScriptedScene sink;
  sink.answer = SceneCommandResponse::error("occupied", "the position is already taken by Z");
  agent.assert_belief(request("A", {}).to_belief());
  auto r = agent.step(sink);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->code, "occupied");
  EXPECT_EQ(sink.calls.size(), 1u);
  EXPECT_EQ(sink.replies,
            std::vector<std::string>{"Sorry, I could not do that: the position is already taken by Z."});
}

TEST(Step, NoLostEvents) {
  Agent agent;
  ScriptedScene sink;
  const int n = 25;
  for (int i = 0; i < n; ++i) {
    ASSERT_TRUE(agent.assert_belief(request("ListObjects", {{"k", std::to_string(i)}}).to_belief()));
  }
  sink.answer = SceneCommandResponse::done("[]");
  for (int i = 0; i < n; ++i) agent.step(sink);
  EXPECT_TRUE(agent.event_queue().empty());
  EXPECT_EQ(sink.replies.size(), static_cast<std::size_t>(n));
}

TEST(HandleRequest, ExactlyOneReplyOnEveryPath) {
  struct Case {
    RequestBelief req;
    SceneCommandResponse answer;
    Outcome::Status status;
    std::string reply;
  };
  const std::vector<Case> cases{
      {add_global(), SceneCommandResponse::done("Yaskawa MA2010"), Outcome::Status::ok,
       "Done! Yaskawa MA2010 is now in the front right position."},
      {add_global(), SceneCommandResponse::error("occupied", "the position is already taken by Yaskawa MA2010"),
       Outcome::Status::scene_error, "Sorry, I could not do that: the position is already taken by Yaskawa MA2010."},
      {add_global(), SceneCommandResponse::error("timeout", "the scene did not answer in time"),
       Outcome::Status::timeout, "Sorry, I could not do that: the scene did not answer in time."},
      {request("Teleport", {}), SceneCommandResponse::done("x"), Outcome::Status::unknown_intent,
       "I don't know how to handle Teleport"},
      {request("AddObject", {{"objName", "A"}, {"posX", "up"}, {"posY", "down"}}), SceneCommandResponse::done("x"),
       Outcome::Status::unknown_intent, "I don't know how to handle AddObject"},
      {request("ListObjects", {}), SceneCommandResponse::done("[]"), Outcome::Status::ok,
       "The scene contains: nothing."},
      {request("ListObjects", {}), SceneCommandResponse::done(R"(["A","B#2"])"), Outcome::Status::ok,
       "The scene contains: A, B#2."},
      {request("RemoveObject", {{"objName", "ABB IRB 2600"}}), SceneCommandResponse::done("ABB IRB 2600"),
       Outcome::Status::ok, "Done! ABB IRB 2600 has been removed."},
  };
  for (const auto& c : cases) {
    Agent agent;
    ScriptedScene scene;
    scene.answer = c.answer;
    std::vector<std::string> replies;
    auto outcome = agent.handle_request(c.req, scene, [&](const std::string& r) { replies.push_back(r); });
    ASSERT_EQ(replies.size(), 1u) << c.reply;
    EXPECT_EQ(replies[0], c.reply);
    EXPECT_EQ(outcome.reply, c.reply);
    EXPECT_EQ(outcome.status, c.status) << c.reply;
    EXPECT_TRUE(agent.event_queue().empty());
  }
}

TEST(HandleRequest, RepeatedRequestIsHandledAgain) {
  Agent agent;
  ScriptedScene scene;
  int replies = 0;
  for (int i = 0; i < 3; ++i) agent.handle_request(add_global(), scene, [&](const std::string&) { ++replies; });
  EXPECT_EQ(replies, 3);
  EXPECT_EQ(scene.calls.size(), 3u);
  EXPECT_FALSE(agent.believes(add_global().to_belief()));
}

TEST(HandleRequest, PlanWithoutReplySaysDone) {
  auto plans = load_plans(R"j({"schema_version": 1, "plans": [
      {"label": "quiet", "trigger": "+request(_, _, \"A\", _, _)", "body": ["scene_list"]}]})j");
  Agent agent(plans);
  ScriptedScene scene;
  scene.answer = SceneCommandResponse::done("[]");
  EXPECT_EQ(agent.handle_request(request("A", {}), scene, [](const std::string&) {}).reply, "Done.");
}

TEST(ParsePlan, ValidationErrors) {
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "request(_,_,\"A\",_,_)", "body": []})j"), "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",_,_)", "body": ["scene_add(Name, \"l\", \"f\")"]})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",_,_)", "body": ["teleport(\"x\")"]})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",_,_)", "body": ["reply(\"{Who}\")"]})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",_,_)", "body": ["reply(\"{Result}\")"]})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",_,_)", "body": ["scene_remove(\"a\", \"b\")"]})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",P,_)", "context": ["member(X, Q)"], "body": []})j"),
            "accepted");
  EXPECT_NE(plan_error(R"j({"label": "p", "trigger": "+request(", "body": []})j"), "accepted");
  EXPECT_EQ(plan_error(R"j({"label": "p", "trigger": "+request(_,_,\"A\",P,_)",
                           "context": ["member(param(\"k\", V), P)"],
                           "body": ["scene_remove(V)", "reply(\"{V} {Result}\")"]})j"),
            "accepted");
}

TEST(LoadPlans, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(load_plans(R"j({"schema_version": 1, "plans": []})j"), ConfigError);
  EXPECT_THROW(load_plans(R"j({"schema_version": 1, "plans": [
      {"label": "p", "trigger": "+a", "body": []}, {"label": "p", "trigger": "+b", "body": []}]})j"),
               ConfigError);
}
