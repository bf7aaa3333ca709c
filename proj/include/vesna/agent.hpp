#pragma once

// Belief-addition-driven plan execution.
//
// A plan reads like a Jason plan split into parts:
//   trigger  +request(_, Session, "AddObject", Params, _)
//   context  member(param("objName", Name), Params), grid_column(X), ...
//   body     scene_add(Name, X, Y), reply("Done! {Result} is ...")
//
// Context conditions are tried left to right with backtracking. Built-in
// conditions are member/2, grid_column/1, grid_row/1, relation/1 and
// `A == B` / `A \== B`; any other literal is a query against the belief
// base. A scene action binds `Result` to the scene's answer.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vesna/belief.hpp"
#include "vesna/error.hpp"
#include "vesna/json_util.hpp"
#include "vesna/messages.hpp"
#include "vesna/scene.hpp"
#include "vesna/text.hpp"

namespace vesna::agent {

using Bindings = std::map<std::string, Term>;

inline constexpr std::string_view kResultVar = "Result";

/// One-way matching of a pattern against a ground term.
inline bool match(const Term& pattern, const Term& ground, Bindings& b) {
  if (pattern.kind == Term::Kind::var) {
    if (pattern.text == "_") return true;
    auto it = b.find(pattern.text);
    if (it != b.end()) return it->second == ground;
    b.emplace(pattern.text, ground);
    return true;
  }
  if (pattern.kind != ground.kind || pattern.text != ground.text) return false;
  if (pattern.items.size() != ground.items.size()) return false;
  for (std::size_t i = 0; i < pattern.items.size(); ++i) {
    if (!match(pattern.items[i], ground.items[i], b)) return false;
  }
  return true;
}

inline bool match(const Belief& pattern, const Belief& ground, Bindings& b) {
  if (pattern.functor != ground.functor || pattern.args.size() != ground.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!match(pattern.args[i], ground.args[i], b)) return false;
  }
  return true;
}

/// Replaces bound variables; unbound ones stay as variables.
inline Term substitute(const Term& t, const Bindings& b) {
  if (t.kind == Term::Kind::var) {
    auto it = b.find(t.text);
    return it == b.end() ? t : it->second;
  }
  Term out = t;
  for (auto& item : out.items) item = substitute(item, b);
  return out;
}

/// Text of a term as a reply or command argument: strings and atoms bare.
inline std::string term_text(const Term& t) {
  if (t.kind == Term::Kind::string || t.kind == Term::Kind::atom) return t.text;
  return render(t);
}

struct Condition {
  enum class Kind { literal, equal, not_equal };
  Kind kind = Kind::literal;
  Belief literal;  // kind == literal
  Term lhs, rhs;   // comparisons
};

struct Action {
  enum class Kind { scene_add, scene_remove, scene_list, reply };
  Kind kind = Kind::reply;
  std::vector<Term> args;  // reply: a single string holding the template
};

struct Plan {
  std::string label;
  Belief trigger;
  std::vector<Condition> context;
  std::vector<Action> body;
};

namespace detail {

inline void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::var) {
    if (t.text != "_") out.insert(t.text);
    return;
  }
  for (const auto& i : t.items) collect_vars(i, out);
}

inline void collect_vars(const Belief& b, std::set<std::string>& out) {
  for (const auto& a : b.args) collect_vars(a, out);
}

inline Belief parse_pattern(std::string_view text) {
  vesna::detail::TermParser p(text, true);
  Belief b = p.parse_structure();
  p.finish();
  return b;
}

inline Term parse_pattern_term(std::string_view text) {
  vesna::detail::TermParser p(text, true);
  Term t = p.parse_single_term();
  p.finish();
  return t;
}

// Position of a top-level comparison operator, skipping string literals.
inline std::optional<std::pair<std::size_t, bool>> find_comparison(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '\\' && s.substr(i, 3) == "\\==") return std::make_pair(i, true);
    else if (c == '=' && s.substr(i, 2) == "==") return std::make_pair(i, false);
  }
  return std::nullopt;
}

inline bool is_builtin(const Belief& b) {
  return (b.functor == "member" && b.args.size() == 2) ||
         ((b.functor == "grid_column" || b.functor == "grid_row" || b.functor == "relation") &&
          b.args.size() == 1);
}

}  // namespace detail

inline Condition parse_condition(std::string_view text) {
  Condition c;
  if (auto op = detail::find_comparison(text)) {
    auto [at, negated] = *op;
    c.kind = negated ? Condition::Kind::not_equal : Condition::Kind::equal;
    c.lhs = detail::parse_pattern_term(text.substr(0, at));
    c.rhs = detail::parse_pattern_term(text.substr(at + (negated ? 3 : 2)));
    return c;
  }
  c.kind = Condition::Kind::literal;
  c.literal = detail::parse_pattern(text);
  return c;
}

inline Action parse_action(std::string_view text) {
  Belief call = detail::parse_pattern(text);
  Action a;
  a.args = call.args;
  auto arity = [&](std::size_t n) {
    if (call.args.size() != n) {
      throw ConfigError("plans: action " + call.functor + " takes " + std::to_string(n) +
                        " argument(s)");
    }
  };
  if (call.functor == "scene_add") {
    a.kind = Action::Kind::scene_add;
    arity(3);
  } else if (call.functor == "scene_remove") {
    a.kind = Action::Kind::scene_remove;
    arity(1);
  } else if (call.functor == "scene_list") {
    a.kind = Action::Kind::scene_list;
    arity(0);
  } else if (call.functor == "reply") {
    a.kind = Action::Kind::reply;
    arity(1);
    if (call.args[0].kind != Term::Kind::string) {
      throw ConfigError("plans: reply takes a string template");
    }
  } else {
    throw ConfigError("plans: unknown action \"" + call.functor + "\"");
  }
  return a;
}

/// Checks that every variable the context or body reads is bound by the
/// trigger, by an earlier condition, or (for `Result`) by an earlier scene
/// action. Throws ConfigError naming the plan.
inline void validate_plan(const Plan& plan) {
  const std::string where = "plans: plan \"" + plan.label + "\"";
  std::set<std::string> bound;
  detail::collect_vars(plan.trigger, bound);

  auto require_bound = [&](const Term& t, const std::string& what) {
    std::set<std::string> used;
    detail::collect_vars(t, used);
    for (const auto& v : used) {
      if (!bound.count(v)) throw ConfigError(where + ": variable " + v + " unbound in " + what);
    }
  };

  for (const auto& c : plan.context) {
    if (c.kind != Condition::Kind::literal) {
      require_bound(c.lhs, "comparison");
      require_bound(c.rhs, "comparison");
    } else if (c.literal.functor == "member" && c.literal.args.size() == 2) {
      require_bound(c.literal.args[1], "member/2 list");
      detail::collect_vars(c.literal.args[0], bound);
    } else if (detail::is_builtin(c.literal)) {
      require_bound(c.literal.args[0], c.literal.functor);
    } else {
      detail::collect_vars(c.literal, bound);
    }
  }

  for (const auto& a : plan.body) {
    if (a.kind == Action::Kind::reply) {
      for (const auto& name : template_placeholders(a.args[0].text)) {
        if (!bound.count(name)) {
          throw ConfigError(where + ": reply uses {" + name + "} which is never bound");
        }
      }
      continue;
    }
    for (const auto& arg : a.args) require_bound(arg, "action");
    bound.insert(std::string(kResultVar));
  }
}

inline Plan parse_plan(const json& j) {
  using namespace vesna::detail;
  expect_object(j, "plans.plans[]", {"label", "trigger", "context", "body"});
  Plan plan;
  plan.label = require_string(j, "label", "plans.plans[]");
  const std::string where = "plans: plan \"" + plan.label + "\"";
  try {
    std::string trigger = require_string(j, "trigger", where);
    std::string_view t = trigger;
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    if (t.empty() || t.front() != '+') {
      throw ConfigError(where + ": trigger must be a belief addition (+literal)");
    }
    plan.trigger = agent::detail::parse_pattern(t.substr(1));
    if (j.contains("context")) {
      for (const auto& c : require_array(j, "context", where)) {
        if (!c.is_string()) throw ConfigError(where + ".context: expected strings");
        plan.context.push_back(parse_condition(c.get<std::string>()));
      }
    }
    for (const auto& a : require_array(j, "body", where)) {
      if (!a.is_string()) throw ConfigError(where + ".body: expected strings");
      plan.body.push_back(parse_action(a.get<std::string>()));
    }
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const TemplateError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  validate_plan(plan);
  return plan;
}

/// Parses a plan-library document (JSON).
inline std::vector<Plan> load_plans(std::string_view document) {
  using namespace vesna::detail;
  const json doc = parse_document(document, "plans");
  expect_object(doc, "plans", {"schema_version", "plans"});
  check_schema_version(doc, "plans");
  std::vector<Plan> plans;
  std::set<std::string> labels;
  for (const auto& p : require_array(doc, "plans", "plans")) {
    plans.push_back(parse_plan(p));
    if (!labels.insert(plans.back().label).second) {
      throw ConfigError("plans: duplicate plan label \"" + plans.back().label + "\"");
    }
  }
  if (plans.empty()) throw ConfigError("plans: schema violation: plans list is empty");
  return plans;
}

inline constexpr std::string_view kDefaultPlans = R"json({
  "schema_version": 1,
  "plans": [
    {
      "label": "add_global",
      "trigger": "+request(_, _, \"AddObject\", Params, _)",
      "context": [
        "member(param(\"objName\", Name), Params)",
        "member(param(\"posX\", X), Params)",
        "member(param(\"posY\", Y), Params)",
        "grid_column(X)",
        "grid_row(Y)"
      ],
      "body": [
        "scene_add(Name, X, Y)",
        "reply(\"Done! {Result} is now in the {Y} {X} position.\")"
      ]
    },
    {
      "label": "add_relative",
      "trigger": "+request(_, _, \"AddObject\", Params, _)",
      "context": [
        "member(param(\"objName\", Name), Params)",
        "member(param(\"posX\", Relation), Params)",
        "member(param(\"posY\", Anchor), Params)",
        "relation(Relation)"
      ],
      "body": [
        "scene_add(Name, Relation, Anchor)",
        "reply(\"Done! {Result} is now {Relation} {Anchor}.\")"
      ]
    },
    {
      "label": "remove",
      "trigger": "+request(_, _, \"RemoveObject\", Params, _)",
      "context": ["member(param(\"objName\", Ref), Params)"],
      "body": [
        "scene_remove(Ref)",
        "reply(\"Done! {Result} has been removed.\")"
      ]
    },
    {
      "label": "list",
      "trigger": "+request(_, _, \"ListObjects\", _, _)",
      "body": [
        "scene_list",
        "reply(\"The scene contains: {Result}.\")"
      ]
    }
  ]
})json";

inline std::vector<Plan> default_plans() { return load_plans(kDefaultPlans); }

/// Executes scene commands on behalf of plan bodies.
class SceneClient {
 public:
  virtual ~SceneClient() = default;
  virtual protocol::SceneCommandResponse execute(const protocol::SceneCommandRequest& req) = 0;
};

/// Where plan bodies send their side effects.
class Effects {
 public:
  virtual ~Effects() = default;
  virtual protocol::SceneCommandResponse scene(const protocol::SceneCommandRequest& req) = 0;
  virtual void reply(const std::string& text) = 0;
};

struct Selection {
  std::size_t plan_index = 0;
  Bindings bindings;
};

struct StepResult {
  std::optional<Belief> event;            // nullopt: queue was empty
  std::optional<std::size_t> plan_index;  // nullopt: no applicable plan
  std::optional<protocol::SceneCommandResponse> failure;
};

/// Outcome of one fulfillment request.
struct Outcome {
  enum class Status { ok, scene_error, timeout, unknown_intent };
  Status status = Status::ok;
  std::string reply;
  std::string error_code;  // scene error code when status != ok
};

inline std::string error_reply(const protocol::SceneCommandResponse& r) {
  return "Sorry, I could not do that: " + r.message + ".";
}

class Agent {
 public:
  explicit Agent(std::vector<Plan> plans = default_plans()) : plans_(std::move(plans)) {}

  const std::vector<Plan>& plans() const { return plans_; }
  const std::vector<Belief>& belief_base() const { return beliefs_; }
  const std::deque<Belief>& event_queue() const { return events_; }

  bool believes(const Belief& b) const { return canonical_.count(render_belief(b)) > 0; }

  /// Adds `b` and queues an addition event. Returns false (and queues
  /// nothing) when an identical belief is already held.
  bool assert_belief(const Belief& b) {
    if (!canonical_.insert(render_belief(b)).second) return false;
    beliefs_.push_back(b);
    events_.push_back(b);
    return true;
  }

  bool retract_belief(const Belief& b) {
    if (!canonical_.erase(render_belief(b))) return false;
    for (auto it = beliefs_.begin(); it != beliefs_.end(); ++it) {
      if (*it == b) {
        beliefs_.erase(it);
        break;
      }
    }
    return true;
  }

  /// First plan, in library order, whose trigger matches and whose context
  /// holds.
  std::optional<Selection> select_plan(const Belief& event) const {
    for (std::size_t i = 0; i < plans_.size(); ++i) {
      Bindings b;
      if (!match(plans_[i].trigger, event, b)) continue;
      if (auto solved = solve(plans_[i].context, 0, std::move(b))) {
        return Selection{i, std::move(*solved)};
      }
    }
    return std::nullopt;
  }

  /// Processes the event at the head of the queue.
  StepResult step(Effects& effects) {
    StepResult result;
    if (events_.empty()) return result;
    Belief event = std::move(events_.front());
    events_.pop_front();
    result.event = event;

    auto selection = select_plan(event);
    if (!selection) return result;
    result.plan_index = selection->plan_index;

    Bindings& b = selection->bindings;
    for (const auto& action : plans_[selection->plan_index].body) {
      if (action.kind == Action::Kind::reply) {
        effects.reply(render_template(action.args[0].text,
                                      [&](const std::string& name) -> std::optional<std::string> {
                                        auto it = b.find(name);
                                        if (it == b.end()) return std::nullopt;
                                        return term_text(it->second);
                                      }));
        continue;
      }
      auto arg = [&](std::size_t i) { return term_text(substitute(action.args[i], b)); };
      protocol::SceneCommandRequest req;
      switch (action.kind) {
        case Action::Kind::scene_add: req = protocol::SceneCommandRequest::add(arg(0), arg(1), arg(2)); break;
        case Action::Kind::scene_remove: req = protocol::SceneCommandRequest::remove(arg(0)); break;
        default: req = protocol::SceneCommandRequest::list(); break;
      }
      auto response = effects.scene(req);
      if (!response.ok()) {
        effects.reply(error_reply(response));
        result.failure = std::move(response);
        break;
      }
      b[std::string(kResultVar)] = Term::string(action.kind == Action::Kind::scene_list
                                                    ? describe_listing(response.payload)
                                                    : response.payload);
    }
    return result;
  }

  /// Asserts the request, runs the cycle until its event is handled and
  /// hands exactly one reply to `replier`. The request belief is consumed
  /// afterwards so a repeated request is handled again.
  Outcome handle_request(const RequestBelief& req, SceneClient& client,
                         const std::function<void(const std::string&)>& replier) {
    const Belief belief = req.to_belief();
    retract_belief(belief);
    assert_belief(belief);

    struct Collector : Effects {
      SceneClient& client;
      std::vector<std::string> replies;
      explicit Collector(SceneClient& c) : client(c) {}
      protocol::SceneCommandResponse scene(const protocol::SceneCommandRequest& r) override {
        return client.execute(r);
      }
      void reply(const std::string& text) override { replies.push_back(text); }
    };

    Outcome outcome;
    bool handled = false;
    while (!handled && !events_.empty()) {
      Collector sink(client);
      StepResult r = step(sink);
      if (!r.event || !(*r.event == belief)) continue;
      handled = true;
      if (!r.plan_index) {
        outcome.status = Outcome::Status::unknown_intent;
        outcome.reply = "I don't know how to handle " + req.intent_name;
      } else {
        if (r.failure) {
          outcome.error_code = r.failure->code;
          outcome.status = r.failure->code == "timeout" ? Outcome::Status::timeout
                                                         : Outcome::Status::scene_error;
        }
        outcome.reply = sink.replies.empty() ? std::string("Done.") : join(sink.replies, " ");
      }
    }
    retract_belief(belief);
    replier(outcome.reply);
    return outcome;
  }

 private:
  static std::string describe_listing(const std::string& payload) {
    auto refs = protocol::parse_list_payload(payload);
    return refs.empty() ? std::string("nothing") : join(refs, ", ");
  }

  std::optional<Bindings> solve(const std::vector<Condition>& context, std::size_t i,
                                Bindings b) const {
    if (i == context.size()) return b;
    const Condition& c = context[i];
    if (c.kind != Condition::Kind::literal) {
      const bool same = substitute(c.lhs, b) == substitute(c.rhs, b);
      if (same != (c.kind == Condition::Kind::equal)) return std::nullopt;
      return solve(context, i + 1, std::move(b));
    }

    const Belief& lit = c.literal;
    if (lit.functor == "member" && lit.args.size() == 2) {
      const Term list = substitute(lit.args[1], b);
      if (list.kind != Term::Kind::list) return std::nullopt;
      for (const auto& item : list.items) {
        Bindings trial = b;
        if (!match(lit.args[0], item, trial)) continue;
        if (auto done = solve(context, i + 1, std::move(trial))) return done;
      }
      return std::nullopt;
    }
    if (detail::is_builtin(lit)) {
      const Term arg = substitute(lit.args[0], b);
      if (arg.kind != Term::Kind::string && arg.kind != Term::Kind::atom) return std::nullopt;
      bool ok = false;
      if (lit.functor == "grid_column") ok = scene::parse_column(arg.text).has_value();
      if (lit.functor == "grid_row") ok = scene::parse_row(arg.text).has_value();
      if (lit.functor == "relation") ok = scene::parse_relation(arg.text).has_value();
      return ok ? solve(context, i + 1, std::move(b)) : std::nullopt;
    }
    for (const auto& held : beliefs_) {
      Bindings trial = b;
      if (!match(lit, held, trial)) continue;
      if (auto done = solve(context, i + 1, std::move(trial))) return done;
    }
    return std::nullopt;
  }

  std::vector<Plan> plans_;
  std::vector<Belief> beliefs_;
  std::set<std::string> canonical_;
  std::deque<Belief> events_;
};

}  // namespace vesna::agent
