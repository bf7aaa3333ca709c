// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Runs in-process against the shipped workspace; the
// determinism check also drives the `vesna` binary.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/scene_oracle.hpp"
#include "vesna/cli.hpp"
#include "vesna/store.hpp"

using namespace vesna;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

store::Workspace workspace() { return store::load_workspace(VESNA_WORKSPACE_DIR); }

const std::array<std::string, 3> kScenario = {"Add a Yaskawa MA2010 in front on the right",
                                              "Add a ABB IRB 2600 left of Yaskawa MA2010",
                                              "Remove the Yaskawa MA2010"};

Check paper_scenario() {
  Check c;
  auto ws = workspace();
  const auto t0 = Clock::now();
  cli::LocalRuntime rt(ws);
  std::vector<std::size_t> counts;
  std::vector<scene::SceneObject> first_state;
  for (const auto& line : kScenario) {
    auto r = rt.pipeline().serve_chat(line);
    c.expect(!r.fulfillment_error() && !r.match.is_fallback(), "turn failed: " + line + " -> " + r.reply);
    auto snap = rt.service().snapshot();
    counts.push_back(snap.scene.objects().size());
    if (first_state.empty()) first_state = snap.scene.objects();
  }
  const double elapsed = seconds_since(t0);

  c.expect(counts == std::vector<std::size_t>{1, 2, 1}, "object counts differ from 1, 2, 1");
  const auto final_scene = rt.service().snapshot().scene;
  c.expect(final_scene.objects().size() == 1 && final_scene.objects()[0].ref_name == "ABB IRB 2600",
           "final scene is not exactly {ABB IRB 2600}");
  // Front-right cell: one third of the floor to the right, one third toward the viewer.
  const double want_x = ws.scene.floor_width_x() / 3.0;
  const double want_z = -ws.scene.floor_depth_z() / 3.0;
  c.expect(!first_state.empty() && first_state[0].center.x == want_x && first_state[0].center.z == want_z,
           "first object is not at the front-right cell centre");
  c.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  if (c.ok) c.detail = "counts 1,2,1; centre (" + std::to_string(want_x) + ", " + std::to_string(want_z) +
                       "); " + std::to_string(elapsed * 1000) + " ms";
  return c;
}

Check wire_conformance() {
  Check c;
  using protocol::SceneCommandRequest;
  c.expect(protocol::decode_scene_request("/Yaskawa%20MA2010/right/front") ==
               SceneCommandRequest::add("Yaskawa MA2010", "right", "front"),
           "literal path does not decode to add(\"Yaskawa MA2010\",\"right\",\"front\")");
  std::mt19937 rng(2024);
  for (int i = 0; i < 1000 && c.ok; ++i) {
    auto r = gen::random_scene_request(rng);
    const auto path = protocol::encode_scene_request(r);
    c.expect(protocol::decode_scene_request(path) == r, "decode(encode(r)) != r for " + path);
    c.expect(protocol::encode_scene_request(protocol::decode_scene_request(path)) == path,
             "encode(decode(p)) != p for " + path);
  }
  if (c.ok) c.detail = "literal path ok; 1000 random round-trips";
  return c;
}

Check belief_conformance() {
  Check c;
  auto ws = workspace();
  // The request belief as printed in the original listing, whitespace
  // removed and the elided tail written as `none`.
  const std::string listing =
      "request(\"undefined\",\"5b485464-f275-42ab-853e-59514b115359-cf898478\",\"AddObject\","
      "[param(\"posX\",\"right\"),param(\"posY\",\"front\"),param(\"objName\",\"Yaskawa MA2010\")],none)";

  auto match = nlu::classify(ws.nlu, ws.catalog.names(), {}, kScenario[0]);
  protocol::FulfillmentRequest req;
  req.session = "5b485464-f275-42ab-853e-59514b115359-cf898478";
  req.intent_name = match.intent;
  req.query_text = kScenario[0];
  if (const auto* intent = ws.nlu.find_intent(match.intent)) req.parameters = nlu::ordered_params(*intent, match);
  const std::string rendered = render_belief(req.to_request_belief().to_belief());
  c.expect(rendered == listing, "rendered " + rendered);

  std::mt19937 rng(77);
  for (int i = 0; i < 1000 && c.ok; ++i) {
    Belief b = gen::random_belief(rng);
    c.expect(parse_belief(render_belief(b)) == b, "parse(render(b)) != b for " + render_belief(b));
  }
  if (c.ok) c.detail = "listing reproduced; 1000 random round-trips";
  return c;
}

Check occupancy() {
  Check c;
  auto ws = workspace();
  int pairs = 0;
  for (const auto& [proto, fp] : ws.catalog.prototypes()) {
    for (auto col : {scene::Column::left, scene::Column::center, scene::Column::right}) {
      for (auto row : {scene::Row::front, scene::Row::center, scene::Row::back}) {
        scene::Scene s = ws.scene;
        s.add_object(ws.catalog, proto, scene::GlobalPlacement{col, row});
        const scene::Scene before = s;
        bool occupied = false;
        try {
          s.add_object(ws.catalog, proto, scene::GlobalPlacement{col, row});
        } catch (const scene::SceneError& e) {
          occupied = e.code() == scene::Errc::occupied;
        }
        c.expect(occupied, proto + " twice in one cell was not rejected as occupied");
        c.expect(s == before, proto + ": rejected add changed the scene");
        ++pairs;
      }
    }
  }
  // Same through the wire and the chat path.
  cli::LocalRuntime rt(ws);
  rt.pipeline().serve_chat(kScenario[0]);
  const auto before = rt.service().snapshot();
  auto r = rt.pipeline().serve_chat(kScenario[0]);
  c.expect(r.outcome && r.outcome->error_code == "occupied", "chat path did not report occupied");
  const auto after = rt.service().snapshot();
  c.expect(after.scene == before.scene && after.version == before.version, "chat path changed the scene");
  if (c.ok) c.detail = std::to_string(pairs) + " prototype/cell pairs plus the chat path";
  return c;
}

Check collision_oracle() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ext(0.25, 4.0), floor_dim(5.0, 40.0);
  std::uniform_int_distribution<int> gap_pick(0, 3), proto_count(1, 5), length(1, 20);
  int steps = 0, rejections = 0;
  const int sequences = 1000;
  for (int seq = 0; seq < sequences && c.ok; ++seq) {
    const double w = floor_dim(rng), d = floor_dim(rng);
    const double gap = std::array<double, 4>{0.0, 0.25, 0.5, 1.0}[gap_pick(rng)];
    scene::Catalog catalog;
    std::map<std::string, oracle::Proto> protos;
    std::vector<std::string> names;
    for (int i = proto_count(rng); i > 0; --i) {
      const std::string name = "Proto " + std::to_string(i);
      scene::Footprint f{ext(rng), ext(rng), ext(rng)};
      catalog.add(name, f);
      protos[name] = {f.half_width_x, f.half_depth_z, f.height_y};
      names.push_back(name);
    }
    scene::Scene s(w, d, gap);
    oracle::Model model({w, d, gap}, protos);
    const int n = length(rng);
    for (int k = 0; k < n && c.ok; ++k) {
      if (!model.objects().empty() && std::uniform_int_distribution<int>(0, 5)(rng) == 0) {
        const auto ref = model.objects()[0].ref;
        model.remove(ref);
        s.remove_object(ref);
        continue;
      }
      auto cmd = oracle::random_command(rng, names, model.objects());
      const auto want = model.decide(cmd);
      std::string got = "accept", blocker, ref;
      try {
        ref = s.add_object(catalog, cmd.proto, scene::parse_placement(cmd.pos_x, cmd.pos_y));
      } catch (const scene::SceneError& e) {
        got = std::string(scene::to_string(e.code()));
        if (e.code() == scene::Errc::occupied) blocker = e.subject();
      }
      ++steps;
      if (got != "accept") ++rejections;
      c.expect(got == oracle::name(want.decision) && blocker == want.blocker && ref == want.ref,
               "sequence " + std::to_string(seq) + " step " + std::to_string(k) + ": engine " + got +
                   " vs oracle " + oracle::name(want.decision));
      model.apply(cmd, want);
    }
    // Post-sequence invariants, checked pairwise from scratch.
    const auto& objs = s.objects();
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const auto& a = objs[i];
      const auto& fa = a.footprint;
      c.expect(a.center.x - fa.half_width_x >= -w / 2 && a.center.x + fa.half_width_x <= w / 2 &&
                   a.center.z - fa.half_depth_z >= -d / 2 && a.center.z + fa.half_depth_z <= d / 2,
               a.ref_name + " is outside the floor");
      for (std::size_t j = i + 1; j < objs.size(); ++j) {
        const auto& b = objs[j];
        oracle::Proto pa{fa.half_width_x, fa.half_depth_z, fa.height_y};
        oracle::Proto pb{b.footprint.half_width_x, b.footprint.half_depth_z, b.footprint.height_y};
        c.expect(!oracle::boxes_overlap(a.center.x, a.center.z, pa, b.center.x, b.center.z, pb),
                 a.ref_name + " overlaps " + b.ref_name);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
  if (c.ok) {
    c.detail = std::to_string(sequences) + " sequences, " + std::to_string(steps) + " placements (" +
               std::to_string(rejections) + " rejected); " + std::to_string(elapsed) + " s";
  }
  return c;
}

Check nlu_closure() {
  Check c;
  auto ws = workspace();
  const auto catalog = ws.catalog.names();
  int phrases = 0;
  for (const auto& intent : ws.nlu.intents) {
    for (const auto& phrase : intent.training_phrases) {
      std::vector<std::string> texts{""};
      for (const auto& element : phrase.elements) {
        std::vector<std::string> values;
        if (const auto* a = std::get_if<nlu::Anchor>(&element)) {
          values = {a->word};
        } else {
          const auto& slot = std::get<nlu::Slot>(element);
          switch (ws.nlu.find_entity(slot.entity)->domain) {
            case nlu::ValueDomain::catalog_name:
            case nlu::ValueDomain::reference_name: values.assign(catalog.begin(), catalog.end()); break;
            case nlu::ValueDomain::grid_column: values.assign(nlu::kGridColumns.begin(), nlu::kGridColumns.end()); break;
            case nlu::ValueDomain::grid_row: values.assign(nlu::kGridRows.begin(), nlu::kGridRows.end()); break;
            case nlu::ValueDomain::relative_relation: values.assign(nlu::kRelations.begin(), nlu::kRelations.end()); break;
            case nlu::ValueDomain::free_text: values = {"Bob"}; break;
          }
        }
        std::vector<std::string> next;
        for (const auto& t : texts)
          for (const auto& v : values) next.push_back(t.empty() ? v : t + " " + v);
        texts = std::move(next);
      }
      for (const auto& text : texts) {
        auto m = nlu::classify(ws.nlu, catalog, catalog, text);
        c.expect(m.intent == intent.name && m.confidence >= ws.nlu.confidence_threshold,
                 "\"" + text + "\" classified as " + m.intent);
        ++phrases;
      }
    }
  }

  std::mt19937 rng(50);
  const std::string letters = "bcdfghjklmnpqrstvwxzy0123456789";
  for (int i = 0; i < 50; ++i) {
    std::string text;
    for (int w = std::uniform_int_distribution<int>(1, 6)(rng); w > 0; --w) {
      for (int k = std::uniform_int_distribution<int>(5, 10)(rng); k > 0; --k) {
        text += letters[std::uniform_int_distribution<std::size_t>(0, letters.size() - 1)(rng)];
      }
      text += std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? "?! " : " ";
    }
    auto m = nlu::classify(ws.nlu, catalog, {}, text);
    c.expect(m.is_fallback() && m.intent == ws.nlu.fallback_intent_name, "garbage \"" + text + "\" hit " + m.intent);
  }
  if (c.ok) c.detail = std::to_string(phrases) + " instantiated phrases; 50 garbage strings";
  return c;
}

Check grid_distinctness() {
  Check c;
  std::mt19937 rng(100);
  std::uniform_real_distribution<double> dim(0.1, 500.0);
  for (int i = 0; i < 100; ++i) {
    scene::Scene s(dim(rng), dim(rng));
    std::set<std::pair<double, double>> centers;
    for (auto col : {scene::Column::left, scene::Column::center, scene::Column::right})
      for (auto row : {scene::Row::front, scene::Row::center, scene::Row::back}) {
        auto p = scene::resolve_global(s, col, row);
        centers.insert({p.x, p.z});
      }
    auto mid = scene::resolve_global(s, scene::Column::center, scene::Row::center);
    c.expect(centers.size() == 9, "fewer than 9 distinct centres");
    c.expect(mid.x == 0.0 && mid.z == 0.0, "centre-centre is not the origin");
  }
  if (c.ok) c.detail = "100 random floors";
  return c;
}

std::string capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

Check determinism() {
  Check c;
  const std::string cmd = std::string("\"") + VESNA_CLI + "\" --workspace \"" + VESNA_WORKSPACE_DIR +
                          "\" script --json \"" + VESNA_SCRIPTS_DIR + "/paper_scenario.txt\"";
  int s1 = 0, s2 = 0;
  const std::string a = capture(cmd, s1);
  const std::string b = capture(cmd, s2);
  c.expect(s1 == 0 && s2 == 0, "vesna script exited with a failure status");
  c.expect(!a.empty() && a == b, "two runs produced different transcripts");
  if (c.ok) c.detail = "two CLI runs, " + std::to_string(a.size()) + " identical bytes";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"paper-scenario-replay", paper_scenario},
      {"wire-conformance", wire_conformance},
      {"belief-conformance", belief_conformance},
      {"occupancy", occupancy},
      {"collision-oracle-equivalence", collision_oracle},
      {"nlu-closure", nlu_closure},
      {"grid-distinctness", grid_distinctness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (result.ok ? "PASS " : "FAIL ") << name << ": " << result.detail << std::endl;
    if (!result.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
