#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "symctl/pgrm.hpp"

using namespace symctl;

namespace {

const Scenario& bundled() {
  static const Scenario s = load_bundled_scenario();
  return s;
}

const SolvedSuite& suite() {
  static const SolvedSuite s =
      solve_suite(bundled(), std::make_shared<const CellGraph>(discretize(bundled(), GridSpec{})));
  return s;
}

State hover_cell() {
  const CellGraph& g = *suite().graph;
  const auto b = g.index(suite().at(kBaseGoal).representative);
  return g.cell(b[0], b[1], b[2] + 7);
}

Hypothesis line(std::string goal, std::size_t index, Vec3 step) {
  Hypothesis h;
  h.goal = std::move(goal);
  h.goal_index = index;
  for (int k = 0; k < 4; ++k) {
    h.cells.push_back(static_cast<State>(k));
    h.trajectory.push_back(static_cast<double>(k) * step);
  }
  return h;
}

}  // namespace

TEST_CASE("output set is a box of half-width kappa") {
  const ObservationModel m;
  CHECK(in_output_set({0.05, 0, 0}, {0, 0, 0}, m));
  CHECK_FALSE(in_output_set({0.08, 0, 0}, {0, 0, 0}, m));
  CHECK(in_output_set({0.07, -0.07, 0.07}, {0, 0, 0}, m));
  CHECK(in_output_set({1, 2, 3}, {1, 2, 3}, ObservationModel{1e-9, 0}));
}

TEST_CASE("hypotheses from the hover point") {
  const std::vector<std::string> remaining{"A1", "A2", "A3", "A4"};
  const auto hyps = generate_hypotheses(suite().graph->center(hover_cell()), remaining, suite());
  REQUIRE(hyps.size() == 5);
  const std::vector<std::string> names{"A1", "A2", "A3", "A4", "base"};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    CHECK(hyps[i].goal == names[i]);
    CHECK(hyps[i].cells.front() == hover_cell());
    const auto& goal_cells = suite().at(names[i]).cells;
    CHECK(std::binary_search(goal_cells.begin(), goal_cells.end(), hyps[i].cells.back()));
    CHECK(hyps[i].trajectory.size() == hyps[i].cells.size());
  }
  // A1 and A2 climb together before they split.
  REQUIRE(hyps[0].cells.size() > 8);
  REQUIRE(hyps[1].cells.size() > 8);
  CHECK(std::equal(hyps[0].cells.begin(), hyps[0].cells.begin() + 8, hyps[1].cells.begin()));
  CHECK(hyps[0].cells != hyps[1].cells);
  CHECK(hyps[0].position(1000) == hyps[0].trajectory.back());
}

TEST_CASE("hypotheses near an observation cover every candidate cell") {
  const ObservationModel m;
  const Vec3 c = suite().graph->center(hover_cell());
  const std::vector<std::string> remaining{"A3"};
  const auto near = generate_hypotheses_near(c + Vec3{0.04, 0, 0}, remaining, suite(), m);
  std::set<State> starts;
  for (const Hypothesis& h : near) {
    CHECK(in_output_set(c + Vec3{0.04, 0, 0}, suite().graph->center(h.start), m));
    starts.insert(h.start);
  }
  // The hover cell and its +x neighbour.
  CHECK(starts.size() == 2);
  CHECK(std::is_sorted(near.begin(), near.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return a.goal_index < b.goal_index || (a.goal_index == b.goal_index && a.start < b.start);
  }));
}

TEST_CASE("recognize picks the consistent track") {
  const ObservationModel m;
  const std::vector<Hypothesis> hyps{line("east", 0, {0.1, 0, 0}), line("west", 1, {-0.1, 0, 0})};

  std::vector<Vec3> obs{{0, 0, 0}, {-0.11, 0.01, 0}, {-0.19, 0, 0.02}, {-0.3, 0, 0}};
  Recognition r = recognize(obs, hyps, m);
  CHECK(r.index == 1);
  CHECK_FALSE(r.low_confidence);
  double expected = 0;
  for (int k = 0; k < 4; ++k) expected += distance(obs[k], hyps[1].position(k));
  CHECK(r.score == doctest::Approx(expected));

  SUBCASE("ties go to the first hypothesis") {
    const std::vector<Hypothesis> twins{line("a", 0, {0.1, 0, 0}), line("b", 1, {0.1, 0, 0})};
    std::vector<Vec3> on{{0, 0, 0}, {0.1, 0, 0}};
    CHECK(recognize(on, twins, m).index == 0);
  }
  SUBCASE("nothing consistent falls back to the closest") {
    std::vector<Vec3> off;
    for (int k = 0; k < 4; ++k) off.push_back({-0.05 * k, 0.1 * k, 0});
    r = recognize(off, hyps, m);
    CHECK(r.low_confidence);
    CHECK(r.index == 1);
  }
}

TEST_CASE("sequence prediction") {
  CostMatrix cost;
  cost.goals = {"A", "B", "C", "base"};
  // A>B>C>base = 1 + 1 + 20 = 22, A>C>B>base = 5 + 1 + 1 = 7.
  cost.cost = {{0, 1, 5, 10}, {1, 0, 1, 1}, {5, 1, 0, 20}, {10, 1, 20, 0}};
  const std::vector<std::string> bc{"B", "C"};
  CHECK(predict_sequence("A", bc, cost) == std::vector<std::string>{"A", "C", "B", "base"});

  cost.cost[2][3] = 2;
  cost.cost[1][3] = 10;
  // Now A>B>C>base = 4 and A>C>B>base = 16.
  CHECK(predict_sequence("A", bc, cost) == std::vector<std::string>{"A", "B", "C", "base"});

  // Equal totals keep the earlier goal first.
  cost.cost = {{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}};
  CHECK(predict_sequence("A", bc, cost) == std::vector<std::string>{"A", "B", "C", "base"});

  CHECK(predict_sequence("base", {}, cost) == std::vector<std::string>{"base"});
  CHECK(cost("B", "C") == 1);
  CHECK_THROWS_AS(cost.index_of("Z"), Error);
}

TEST_CASE("goal cost matrix reads the value functions") {
  const CostMatrix cm = goal_cost_matrix(suite());
  REQUIRE(cm.goals.size() == 5);
  for (const SolvedGoal& from : suite().goals)
    for (const SolvedGoal& to : suite().goals)
      CHECK(cm(from.name, to.name) == to.values[from.representative]);
  CHECK(cm("A1", "A1") == 0);
}

TEST_CASE("monitor triggers on a Euclidean deviation above kappa") {
  const State h = hover_cell();
  const Vec3 c = suite().graph->center(h);
  const std::vector<std::string> remaining{"A1", "A2", "A3", "A4"};

  PlanRecognitionMonitor quiet(suite(), {}, remaining, std::vector<State>(10, h));
  CHECK(quiet.step(0, c).empty());
  CHECK(quiet.step(1, c + Vec3{0.07, 0, 0}).empty());
  CHECK(quiet.state().status == MonitorStatus::nominal);
  REQUIRE(quiet.last_checked_position().has_value());
  CHECK(*quiet.last_checked_position() == c);

  PlanRecognitionMonitor loud(suite(), {}, remaining, std::vector<State>(10, h));
  const auto events = loud.step(0, c + Vec3{0.08, 0, 0});
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == EventKind::trigger);
  CHECK(events[0].distance == doctest::Approx(0.08));
  CHECK(loud.state().status == MonitorStatus::recognizing);
  CHECK(loud.state().last_trigger_time == std::size_t{0});

  // Inside the box on every axis but farther than kappa in Euclidean terms.
  PlanRecognitionMonitor corner(suite(), {}, remaining, std::vector<State>(10, h));
  CHECK(corner.step(0, c + Vec3{0.05, 0.05, 0.05}).size() == 1);
}

TEST_CASE("default mission") {
  const MissionConfig config = default_mission_config(bundled());
  CHECK(config.targets == std::vector<std::string>{"A1", "A2", "A3", "A4"});
  const MissionResult a = run_mission(suite(), config);
  const MissionResult b = run_mission(suite(), config);
  CHECK(a.complete);
  REQUIRE_FALSE(a.visited.empty());
  CHECK(a.visited.back() == kBaseGoal);
  CHECK(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < std::min(a.events.size(), b.events.size()); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].kind == b.events[i].kind);
    CHECK(a.events[i].goal == b.events[i].goal);
  }
  CHECK(std::is_sorted(a.events.begin(), a.events.end(),
                       [](const TimelineEvent& x, const TimelineEvent& y) { return x.time < y.time; }));
  CHECK(a.events.back().kind == EventKind::mission_complete);

  std::ostringstream csv;
  write_timeline_csv(csv, a);
  CHECK(csv.str().rfind("t,kind,source,goal,truth,sequence,low_confidence,distance\n", 0) == 0);
  std::ostringstream trace;
  write_mission_trace_csv(trace, a);
  CHECK(trace.str().rfind("t,x,y,z,ox,oy,oz,px,py,pz,status,true_goal,predicted_goal\n", 0) == 0);
}

TEST_CASE("mission observations stay within the noise bound") {
  const MissionResult r = run_mission(suite(), default_mission_config(bundled()));
  const double bound = default_mission_config(bundled()).model.noise_bound;
  for (const TraceRow& row : r.trace) CHECK(max_norm(row.observation - row.position) <= bound);
}

TEST_CASE("a tiny step budget leaves the mission incomplete") {
  MissionConfig config = default_mission_config(bundled());
  config.step_budget = 40;
  const MissionResult r = run_mission(suite(), config);
  CHECK_FALSE(r.complete);
  CHECK(r.trace.size() <= 40);
}

TEST_CASE("mission config parsing") {
  const MissionConfig c = parse_mission_config(
      R"({"targets": ["A3", "A1"], "seed": 7, "kappa": 0.1, "noise_bound": 0.02,
          "disturbances": [{"after_goal": "A3", "drift": [1, 0, 0], "steps": 1}]})",
      bundled());
  CHECK(c.targets == std::vector<std::string>{"A3", "A1"});
  CHECK(c.seed == 7);
  CHECK(c.model.kappa == 0.1);
  REQUIRE(c.disturbances.size() == 1);
  CHECK(c.disturbances[0].drift == Vec3{1, 0, 0});
  CHECK_THROWS_AS(parse_mission_config(R"({"targets": ["A9"]})", bundled()), Error);
  CHECK_THROWS_AS(parse_mission_config(R"({"kappa": 0.03})", bundled()), Error);
  CHECK_THROWS_AS(parse_mission_config("{", bundled()), Error);
}
