#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <set>

#include "doctest.h"
#include "symctl/grid.hpp"
#include "symctl/solver.hpp"

using namespace symctl;

namespace {

const Scenario& bundled() {
  static const Scenario s = load_bundled_scenario();
  return s;
}

const CellGraph& default_graph() {
  static const CellGraph g = discretize(bundled(), GridSpec{});
  return g;
}

// Open box with one target and no obstacles or fires.
Scenario open_box() {
  return parse_scenario(R"({
    "mission_area": {"lo": [0, 0, 0], "hi": [1.0, 0.8, 0.6]},
    "base": {"lo": [0.0, 0.0, 0.0], "hi": [0.2, 0.2, 0.0]},
    "targets": [{"name": "T", "lo": [0.6, 0.4, 0.2], "hi": [0.8, 0.6, 0.4]}],
    "mission": ["T"]
  })");
}

bool in_grid(const CellGraph& g, std::array<int, 3> c) {
  for (int a = 0; a < 3; ++a)
    if (c[a] < 0 || c[a] >= g.dims()[a]) return false;
  return true;
}

}  // namespace

TEST_CASE("default grid size") {
  const CellGraph& g = default_graph();
  CHECK(g.dims() == std::array<int, 3>{30, 20, 20});
  CHECK(g.num_cells() == 12000);
  CHECK(g.moves().size() == 26);
  CHECK(g.transitions()->num_states() == 12000);
}

TEST_CASE("cell tags") {
  const CellGraph& g = default_graph();
  auto kind_at = [&](Vec3 p) { return g.kind(*g.locate(p)); };
  // Inside Hf1, well away from every other box.
  CHECK(kind_at({0.5, 1.6, 0.5}) == CellKind::obstacle);
  CHECK(kind_at({0.05, 1.65, 1.65}) == CellKind::target);
  // The fire sits 0.15 below its target and wins the overlap.
  CHECK(kind_at({0.05, 1.65, 1.55}) == CellKind::fire);
  CHECK(kind_at({-0.95, 0.05, 0.0}) == CellKind::base);
  CHECK(kind_at({-0.5, 0.5, 0.5}) == CellKind::free);
  CHECK_FALSE(g.locate({5, 5, 5}).has_value());

  for (const std::string& goal : {"A1", "A2", "A3", "A4", "A5", "base"}) {
    CAPTURE(goal);
    const auto cells = g.cells_of(goal);
    CHECK_FALSE(cells.empty());
    CHECK(std::is_sorted(cells.begin(), cells.end()));
    for (State c : cells) CHECK(g.is_free(c));
  }
  CHECK_THROWS_AS(g.cells_of("A9"), Error);
}

TEST_CASE("successor sets are the nominal cell plus lateral neighbours") {
  const CellGraph& g = default_graph();
  const TransitionSystem& ts = *g.transitions();
  const int r = g.spec().disturbance_radius;
  const double eta = g.spec().cell_size;

  for (State x = 0; x < g.num_cells(); ++x) {
    const auto xi = g.index(x);
    for (Input u = 0; u < g.moves().size(); ++u) {
      const auto m = g.moves()[u];
      const auto succ = ts.successors(x, u);

      std::set<State> expected;
      bool enabled = g.is_free(x);
      std::array<int, 3> nominal{xi[0] + m[0], xi[1] + m[1], xi[2] + m[2]};
      enabled = enabled && in_grid(g, nominal) &&
                g.is_free(g.cell(nominal[0], nominal[1], nominal[2]));
      for (int dx = -r; dx <= r && enabled; ++dx)
        for (int dy = -r; dy <= r && enabled; ++dy)
          for (int dz = -r; dz <= r && enabled; ++dz) {
            if (dx * m[0] + dy * m[1] + dz * m[2] != 0) continue;
            if (std::abs(dx) + std::abs(dy) + std::abs(dz) > r) continue;
            const std::array<int, 3> y{nominal[0] + dx, nominal[1] + dy, nominal[2] + dz};
            if (!in_grid(g, y)) {
              enabled = false;
              break;
            }
            expected.insert(g.cell(y[0], y[1], y[2]));
          }

      if (!enabled) {
        REQUIRE(succ.size() == 1);
        CHECK(succ[0].to == x);
        CHECK(succ[0].cost == kInfinity);
        continue;
      }
      REQUIRE(succ.size() == expected.size());
      CHECK(succ[0].to == g.cell(nominal[0], nominal[1], nominal[2]));
      std::set<State> got;
      for (const Successor& s : succ) {
        got.insert(s.to);
        CHECK(s.cost == doctest::Approx(distance(g.center(x), g.center(s.to))));
        CHECK(s.cost <= eta * std::sqrt(3.0) + 1e-9 + eta * r);
      }
      CHECK(got == expected);
    }
  }
}

TEST_CASE("face moves without disturbance are deterministic") {
  GridSpec spec;
  spec.connectivity = Connectivity::face;
  spec.disturbance_radius = 0;
  const CellGraph g = discretize(bundled(), spec);
  CHECK(g.moves().size() == 6);
  const TransitionSystem& ts = *g.transitions();
  for (std::size_t p = 0; p < ts.num_pairs(); ++p) CHECK(ts.successors(p).size() == 1);

  // One step from a goal cell costs one cell length.
  const ProblemInstance inst = build_reach_avoid(g, "A2");
  const ValueFunction w = solve_modified(inst).values;
  const State goal = g.cells_of("A2").front();
  const auto gi = g.index(goal);
  const State below = g.cell(gi[0], gi[1], gi[2] - 1);
  const State beside = g.cell(gi[0] - 1, gi[1], gi[2]);
  CHECK(w[goal] == 0);
  if (g.is_free(beside)) CHECK(w[beside] == doctest::Approx(0.1));
  if (g.is_free(below)) CHECK(w[below] == doctest::Approx(0.1));
}

TEST_CASE("open box values equal breadth-first distances") {
  GridSpec spec;
  spec.connectivity = Connectivity::face;
  spec.disturbance_radius = 0;
  const CellGraph g = discretize(open_box(), spec);
  const ProblemInstance inst = build_reach_avoid(g, "T");
  const ValueFunction w = solve_modified(inst).values;

  std::vector<int> hops(g.num_cells(), -1);
  std::deque<State> queue;
  for (State c : g.cells_of("T")) {
    hops[c] = 0;
    queue.push_back(c);
  }
  while (!queue.empty()) {
    const State c = queue.front();
    queue.pop_front();
    const auto ci = g.index(c);
    for (int a = 0; a < 3; ++a)
      for (int s : {-1, 1}) {
        auto n = ci;
        n[a] += s;
        if (!in_grid(g, n)) continue;
        const State y = g.cell(n[0], n[1], n[2]);
        if (hops[y] >= 0) continue;
        hops[y] = hops[c] + 1;
        queue.push_back(y);
      }
  }
  for (State c = 0; c < g.num_cells(); ++c) {
    CAPTURE(c);
    CHECK(w[c] == doctest::Approx(0.1 * hops[c]));
  }
}

TEST_CASE("lateral disturbance raises values but keeps them finite in open space") {
  const CellGraph g = discretize(open_box(), GridSpec{});
  const ValueFunction w = solve_modified(build_reach_avoid(g, "T")).values;
  GridSpec calm;
  calm.disturbance_radius = 0;
  const CellGraph g0 = discretize(open_box(), calm);
  const ValueFunction w0 = solve_modified(build_reach_avoid(g0, "T")).values;
  const State probe = *g.locate({0.15, 0.15, 0.05});
  CHECK(w[probe] < kInfinity);
  CHECK(w[probe] >= w0[probe]);
}

TEST_CASE("scenario suite") {
  const auto suite = make_scenario_suite(bundled(), default_graph());
  REQUIRE(suite.size() == 5);
  const std::vector<std::string> names{"A1", "A2", "A3", "A4", "base"};
  for (std::size_t i = 0; i < suite.size(); ++i) {
    CHECK(suite[i].name == names[i]);
    CHECK(validate(suite[i].instance).ok());
    CHECK(suite[i].instance.shared_transitions() == suite[0].instance.shared_transitions());
  }
}

TEST_CASE("grid errors") {
  GridSpec coarse;
  coarse.cell_size = 0.7;
  CHECK_THROWS_AS(discretize(bundled(), coarse), Error);
  GridSpec bad;
  bad.cell_size = 0;
  CHECK_THROWS_AS(discretize(bundled(), bad), Error);
  bad = {};
  bad.disturbance_radius = -1;
  CHECK_THROWS_AS(discretize(bundled(), bad), Error);

  const Scenario buried = parse_scenario(R"({
    "mission_area": {"lo": [0, 0, 0], "hi": [1.0, 0.8, 0.6]},
    "base": {"lo": [0.0, 0.0, 0.0], "hi": [0.2, 0.2, 0.0]},
    "targets": [{"name": "T", "lo": [0.6, 0.4, 0.2], "hi": [0.8, 0.6, 0.4]}],
    "fixed_obstacles": [{"name": "rock", "lo": [0.5, 0.3, 0.1], "hi": [0.9, 0.7, 0.5]}]
  })");
  const CellGraph g = discretize(buried, GridSpec{});
  CHECK(g.cells_of("T").empty());
  CHECK_THROWS_AS(build_reach_avoid(g, "T"), Error);
}

TEST_CASE("grid option names") {
  CHECK(parse_connectivity("6") == Connectivity::face);
  CHECK(parse_connectivity("full") == Connectivity::full);
  CHECK(parse_disturbance_norm("linf") == DisturbanceNorm::chebyshev);
  CHECK(to_string(DisturbanceNorm::manhattan) == "manhattan");
  CHECK_THROWS_AS(parse_connectivity("18"), Error);
}
