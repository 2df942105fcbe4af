#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "symctl/solver.hpp"
#include "symctl/synthesis.hpp"

using namespace symctl;

namespace {

ProblemInstance e1() {
  TransitionBuilder b(3, 1);
  b.add(0, 0, 1, 1);
  b.add(0, 0, 2, 1);
  b.add(1, 0, 2, 1);
  b.add(2, 0, 2, 1);
  return ProblemInstance(std::move(b).build(), {kInfinity, kInfinity, 0});
}

}  // namespace

TEST_CASE("controller on the three-state chain") {
  const ProblemInstance p = e1();
  const ValueFunction w{2, 1, 0};
  const Controller c = extract_controller(w, p);
  CHECK(c.stops(2));
  CHECK(c.action[0] == Input{0});
  CHECK(c.action[1] == Input{0});
  CHECK(c.level[2] == 0u);
  CHECK(c.level[1] == 1u);
  CHECK(c.level[0] == 2u);

  const ClosedLoopTrace worst = simulate_closed_loop(p, c, 0, worst_case_adversary(w));
  CHECK(worst.states == std::vector<State>{0, 1, 2});
  CHECK(worst.cost == 2);

  const ClosedLoopTrace nominal = simulate_closed_loop(p, c, 0, nominal_adversary());
  CHECK(nominal.states == std::vector<State>{0, 1, 2});

  std::ostringstream csv;
  write_trace_csv(csv, worst, p);
  CHECK(csv.str() == "t,state,input,cost_so_far\n0,0,0,0\n1,1,0,1\n2,2,,2\n");
}

TEST_CASE("extraction rejects a non fixed point") {
  const ProblemInstance p = e1();
  CHECK_THROWS_AS(extract_controller(ValueFunction{5, 1, 0}, p), Error);
}

TEST_CASE("states with infinite value are outside the domain") {
  TransitionBuilder b(2, 1);
  b.add(0, 0, 0, 1);
  b.add(1, 0, 1, 0);
  const ProblemInstance p(std::move(b).build(), {kInfinity, 0});
  const auto w = solve_modified(p).values;
  const Controller c = extract_controller(w, p);
  CHECK_FALSE(c.in_domain(0));
  CHECK_THROWS_AS(simulate_closed_loop(p, c, 0, nominal_adversary()), Error);
}

TEST_CASE("zero-cost ties do not make the closed loop cycle") {
  // 0 and 1 point at each other for free; only 1 also has a path to 2.
  TransitionBuilder b(3, 2);
  b.add(0, 0, 1, 0);
  b.add(0, 1, 0, 0);
  b.add(1, 0, 0, 0);
  b.add(1, 1, 2, 0);
  b.add(2, 0, 2, 0);
  b.add(2, 1, 2, 0);
  const ProblemInstance p(std::move(b).build(), {kInfinity, kInfinity, 0});
  const auto w = solve_modified(p).values;
  CHECK(w == ValueFunction{0, 0, 0});
  const Controller c = extract_controller(w, p);
  const auto t = simulate_closed_loop(p, c, 0, nominal_adversary());
  CHECK(t.states == std::vector<State>{0, 1, 2});
}

TEST_CASE("policy enumeration agrees with the value function") {
  oracle::RandomShape tiny;
  tiny.max_states = 7;
  tiny.max_inputs = 2;
  tiny.terminal_density = 0.4;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    CAPTURE(seed);
    const ProblemInstance p = oracle::random_instance(seed, tiny);
    const auto w = solve_modified(p).values;
    const auto independent = oracle::enumerate_policies(p);
    CHECK(w == independent);
    CHECK(brute_force_optimal_costs(p) == independent);

    const Controller c = extract_controller(w, p);
    for (State x = 0; x < p.num_states(); ++x) {
      if (!(w[x] < kInfinity)) {
        CHECK_FALSE(c.in_domain(x));
        continue;
      }
      CHECK(simulate_closed_loop(p, c, x, worst_case_adversary(w)).cost == w[x]);
      for (std::uint64_t r = 0; r < 3; ++r)
        CHECK(simulate_closed_loop(p, c, x, random_adversary(r)).cost <= w[x]);
    }
  }
}

TEST_CASE("random adversary is reproducible") {
  const ProblemInstance p = oracle::random_instance(5);
  const auto w = solve_modified(p).values;
  const Controller c = extract_controller(w, p);
  for (State x = 0; x < p.num_states(); ++x) {
    if (!c.in_domain(x)) continue;
    const auto a = simulate_closed_loop(p, c, x, random_adversary(9));
    const auto b = simulate_closed_loop(p, c, x, random_adversary(9));
    CHECK(a.states == b.states);
  }
}
