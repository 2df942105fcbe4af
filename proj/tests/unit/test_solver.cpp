#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "symctl/problem_io.hpp"
#include "symctl/solver.hpp"

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

TEST_CASE("three-state chain") {
  // W(2) = G(2) = 0; W(1) = 1 + 0; W(0) = max(1 + W(1), 1 + W(2)) = 2.
  const ValueFunction expected{2, 1, 0};
  const ProblemInstance p = e1();

  const SolveResult oracle = solve_oracle(p);
  CHECK(oracle.values == expected);
  // Two improving passes and one that confirms the fixed point.
  CHECK(oracle.stats.iterations == 3);

  CHECK(solve_baseline(p).values == expected);
  CHECK(solve_modified(p).values == expected);
  CHECK(apply_dp_operator(expected, p) == expected);
  CHECK(q_value(expected, 0, 0, p) == 2);
  CHECK(q_min(expected, 1, p) == 1);
}

TEST_CASE("dp operator is capped by the stopping cost") {
  const ProblemInstance p = e1();
  const ValueFunction w0(p.terminal().begin(), p.terminal().end());
  const ValueFunction w1 = apply_dp_operator(w0, p);
  CHECK(w1 == ValueFunction{kInfinity, 1, 0});
  CHECK_FALSE(is_fixed_point(w0, p));
  CHECK_FALSE(is_fixed_point(w1, p));
}

TEST_CASE("unreachable targets stay infinite") {
  TransitionBuilder b(3, 1);
  b.add(0, 0, 1, 1);
  b.add(1, 0, 2, 1);
  b.add(2, 0, 0, 1);
  const ProblemInstance p(std::move(b).build(), {kInfinity, kInfinity, kInfinity});
  for (const ValueFunction& w :
       {solve_oracle(p).values, solve_baseline(p).values, solve_modified(p).values})
    CHECK(w == ValueFunction(3, kInfinity));
}

TEST_CASE("stopping beats continuing") {
  TransitionBuilder b(2, 1);
  b.add(0, 0, 1, 5);
  b.add(1, 0, 1, 0);
  const ProblemInstance p(std::move(b).build(), {3, 0});
  CHECK(solve_modified(p).values == ValueFunction{3, 0});
}

TEST_CASE("solvers agree with plain value iteration on random instances") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    const ProblemInstance p = oracle::random_instance(seed);
    const std::vector<Cost> expected = oracle::kleene_fixed_point(p);
    const auto o = solve_oracle(p);
    const auto b = solve_baseline(p);
    const auto m = solve_modified(p);
    CHECK(o.values == expected);
    CHECK(b.values == expected);
    CHECK(m.values == expected);
    CHECK(is_fixed_point(m.values, p));
    CHECK(o.stats.iterations <= p.num_states());
    CHECK(b.stats.iterations <= p.num_states());
    CHECK(m.stats.iterations <= p.num_states());
  }
}

TEST_CASE("updates only ever lower a value") {
  const ProblemInstance p = oracle::random_instance(7);
  SolveOptions opts;
  std::size_t updates = 0;
  opts.on_update = [&](State, Cost before, Cost after) {
    CHECK(after < before);
    ++updates;
  };
  solve_modified(p, opts);
  CHECK(updates > 0);
}

TEST_CASE("fmax reverse index stays consistent with the table") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const ProblemInstance p = oracle::random_instance(seed);
    const auto m = solve_modified(p);
    for (State x = 0; x < p.num_states(); ++x) {
      CAPTURE(x);
      CHECK(m.fmax.fmax_pred(x) == m.fmax.fmax_pred_by_scan(x));
    }
  }
}

TEST_CASE("fmax assign reports changes") {
  const ProblemInstance p = e1();
  FmaxTable t(p);
  // Starts from the first stored successor of every pair.
  CHECK(t.fmax_pred(1) == std::vector<State>{0});
  CHECK(t.fmax_pred(2) == std::vector<State>{1, 2});
  const std::vector<State> one{1};
  const std::vector<State> two{2};
  CHECK_FALSE(t.assign(0, 0, one));
  CHECK(t.assign(0, 0, two));
  CHECK(t.fmax_pred(1).empty());
  CHECK(t.fmax_pred(2) == std::vector<State>{0, 1, 2});
  CHECK(t.fmax_pred(2) == t.fmax_pred_by_scan(2));
}

TEST_CASE("thread count does not change the result") {
  for (std::uint64_t seed : {3u, 11u, 42u}) {
    const ProblemInstance p = oracle::random_instance(seed);
    SolveOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = solve_modified(p, one);
    const auto b = solve_modified(p, four);
    CHECK(a.values == b.values);
    CHECK(a.stats.iterations == b.stats.iterations);
    CHECK(a.stats.cumulative_frontier == b.stats.cumulative_frontier);
    CHECK(solve_oracle(p, one).values == solve_oracle(p, four).values);
  }
}

TEST_CASE("value-ranked argsup stops early on a known instance") {
  const ProblemInstance p = load_problem(SYMCTL_FIXTURE_DIR "/argsup_value_counterexample.json");
  // W(3) = min(4, 3 + W(2)) = 3, W(0) = max(7 + 3, 0 + 8) = 10.
  CHECK(solve_modified(p).values == ValueFunction{10, 8, 0, 3});

  SolveOptions opts;
  opts.argsup = ArgsupMode::value;
  CHECK_THROWS_AS(solve_modified(p, opts), ConvergenceError);
  opts.verify_fixed_point = false;
  CHECK(solve_modified(p, opts).values[0] == 11);
}

TEST_CASE("argsup mode names") {
  CHECK(parse_argsup_mode("cost") == ArgsupMode::cost);
  CHECK(parse_argsup_mode("value") == ArgsupMode::value);
  CHECK(to_string(ArgsupMode::value) == "value");
  CHECK_THROWS_AS(parse_argsup_mode("max"), Error);
}
