#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "symctl/problem.hpp"
#include "symctl/solver.hpp"

namespace symctl {

/// Memoryless controller with a stopping decision.
///
/// Every state with a finite value is either in the stop set (stopping is no
/// worse than acting) or has an action attaining the minimum of Q(W,x). Among
/// the minimising inputs the extractor prefers those whose successors are
/// resolved at a lower level of the optimal attractor, so closed-loop runs
/// never cycle on zero-cost ties; remaining ties go to the smallest input.
struct Controller {
  std::vector<std::optional<Input>> action;
  std::vector<std::uint8_t> stop;
  /// Attractor level: 0 for stop states, k for states whose action leads
  /// into levels < k. Unset outside the domain.
  std::vector<std::optional<std::uint32_t>> level;

  bool in_domain(State x) const { return stop[x] || action[x].has_value(); }
  bool stops(State x) const { return stop[x] != 0; }
};

/// Throws Error if `w` is not a fixed point of the DP operator.
Controller extract_controller(std::span<const Cost> w,
                              const ProblemInstance& instance);

/// Picks the index of the realised successor in F(x,u).
using Adversary =
    std::function<std::size_t(State x, Input u, std::span<const Successor>)>;

/// Always the first stored successor.
Adversary nominal_adversary();
/// Successor maximising g(x,y,u) + W(y); ties to the first. Copies `w`.
Adversary worst_case_adversary(std::span<const Cost> w);
/// Uniformly random successor from a fixed seed.
Adversary random_adversary(std::uint64_t seed);

struct ClosedLoopTrace {
  std::vector<State> states;
  std::vector<Input> inputs;
  std::size_t stop_time = 0;
  Cost cost = 0;
};

/// Runs the controller from x0 until it reaches a stop state. The trace holds
/// stop_time + 1 states and stop_time inputs. Throws Error if x0 is outside
/// the controller domain or the run exceeds `max_steps` (default |X|).
ClosedLoopTrace simulate_closed_loop(const ProblemInstance& instance,
                                     const Controller& controller, State x0,
                                     const Adversary& adversary,
                                     std::optional<std::size_t> max_steps = {});

/// Exhaustive search over all memoryless policies X -> U u {stop}; returns
/// the least worst-case cost from every state. Independent of the DP
/// solvers. Requires |X| <= 10 and |U| <= 3.
std::vector<Cost> brute_force_optimal_costs(const ProblemInstance& instance);
Cost brute_force_optimal_cost(const ProblemInstance& instance, State x0);

/// Columns: t,state,input,cost_so_far. The final row (the stop state) has an
/// empty input and includes the terminal cost.
void write_trace_csv(std::ostream& out, const ClosedLoopTrace& trace,
                     const ProblemInstance& instance);

}  // namespace symctl
