#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "symctl/problem.hpp"

namespace symctl {

/// W : X -> R u {+inf}, indexed by state.
using ValueFunction = std::vector<Cost>;

struct SolveStats {
  /// Passes of the main loop (the counter `i` at termination).
  std::size_t iterations = 0;
  /// Sum over passes of the active frontier size.
  std::size_t cumulative_frontier = 0;
  /// cumulative_frontier / |X|.
  double frontier_ratio = 0.0;
  /// Number of (x,u) suprema evaluated.
  std::size_t pair_evaluations = 0;
  /// The loop stopped on the i < |X| guard with a non-empty frontier.
  bool hit_iteration_cap = false;
};

/// Which quantity ranks successors when refreshing F_max(x,u).
enum class ArgsupMode {
  /// argsup of g(x,y,u) + W(y): the successors realising the supremum.
  cost,
  /// argsup of W(y) alone.
  value,
};

std::string to_string(ArgsupMode mode);
ArgsupMode parse_argsup_mode(const std::string& text);

struct SolveOptions {
  ArgsupMode argsup = ArgsupMode::cost;
  /// 0 runs the sequential solvers, which read W live within a pass. N >= 1
  /// evaluates each pass against a snapshot of W taken at the start of the
  /// pass on N threads; results do not depend on N.
  unsigned threads = 0;
  bool allow_negative_costs = false;
  /// Check P(W) == W before returning and throw ConvergenceError otherwise.
  bool verify_fixed_point = true;
  /// Called whenever a frontier solver lowers W(x).
  std::function<void(State, Cost before, Cost after)> on_update;
};

/// F_max(x,u) per pair together with the reverse multimap
/// y -> { (x,u) | y in F_max(x,u) }, kept in sync on every change.
class FmaxTable {
 public:
  explicit FmaxTable(const ProblemInstance& instance);

  std::span<const State> argsup(State x, Input u) const;
  /// Replaces F_max(x,u); returns true if the set changed.
  bool assign(State x, Input u, std::span<const State> states);

  /// { y | exists u~ with x in F_max(y,u~) }, ascending.
  std::vector<State> fmax_pred(State x) const;
  template <typename Fn>
  void for_each_fmax_pred(State x, Fn&& fn) const {
    for (std::size_t pair : reverse_[x]) fn(static_cast<State>(pair / num_inputs_));
  }

  /// Recomputes fmax_pred by scanning the whole table; for consistency checks.
  std::vector<State> fmax_pred_by_scan(State x) const;

 private:
  std::size_t num_inputs_;
  std::shared_ptr<const TransitionSystem> transitions_;
  std::vector<std::uint32_t> sizes_;  // slots live at the pair's edge offset
  std::vector<State> slots_;
  std::vector<std::vector<std::size_t>> reverse_;
};

struct SolveResult {
  ValueFunction values;
  SolveStats stats;
};

struct ModifiedSolveResult {
  ValueFunction values;
  SolveStats stats;
  FmaxTable fmax;
};

/// sup_{y in F(x,u)} g(x,y,u) + W(y).
Cost q_value(std::span<const Cost> w, State x, Input u,
             const ProblemInstance& instance);
/// Q(W,x) = inf_u q_value(W,x,u).
Cost q_min(std::span<const Cost> w, State x, const ProblemInstance& instance);

/// P(W)(x) = min{ G(x), Q(W,x) }, evaluated synchronously from `w`.
ValueFunction apply_dp_operator(std::span<const Cost> w,
                                const ProblemInstance& instance);

bool is_fixed_point(std::span<const Cost> w, const ProblemInstance& instance);

/// Synchronous value iteration from W = G until P(W) == W; at most |X|
/// passes, each counted in stats.iterations.
SolveResult solve_oracle(const ProblemInstance& instance,
                         const SolveOptions& options = {});

/// Frontier Bellman-Ford that schedules every predecessor of an improved
/// state.
SolveResult solve_baseline(const ProblemInstance& instance,
                           const SolveOptions& options = {});

/// Frontier Bellman-Ford that schedules only the predecessors whose F_max
/// set contains the improved state.
ModifiedSolveResult solve_modified(const ProblemInstance& instance,
                                   const SolveOptions& options = {});

struct StatsRow {
  std::string problem;
  std::string algorithm;
  SolveStats stats;
};

/// Columns: problem,algorithm,iterations,cumulative_frontier,frontier_ratio,pair_evaluations
void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows);

}  // namespace symctl
