#include "symctl/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>

namespace symctl {

std::string to_string(ArgsupMode mode) {
  return mode == ArgsupMode::cost ? "cost" : "value";
}

ArgsupMode parse_argsup_mode(const std::string& text) {
  if (text == "cost") return ArgsupMode::cost;
  if (text == "value") return ArgsupMode::value;
  throw Error("unknown argsup mode '" + text + "' (expected cost|value)");
}

// ---------------------------------------------------------------------------
// FmaxTable

FmaxTable::FmaxTable(const ProblemInstance& instance)
    : num_inputs_(instance.num_inputs()),
      transitions_(instance.shared_transitions()),
      sizes_(instance.num_pairs(), 0),
      slots_(transitions_->num_edges()),
      reverse_(instance.num_states()) {
  // Singleton initialisation with the first stored successor.
  for (std::size_t p = 0; p < sizes_.size(); ++p) {
    const auto succ = transitions_->successors(p);
    if (succ.empty()) continue;
    slots_[transitions_->edge_offset(p)] = succ.front().to;
    sizes_[p] = 1;
    reverse_[succ.front().to].push_back(p);
  }
}

std::span<const State> FmaxTable::argsup(State x, Input u) const {
  const std::size_t p = transitions_->pair_index(x, u);
  return {slots_.data() + transitions_->edge_offset(p), sizes_[p]};
}

bool FmaxTable::assign(State x, Input u, std::span<const State> states) {
  const std::size_t p = transitions_->pair_index(x, u);
  State* slot = slots_.data() + transitions_->edge_offset(p);
  const std::span<State> current(slot, sizes_[p]);
  if (std::equal(current.begin(), current.end(), states.begin(), states.end()))
    return false;
  if (states.empty() || states.size() > transitions_->successors(p).size())
    throw Error("argsup set must be a non-empty subset of F(x,u)");
  for (State y : current) {
    auto& rev = reverse_[y];
    const auto it = std::find(rev.begin(), rev.end(), p);
    *it = rev.back();
    rev.pop_back();
  }
  std::copy(states.begin(), states.end(), slot);
  sizes_[p] = static_cast<std::uint32_t>(states.size());
  for (State y : states) reverse_[y].push_back(p);
  return true;
}

std::vector<State> FmaxTable::fmax_pred(State x) const {
  std::vector<State> out;
  for_each_fmax_pred(x, [&](State y) { out.push_back(y); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<State> FmaxTable::fmax_pred_by_scan(State x) const {
  std::vector<State> out;
  for (std::size_t p = 0; p < sizes_.size(); ++p) {
    const State* first = slots_.data() + transitions_->edge_offset(p);
    if (std::find(first, first + sizes_[p], x) != first + sizes_[p])
      out.push_back(static_cast<State>(p / num_inputs_));
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Operator

Cost q_value(std::span<const Cost> w, State x, Input u,
             const ProblemInstance& instance) {
  Cost sup = -kInfinity;
  for (const Successor& s : instance.successors(x, u))
    sup = std::max(sup, s.cost + w[s.to]);
  return sup;
}

Cost q_min(std::span<const Cost> w, State x, const ProblemInstance& instance) {
  Cost best = kInfinity;
  for (Input u = 0; u < instance.num_inputs(); ++u)
    best = std::min(best, q_value(w, x, u, instance));
  return best;
}

ValueFunction apply_dp_operator(std::span<const Cost> w,
                                const ProblemInstance& instance) {
  ValueFunction next(instance.num_states());
  for (State x = 0; x < next.size(); ++x)
    next[x] = std::min(instance.terminal(x), q_min(w, x, instance));
  return next;
}

bool is_fixed_point(std::span<const Cost> w, const ProblemInstance& instance) {
  for (State x = 0; x < instance.num_states(); ++x)
    if (std::min(instance.terminal(x), q_min(w, x, instance)) != w[x])
      return false;
  return true;
}

namespace {

void check_preconditions(const ProblemInstance& instance,
                         const SolveOptions& options) {
  ValidationOptions v;
  v.allow_negative_costs = options.allow_negative_costs;
  require_valid(instance, v);
}

void finish_stats(SolveStats& stats, std::size_t num_states) {
  stats.frontier_ratio = static_cast<double>(stats.cumulative_frontier) /
                         static_cast<double>(num_states);
}

void verify(const ValueFunction& w, const ProblemInstance& instance,
            const SolveStats& stats, const SolveOptions& options) {
  if (!options.verify_fixed_point || is_fixed_point(w, instance)) return;
  if (stats.hit_iteration_cap)
    throw ConvergenceError("no fixed point within |X| iterations");
  throw ConvergenceError("premature convergence");
}

// Duplicate-free worklist; drained in ascending state order.
class Frontier {
 public:
  explicit Frontier(std::size_t num_states) : member_(num_states, 0) {}

  void insert(State x) {
    if (!member_[x]) {
      member_[x] = 1;
      items_.push_back(x);
    }
  }
  bool empty() const { return items_.empty(); }

  std::vector<State> take_sorted() {
    std::vector<State> out;
    out.swap(items_);
    for (State x : out) member_[x] = 0;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::uint8_t> member_;
  std::vector<State> items_;
};

// Computes sup_y g+W(y) and writes the argsup set for `mode` into `argsup`.
Cost evaluate_pair(std::span<const Successor> succ, std::span<const Cost> w,
                   ArgsupMode mode, std::vector<State>& argsup) {
  argsup.clear();
  Cost sup = -kInfinity;
  Cost best_key = -kInfinity;
  for (const Successor& s : succ) {
    const Cost total = s.cost + w[s.to];
    sup = std::max(sup, total);
    const Cost key = mode == ArgsupMode::cost ? total : w[s.to];
    if (argsup.empty() || key > best_key) {
      best_key = key;
      argsup.assign(1, s.to);
    } else if (key == best_key) {
      argsup.push_back(s.to);
    }
  }
  return sup;
}

Frontier initial_frontier(const ProblemInstance& instance,
                          const PredIndex& pred) {
  Frontier frontier(instance.num_states());
  for (State x = 0; x < instance.num_states(); ++x) {
    if (!(instance.terminal(x) < kInfinity)) continue;
    for (Input u = 0; u < instance.num_inputs(); ++u)
      for (State y : pred.pred(x, u)) frontier.insert(y);
  }
  return frontier;
}

template <typename Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::jthread> workers;
  for (std::size_t begin = 0; begin < count; begin += chunk)
    workers.emplace_back(fn, begin, std::min(count, begin + chunk));
}

// Snapshot evaluation of one pass: per frontier state the best d over all
// inputs, plus (optionally) the argsup set of every pair.
struct SnapshotPass {
  std::vector<Cost> best;
  std::vector<std::size_t> argsup_offsets;  // per (item, input)
  std::vector<std::uint32_t> argsup_sizes;
  std::vector<State> argsup;
};

SnapshotPass evaluate_snapshot(const ProblemInstance& instance,
                               std::span<const State> active,
                               std::span<const Cost> snapshot,
                               const SolveOptions& options, bool want_argsup) {
  const std::size_t m = instance.num_inputs();
  SnapshotPass pass;
  pass.best.assign(active.size(), kInfinity);
  if (want_argsup) {
    pass.argsup_offsets.resize(active.size() * m + 1, 0);
    for (std::size_t k = 0; k < active.size(); ++k)
      for (Input u = 0; u < m; ++u)
        pass.argsup_offsets[k * m + u + 1] =
            pass.argsup_offsets[k * m + u] +
            instance.successors(active[k], u).size();
    pass.argsup.resize(pass.argsup_offsets.back());
    pass.argsup_sizes.resize(active.size() * m);
  }
  parallel_chunks(active.size(), options.threads,
                  [&](std::size_t begin, std::size_t end) {
                    std::vector<State> scratch;
                    for (std::size_t k = begin; k < end; ++k) {
                      const State x = active[k];
                      for (Input u = 0; u < m; ++u) {
                        const Cost d =
                            evaluate_pair(instance.successors(x, u), snapshot,
                                          options.argsup, scratch);
                        pass.best[k] = std::min(pass.best[k], d);
                        if (!want_argsup) continue;
                        std::copy(scratch.begin(), scratch.end(),
                                  pass.argsup.begin() +
                                      static_cast<std::ptrdiff_t>(
                                          pass.argsup_offsets[k * m + u]));
                        pass.argsup_sizes[k * m + u] =
                            static_cast<std::uint32_t>(scratch.size());
                      }
                    }
                  });
  return pass;
}

void lower(ValueFunction& w, State x, Cost d, const SolveOptions& options) {
  if (options.on_update) options.on_update(x, w[x], d);
  w[x] = d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Solvers

SolveResult solve_oracle(const ProblemInstance& instance,
                         const SolveOptions& options) {
  check_preconditions(instance, options);
  const std::size_t n = instance.num_states();
  SolveResult result;
  result.values.assign(instance.terminal().begin(), instance.terminal().end());
  bool converged = false;
  while (result.stats.iterations < n) {
    ValueFunction next = apply_dp_operator(result.values, instance);
    ++result.stats.iterations;
    result.stats.cumulative_frontier += n;
    result.stats.pair_evaluations += n * instance.num_inputs();
    if (next == result.values) {
      converged = true;
      break;
    }
    result.values = std::move(next);
  }
  finish_stats(result.stats, n);
  if (!converged) {
    result.stats.hit_iteration_cap = true;
    throw ConvergenceError("no fixed point within |X| iterations");
  }
  return result;
}

SolveResult solve_baseline(const ProblemInstance& instance,
                           const SolveOptions& options) {
  check_preconditions(instance, options);
  const std::size_t n = instance.num_states();
  const std::size_t m = instance.num_inputs();
  const PredIndex pred = build_pred_index(instance);

  SolveResult result;
  ValueFunction& w = result.values;
  w.assign(instance.terminal().begin(), instance.terminal().end());
  SolveStats& stats = result.stats;

  Frontier upcoming = initial_frontier(instance, pred);
  std::vector<State> active = upcoming.take_sorted();
  auto schedule_preds = [&](State x) {
    for (Input u = 0; u < m; ++u)
      for (State y : pred.pred(x, u)) upcoming.insert(y);
  };

  std::size_t i = 0;
  std::vector<State> scratch;
  while (!active.empty() && i < n) {
    stats.cumulative_frontier += active.size();
    stats.pair_evaluations += active.size() * m;
    if (options.threads == 0) {
      for (State x : active) {
        for (Input u = 0; u < m; ++u) {
          const Cost d = evaluate_pair(instance.successors(x, u), w,
                                       options.argsup, scratch);
          if (d < w[x]) {
            lower(w, x, d, options);
            schedule_preds(x);
          }
        }
      }
    } else {
      const ValueFunction snapshot = w;
      const SnapshotPass pass =
          evaluate_snapshot(instance, active, snapshot, options, false);
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (pass.best[k] < w[active[k]]) {
          lower(w, active[k], pass.best[k], options);
          schedule_preds(active[k]);
        }
      }
    }
    active = upcoming.take_sorted();
    ++i;
  }
  stats.iterations = i;
  stats.hit_iteration_cap = !active.empty();
  finish_stats(stats, n);
  verify(w, instance, stats, options);
  return result;
}

ModifiedSolveResult solve_modified(const ProblemInstance& instance,
                                   const SolveOptions& options) {
  check_preconditions(instance, options);
  const std::size_t n = instance.num_states();
  const std::size_t m = instance.num_inputs();
  const PredIndex pred = build_pred_index(instance);

  ModifiedSolveResult result{
      ValueFunction(instance.terminal().begin(), instance.terminal().end()),
      SolveStats{}, FmaxTable(instance)};
  ValueFunction& w = result.values;
  SolveStats& stats = result.stats;
  FmaxTable& fmax = result.fmax;

  Frontier upcoming = initial_frontier(instance, pred);
  std::vector<State> active = upcoming.take_sorted();
  auto schedule_fmax_preds = [&](State x) {
    fmax.for_each_fmax_pred(x, [&](State y) { upcoming.insert(y); });
  };

  std::size_t i = 0;
  std::vector<State> argsup;
  while (!active.empty() && i < n) {
    stats.cumulative_frontier += active.size();
    stats.pair_evaluations += active.size() * m;
    if (options.threads == 0) {
      for (State x : active) {
        for (Input u = 0; u < m; ++u) {
          const Cost d = evaluate_pair(instance.successors(x, u), w,
                                       options.argsup, argsup);
          fmax.assign(x, u, argsup);
          if (d < w[x]) {
            lower(w, x, d, options);
            schedule_fmax_preds(x);
          }
        }
      }
    } else {
      const ValueFunction snapshot = w;
      const SnapshotPass pass =
          evaluate_snapshot(instance, active, snapshot, options, true);
      for (std::size_t k = 0; k < active.size(); ++k)
        for (Input u = 0; u < m; ++u)
          fmax.assign(active[k], u,
                      std::span<const State>(
                          pass.argsup.data() + pass.argsup_offsets[k * m + u],
                          pass.argsup_sizes[k * m + u]));
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (pass.best[k] < w[active[k]]) {
          lower(w, active[k], pass.best[k], options);
          schedule_fmax_preds(active[k]);
        }
      }
    }
    active = upcoming.take_sorted();
    ++i;
  }
  stats.iterations = i;
  stats.hit_iteration_cap = !active.empty();
  finish_stats(stats, n);
  verify(w, instance, stats, options);
  return result;
}

void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows) {
  out << "problem,algorithm,iterations,cumulative_frontier,frontier_ratio,"
         "pair_evaluations\n";
  char ratio[32];
  for (const StatsRow& row : rows) {
    std::snprintf(ratio, sizeof ratio, "%.4f", row.stats.frontier_ratio);
    out << row.problem << ',' << row.algorithm << ',' << row.stats.iterations
        << ',' << row.stats.cumulative_frontier << ',' << ratio << ','
        << row.stats.pair_evaluations << '\n';
  }
}

}  // namespace symctl
