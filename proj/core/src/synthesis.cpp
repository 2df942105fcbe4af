#include "symctl/synthesis.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <random>

#include "symctl/problem_io.hpp"

namespace symctl {

Controller extract_controller(std::span<const Cost> w,
                              const ProblemInstance& instance) {
  const std::size_t n = instance.num_states();
  const std::size_t m = instance.num_inputs();
  if (w.size() != n || !is_fixed_point(w, instance))
    throw Error("value function is not a fixed point of the DP operator");

  Controller c;
  c.action.assign(n, std::nullopt);
  c.stop.assign(n, 0);
  c.level.assign(n, std::nullopt);

  // Unresolved successor counts of the optimal pairs; 0 marks a pair that is
  // not optimal or not needed.
  std::vector<std::uint32_t> pending(n * m, 0);
  std::vector<std::uint8_t> optimal(n * m, 0);
  std::vector<State> wave;
  for (State x = 0; x < n; ++x) {
    if (!(w[x] < kInfinity)) continue;
    if (instance.terminal(x) <= q_min(w, x, instance)) {
      c.stop[x] = 1;
      c.level[x] = 0;
      wave.push_back(x);
      continue;
    }
    for (Input u = 0; u < m; ++u) {
      if (q_value(w, x, u, instance) != w[x]) continue;
      const std::size_t p = static_cast<std::size_t>(x) * m + u;
      optimal[p] = 1;
      pending[p] = static_cast<std::uint32_t>(instance.successors(x, u).size());
    }
  }

  const PredIndex pred = build_pred_index(instance);
  std::vector<State> next;
  for (std::uint32_t level = 1; !wave.empty(); ++level) {
    next.clear();
    for (State x : wave) {
      for (Input u = 0; u < m; ++u) {
        for (State y : pred.pred(x, u)) {
          const std::size_t p = static_cast<std::size_t>(y) * m + u;
          if (!optimal[p] || c.level[y]) continue;
          if (--pending[p] == 0) next.push_back(y);
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    for (State y : next) {
      for (Input u = 0; u < m; ++u) {
        const std::size_t p = static_cast<std::size_t>(y) * m + u;
        if (optimal[p] && pending[p] == 0) {
          c.action[y] = u;
          break;
        }
      }
      c.level[y] = level;
    }
    wave.swap(next);
  }

  for (State x = 0; x < n; ++x)
    if (w[x] < kInfinity && !c.in_domain(x))
      throw Error("no progressing optimal input at state " + std::to_string(x));
  return c;
}

Adversary nominal_adversary() {
  return [](State, Input, std::span<const Successor>) -> std::size_t {
    return 0;
  };
}

Adversary worst_case_adversary(std::span<const Cost> w) {
  return [values = std::vector<Cost>(w.begin(), w.end())](
             State, Input, std::span<const Successor> succ) -> std::size_t {
    std::size_t best = 0;
    for (std::size_t i = 1; i < succ.size(); ++i)
      if (succ[i].cost + values[succ[i].to] >
          succ[best].cost + values[succ[best].to])
        best = i;
    return best;
  };
}

Adversary random_adversary(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](State, Input, std::span<const Successor> succ) -> std::size_t {
    return std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(*rng);
  };
}

ClosedLoopTrace simulate_closed_loop(const ProblemInstance& instance,
                                     const Controller& controller, State x0,
                                     const Adversary& adversary,
                                     std::optional<std::size_t> max_steps) {
  if (x0 >= instance.num_states() || !controller.in_domain(x0))
    throw Error("initial state " + std::to_string(x0) +
                " is outside the controller domain");
  const std::size_t limit = max_steps.value_or(instance.num_states());
  ClosedLoopTrace trace;
  State x = x0;
  trace.states.push_back(x);
  while (!controller.stops(x)) {
    if (trace.inputs.size() >= limit)
      throw Error("closed loop exceeded " + std::to_string(limit) + " steps");
    const Input u = *controller.action[x];
    const auto succ = instance.successors(x, u);
    const std::size_t pick = adversary(x, u, succ);
    if (pick >= succ.size()) throw Error("adversary picked a non-successor");
    trace.cost += succ[pick].cost;
    x = succ[pick].to;
    trace.inputs.push_back(u);
    trace.states.push_back(x);
    if (!controller.in_domain(x))
      throw Error("closed loop left the controller domain at state " +
                  std::to_string(x));
  }
  trace.stop_time = trace.inputs.size();
  trace.cost += instance.terminal(x);
  return trace;
}

namespace {

// Worst-case cost of one memoryless policy from every state. A policy entry
// equal to |U| means stop. Reaching a cycle is +inf: the adversary can keep
// the plant in it forever, so the stop signal never fires.
class PolicyEvaluator {
 public:
  PolicyEvaluator(const ProblemInstance& instance,
                  const std::vector<Input>& policy)
      : instance_(instance),
        policy_(policy),
        color_(instance.num_states(), 0),
        value_(instance.num_states(), kInfinity) {}

  Cost operator()(State x) {
    if (color_[x] == 2) return value_[x];
    if (color_[x] == 1) return kInfinity;
    color_[x] = 1;
    Cost v;
    if (policy_[x] == instance_.num_inputs()) {
      v = instance_.terminal(x);
    } else {
      v = -kInfinity;
      for (const Successor& s : instance_.successors(x, policy_[x]))
        v = std::max(v, s.cost + (*this)(s.to));
    }
    color_[x] = 2;
    value_[x] = v;
    return v;
  }

 private:
  const ProblemInstance& instance_;
  const std::vector<Input>& policy_;
  std::vector<std::uint8_t> color_;
  std::vector<Cost> value_;
};

}  // namespace

std::vector<Cost> brute_force_optimal_costs(const ProblemInstance& instance) {
  const std::size_t n = instance.num_states();
  const std::size_t m = instance.num_inputs();
  if (n > 10 || m > 3)
    throw Error("brute force limited to |X| <= 10 and |U| <= 3");
  require_valid(instance);

  std::vector<Cost> best(n, kInfinity);
  std::vector<Input> policy(n, 0);
  for (;;) {
    PolicyEvaluator eval(instance, policy);
    for (State x0 = 0; x0 < n; ++x0) best[x0] = std::min(best[x0], eval(x0));
    // Odometer over {0..m}^n, where m encodes "stop".
    std::size_t digit = 0;
    while (digit < n && policy[digit] == m) policy[digit++] = 0;
    if (digit == n) break;
    ++policy[digit];
  }
  return best;
}

Cost brute_force_optimal_cost(const ProblemInstance& instance, State x0) {
  if (x0 >= instance.num_states()) throw Error("state out of range");
  return brute_force_optimal_costs(instance)[x0];
}

void write_trace_csv(std::ostream& out, const ClosedLoopTrace& trace,
                     const ProblemInstance& instance) {
  out << "t,state,input,cost_so_far\n";
  Cost so_far = 0;
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    const State x = trace.states[t];
    out << t << ',' << x << ',';
    if (t < trace.inputs.size()) {
      out << trace.inputs[t] << ',' << format_cost(so_far) << '\n';
      for (const Successor& s : instance.successors(x, trace.inputs[t]))
        if (s.to == trace.states[t + 1]) {
          so_far += s.cost;
          break;
        }
    } else {
      out << ',' << format_cost(so_far + instance.terminal(x)) << '\n';
    }
  }
}

}  // namespace symctl
