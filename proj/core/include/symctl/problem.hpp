#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symctl {

using State = std::uint32_t;
using Input = std::uint32_t;
/// Extended real: finite doubles plus +infinity.
using Cost = double;

inline constexpr Cost kInfinity = std::numeric_limits<Cost>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the fixed-point solvers when the iteration cap is hit or the
/// result fails the post-hoc fixed-point guard.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

struct Successor {
  State to;
  Cost cost;  // g(x, to, u)

  friend bool operator==(const Successor&, const Successor&) = default;
};

/// Successor sets F(x,u) with edge costs, stored as one flat array indexed by
/// the pair id x * |U| + u. Immutable once built, so several problem
/// instances over the same plant can share one copy.
class TransitionSystem {
 public:
  TransitionSystem(std::size_t num_states, std::size_t num_inputs,
                   std::vector<std::size_t> offsets,
                   std::vector<Successor> successors);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_inputs() const { return num_inputs_; }
  std::size_t num_pairs() const { return num_states_ * num_inputs_; }
  std::size_t num_edges() const { return successors_.size(); }

  std::size_t pair_index(State x, Input u) const {
    return static_cast<std::size_t>(x) * num_inputs_ + u;
  }

  std::span<const Successor> successors(State x, Input u) const {
    return successors(pair_index(x, u));
  }
  std::span<const Successor> successors(std::size_t pair) const {
    return {successors_.data() + offsets_[pair],
            offsets_[pair + 1] - offsets_[pair]};
  }
  /// Offset of the pair's first successor in the flat edge array.
  std::size_t edge_offset(std::size_t pair) const { return offsets_[pair]; }

 private:
  std::size_t num_states_;
  std::size_t num_inputs_;
  std::vector<std::size_t> offsets_;
  std::vector<Successor> successors_;
};

/// Accumulates edges in any order and freezes them into a TransitionSystem.
/// Successor order within a pair is insertion order.
class TransitionBuilder {
 public:
  TransitionBuilder(std::size_t num_states, std::size_t num_inputs);

  /// Throws std::out_of_range when `from` or `input` is out of range. An
  /// out-of-range `to` is kept so that validate() can report it.
  void add(State from, Input input, State to, Cost cost);

  std::shared_ptr<const TransitionSystem> build() &&;

 private:
  std::size_t num_states_;
  std::size_t num_inputs_;
  std::vector<std::vector<Successor>> pairs_;
};

/// Finite optimal stopping problem (X, U, F, G, g) on a hyper-graph.
class ProblemInstance {
 public:
  ProblemInstance(std::shared_ptr<const TransitionSystem> transitions,
                  std::vector<Cost> terminal);

  std::size_t num_states() const { return transitions_->num_states(); }
  std::size_t num_inputs() const { return transitions_->num_inputs(); }
  std::size_t num_pairs() const { return transitions_->num_pairs(); }

  std::span<const Successor> successors(State x, Input u) const {
    return transitions_->successors(x, u);
  }
  Cost terminal(State x) const { return terminal_[x]; }
  std::span<const Cost> terminal() const { return terminal_; }

  const TransitionSystem& transitions() const { return *transitions_; }
  const std::shared_ptr<const TransitionSystem>& shared_transitions() const {
    return transitions_;
  }

 private:
  std::shared_ptr<const TransitionSystem> transitions_;
  std::vector<Cost> terminal_;
};

enum class ViolationKind {
  empty_successor_set,
  index_out_of_range,
  duplicate_successor,
  negative_edge_cost,
  invalid_cost,
};

struct Violation {
  ViolationKind kind;
  State state;
  Input input;
  std::string message;
};

struct ValidationOptions {
  bool allow_negative_costs = false;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// No state has a finite terminal cost; every value is +inf.
  bool trivially_infeasible = false;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const ProblemInstance& instance,
                          const ValidationOptions& options = {});

/// Throws Error with the first violation's message unless the instance is
/// valid.
void require_valid(const ProblemInstance& instance,
                   const ValidationOptions& options = {});

/// pred(x,u) = { y | x in F(y,u) }, each set ascending by state index.
class PredIndex {
 public:
  PredIndex(std::size_t num_inputs, std::vector<std::size_t> offsets,
            std::vector<State> preds);

  std::span<const State> pred(State x, Input u) const {
    const std::size_t p = static_cast<std::size_t>(x) * num_inputs_ + u;
    return {preds_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
  }
  std::size_t num_entries() const { return preds_.size(); }

 private:
  std::size_t num_inputs_;
  std::vector<std::size_t> offsets_;
  std::vector<State> preds_;
};

PredIndex build_pred_index(const ProblemInstance& instance);

}  // namespace symctl
