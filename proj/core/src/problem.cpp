#include "symctl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace symctl {

TransitionSystem::TransitionSystem(std::size_t num_states,
                                   std::size_t num_inputs,
                                   std::vector<std::size_t> offsets,
                                   std::vector<Successor> successors)
    : num_states_(num_states),
      num_inputs_(num_inputs),
      offsets_(std::move(offsets)),
      successors_(std::move(successors)) {
  if (num_states_ == 0 || num_inputs_ == 0)
    throw Error("state and input spaces must be non-empty");
  if (offsets_.size() != num_pairs() + 1 || offsets_.front() != 0 ||
      offsets_.back() != successors_.size() ||
      !std::is_sorted(offsets_.begin(), offsets_.end()))
    throw Error("malformed transition offsets");
}

TransitionBuilder::TransitionBuilder(std::size_t num_states,
                                     std::size_t num_inputs)
    : num_states_(num_states),
      num_inputs_(num_inputs),
      pairs_(num_states * num_inputs) {}

void TransitionBuilder::add(State from, Input input, State to, Cost cost) {
  if (from >= num_states_) throw std::out_of_range("edge source out of range");
  if (input >= num_inputs_) throw std::out_of_range("edge input out of range");
  pairs_[static_cast<std::size_t>(from) * num_inputs_ + input].push_back(
      {to, cost});
}

std::shared_ptr<const TransitionSystem> TransitionBuilder::build() && {
  std::vector<std::size_t> offsets;
  offsets.reserve(pairs_.size() + 1);
  offsets.push_back(0);
  for (const auto& p : pairs_) offsets.push_back(offsets.back() + p.size());
  std::vector<Successor> flat;
  flat.reserve(offsets.back());
  for (auto& p : pairs_) {
    flat.insert(flat.end(), p.begin(), p.end());
    p = {};
  }
  return std::make_shared<const TransitionSystem>(
      num_states_, num_inputs_, std::move(offsets), std::move(flat));
}

ProblemInstance::ProblemInstance(
    std::shared_ptr<const TransitionSystem> transitions,
    std::vector<Cost> terminal)
    : transitions_(std::move(transitions)), terminal_(std::move(terminal)) {
  if (!transitions_) throw Error("missing transition system");
  if (terminal_.size() != transitions_->num_states())
    throw Error("terminal cost vector does not match the state count");
}

namespace {

std::string pair_name(State x, Input u) {
  std::ostringstream os;
  os << '(' << x << ',' << u << ')';
  return os.str();
}

// Extended reals exclude NaN and -inf.
bool is_extended_real(Cost c) { return !std::isnan(c) && c != -kInfinity; }

}  // namespace

ValidationReport validate(const ProblemInstance& instance,
                          const ValidationOptions& options) {
  ValidationReport report;
  const std::size_t n = instance.num_states();
  std::vector<State> seen;
  for (State x = 0; x < n; ++x) {
    for (Input u = 0; u < instance.num_inputs(); ++u) {
      const auto succ = instance.successors(x, u);
      if (succ.empty()) {
        report.violations.push_back({ViolationKind::empty_successor_set, x, u,
                                     "empty successor set at " +
                                         pair_name(x, u)});
        continue;
      }
      seen.clear();
      for (const Successor& s : succ) {
        if (s.to >= n) {
          report.violations.push_back(
              {ViolationKind::index_out_of_range, x, u,
               "index out of range at " + pair_name(x, u) + ": successor " +
                   std::to_string(s.to) + " >= " + std::to_string(n)});
          continue;
        }
        if (std::find(seen.begin(), seen.end(), s.to) != seen.end()) {
          report.violations.push_back(
              {ViolationKind::duplicate_successor, x, u,
               "duplicate successor " + std::to_string(s.to) + " at " +
                   pair_name(x, u)});
        }
        seen.push_back(s.to);
        if (!is_extended_real(s.cost)) {
          report.violations.push_back(
              {ViolationKind::invalid_cost, x, u,
               "edge cost is not in R u {+inf} at " + pair_name(x, u)});
        } else if (s.cost < 0 && !options.allow_negative_costs) {
          report.violations.push_back(
              {ViolationKind::negative_edge_cost, x, u,
               "negative edge cost at " + pair_name(x, u) + " -> " +
                   std::to_string(s.to)});
        }
      }
    }
    if (!is_extended_real(instance.terminal(x))) {
      report.violations.push_back({ViolationKind::invalid_cost, x, 0,
                                   "terminal cost is not in R u {+inf} at " +
                                       std::to_string(x)});
    }
  }
  report.trivially_infeasible =
      std::none_of(instance.terminal().begin(), instance.terminal().end(),
                   [](Cost c) { return c < kInfinity; });
  return report;
}

void require_valid(const ProblemInstance& instance,
                   const ValidationOptions& options) {
  const auto report = validate(instance, options);
  if (!report.ok()) throw Error(report.violations.front().message);
}

PredIndex::PredIndex(std::size_t num_inputs, std::vector<std::size_t> offsets,
                     std::vector<State> preds)
    : num_inputs_(num_inputs),
      offsets_(std::move(offsets)),
      preds_(std::move(preds)) {}

PredIndex build_pred_index(const ProblemInstance& instance) {
  const std::size_t n = instance.num_states();
  const std::size_t m = instance.num_inputs();
  // Counting sort: visiting y in ascending order keeps each bucket sorted.
  std::vector<std::size_t> counts(n * m + 1, 0);
  for (State y = 0; y < n; ++y)
    for (Input u = 0; u < m; ++u)
      for (const Successor& s : instance.successors(y, u))
        if (s.to < n) ++counts[static_cast<std::size_t>(s.to) * m + u + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  std::vector<State> preds(counts.back());
  for (State y = 0; y < n; ++y)
    for (Input u = 0; u < m; ++u)
      for (const Successor& s : instance.successors(y, u))
        if (s.to < n) preds[cursor[static_cast<std::size_t>(s.to) * m + u]++] = y;
  return PredIndex(m, std::move(counts), std::move(preds));
}

}  // namespace symctl
