#include "symctl/pgrm.hpp"

#include <algorithm>
#include <numeric>

namespace symctl {

bool in_output_set(Vec3 observation, Vec3 state_position, const ObservationModel& model) {
  return max_norm(observation - state_position) <= model.kappa;
}

std::optional<std::size_t> SolvedSuite::find(const std::string& name) const {
  for (std::size_t i = 0; i < goals.size(); ++i)
    if (goals[i].name == name) return i;
  return std::nullopt;
}

const SolvedGoal& SolvedSuite::at(const std::string& name) const {
  const auto i = find(name);
  if (!i) throw Error("goal " + name + " is not in the solved suite");
  return goals[*i];
}

SolvedSuite solve_suite(const Scenario& scenario, std::shared_ptr<const CellGraph> graph,
                        const SolveOptions& options) {
  SolvedSuite suite;
  suite.graph = graph;
  for (NamedProblem& p : make_scenario_suite(scenario, *graph)) {
    auto solved = solve_modified(p.instance, options);
    Controller controller = extract_controller(solved.values, p.instance);
    const Box box = p.name == kBaseGoal ? scenario.base : scenario.find_target(p.name)->box;
    auto cells = graph->cells_of(p.name);
    State rep = cells.front();
    for (State c : cells)
      if (distance(graph->center(c), box.center()) <
          distance(graph->center(rep), box.center()) - 1e-12)
        rep = c;
    suite.goals.push_back({p.name, std::move(p.instance), std::move(solved.values),
                           solved.stats, std::move(controller), std::move(cells), rep});
  }
  return suite;
}

std::optional<Hypothesis> simulate_hypothesis(const SolvedSuite& suite, std::size_t goal_index,
                                              State start) {
  const SolvedGoal& g = suite.goals.at(goal_index);
  if (!g.controller.in_domain(start)) return std::nullopt;
  const auto run = simulate_closed_loop(g.instance, g.controller, start, nominal_adversary());
  Hypothesis h;
  h.goal = g.name;
  h.goal_index = goal_index;
  h.start = start;
  h.cells = run.states;
  for (State c : h.cells) h.trajectory.push_back(suite.graph->center(c));
  return h;
}

namespace {

std::vector<std::size_t> hypothesis_goals(std::span<const std::string> remaining,
                                          const SolvedSuite& suite) {
  std::vector<std::size_t> out;
  for (const std::string& name : remaining) {
    const auto i = suite.find(name);
    if (!i) throw Error("goal " + name + " is not in the solved suite");
    out.push_back(*i);
  }
  if (const auto base = suite.find(kBaseGoal)) out.push_back(*base);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Hypothesis> generate_hypotheses(Vec3 current_position,
                                            std::span<const std::string> remaining_goals,
                                            const SolvedSuite& suite) {
  const auto cell = suite.graph->locate(current_position);
  if (!cell) throw Error("position outside the mission area");
  std::vector<Hypothesis> out;
  for (std::size_t g : hypothesis_goals(remaining_goals, suite))
    if (auto h = simulate_hypothesis(suite, g, *cell)) out.push_back(std::move(*h));
  return out;
}

std::vector<Hypothesis> generate_hypotheses_near(Vec3 observation,
                                                 std::span<const std::string> remaining_goals,
                                                 const SolvedSuite& suite,
                                                 const ObservationModel& model) {
  const CellGraph& graph = *suite.graph;
  const double eta = graph.spec().cell_size;
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor(
                            (observation[a] - model.kappa - graph.bounds().lo[a]) / eta)));
    hi[a] = std::min(graph.dims()[a] - 1,
                     static_cast<int>(std::floor(
                         (observation[a] + model.kappa - graph.bounds().lo[a]) / eta)));
  }
  std::vector<State> starts;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const State c = graph.cell(i, j, k);
        if (graph.is_free(c) && in_output_set(observation, graph.center(c), model))
          starts.push_back(c);
      }

  std::vector<Hypothesis> out;
  for (std::size_t g : hypothesis_goals(remaining_goals, suite))
    for (State s : starts)
      if (auto h = simulate_hypothesis(suite, g, s)) out.push_back(std::move(*h));
  return out;
}

Recognition recognize(std::span<const Vec3> observations,
                      std::span<const Hypothesis> hypotheses, const ObservationModel& model) {
  if (hypotheses.empty()) throw Error("no hypotheses to recognize from");
  if (observations.empty()) throw Error("no observations to recognize from");
  std::optional<Recognition> best_consistent;
  Recognition best_any{0, true, kInfinity};
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    double score = 0;
    bool consistent = true;
    for (std::size_t k = 0; k < observations.size(); ++k) {
      const Vec3 p = hypotheses[h].position(k);
      score += distance(observations[k], p);
      consistent = consistent && in_output_set(observations[k], p, model);
    }
    if (consistent && (!best_consistent || score < best_consistent->score))
      best_consistent = Recognition{h, false, score};
    if (score < best_any.score) best_any = Recognition{h, true, score};
  }
  return best_consistent ? *best_consistent : best_any;
}

std::size_t CostMatrix::index_of(const std::string& goal) const {
  const auto it = std::find(goals.begin(), goals.end(), goal);
  if (it == goals.end()) throw Error("missing cost entry for goal " + goal);
  return static_cast<std::size_t>(it - goals.begin());
}

CostMatrix goal_cost_matrix(const SolvedSuite& suite) {
  CostMatrix m;
  for (const SolvedGoal& g : suite.goals) m.goals.push_back(g.name);
  m.cost.assign(suite.goals.size(), std::vector<Cost>(suite.goals.size(), 0));
  for (std::size_t i = 0; i < suite.goals.size(); ++i)
    for (std::size_t j = 0; j < suite.goals.size(); ++j)
      m.cost[i][j] = suite.goals[j].values[suite.goals[i].representative];
  return m;
}

namespace {

// Cheapest permutation of `goals` (matrix indices) given the cost of the
// first leg to each goal; ends at `base`.
std::vector<std::size_t> best_order(std::vector<std::size_t> goals,
                                    const std::vector<Cost>& first_leg,
                                    const CostMatrix& cost, std::size_t base) {
  if (goals.size() > 8) throw Error("sequence prediction limited to 8 goals");
  std::sort(goals.begin(), goals.end());
  std::vector<std::size_t> best;
  Cost best_cost = kInfinity;
  do {
    Cost total = 0;
    if (goals.empty()) {
      total = first_leg[base];
    } else {
      total = first_leg[goals.front()];
      for (std::size_t i = 1; i < goals.size(); ++i)
        total += cost.cost[goals[i - 1]][goals[i]];
      total += cost.cost[goals.back()][base];
    }
    if (total < best_cost) {
      best_cost = total;
      best = goals;
    }
  } while (std::next_permutation(goals.begin(), goals.end()));
  if (!(best_cost < kInfinity)) throw Error("no goal sequence with finite cost");
  return best;
}

std::vector<std::size_t> goal_indices(std::span<const std::string> goals,
                                      const CostMatrix& cost, std::size_t exclude_a,
                                      std::size_t exclude_b) {
  std::vector<std::size_t> out;
  for (const std::string& g : goals) {
    const std::size_t i = cost.index_of(g);
    if (i != exclude_a && i != exclude_b &&
        std::find(out.begin(), out.end(), i) == out.end())
      out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<std::string> predict_sequence(const std::string& current_goal,
                                          std::span<const std::string> remaining_goals,
                                          const CostMatrix& cost) {
  const std::size_t base = cost.index_of(kBaseGoal);
  const std::size_t current = cost.index_of(current_goal);
  if (current == base) return {kBaseGoal};
  const auto order = best_order(goal_indices(remaining_goals, cost, current, base),
                                cost.cost[current], cost, base);
  std::vector<std::string> out{current_goal};
  for (std::size_t i : order) out.push_back(cost.goals[i]);
  out.push_back(kBaseGoal);
  return out;
}

std::vector<std::string> plan_sequence(State start, std::span<const std::string> goals,
                                       const SolvedSuite& suite, const CostMatrix& cost) {
  const std::size_t base = cost.index_of(kBaseGoal);
  std::vector<Cost> first_leg(cost.goals.size(), kInfinity);
  for (std::size_t i = 0; i < cost.goals.size(); ++i)
    first_leg[i] = suite.at(cost.goals[i]).values[start];
  const auto order =
      best_order(goal_indices(goals, cost, base, base), first_leg, cost, base);
  std::vector<std::string> out;
  for (std::size_t i : order) out.push_back(cost.goals[i]);
  out.push_back(kBaseGoal);
  return out;
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::takeoff_done: return "takeoff_done";
    case EventKind::trigger: return "trigger";
    case EventKind::recognized: return "recognized";
    case EventKind::sequence_predicted: return "sequence_predicted";
    case EventKind::goal_reached: return "goal_reached";
    case EventKind::mission_complete: return "mission_complete";
    case EventKind::out_of_bounds: return "out_of_bounds";
  }
  return "unknown";
}

TimelineEvent make_event(std::size_t time, EventKind kind, std::string source,
                         std::string goal) {
  TimelineEvent e;
  e.time = time;
  e.kind = kind;
  e.source = std::move(source);
  e.goal = std::move(goal);
  return e;
}

PlanRecognitionMonitor::PlanRecognitionMonitor(const SolvedSuite& suite, MonitorConfig config,
                                               std::vector<std::string> remaining_goals,
                                               std::vector<State> initial_prediction)
    : suite_(suite), config_(config), cost_(goal_cost_matrix(suite)) {
  if (!(config_.model.kappa > 0)) throw Error("kappa must be positive");
  if (initial_prediction.empty()) throw Error("monitor needs an initial prediction");
  state_.remaining_goals = std::move(remaining_goals);
  state_.prediction = std::move(initial_prediction);
}

std::optional<Vec3> PlanRecognitionMonitor::predicted_position(std::size_t t) const {
  if (state_.status != MonitorStatus::nominal || state_.prediction.empty()) return std::nullopt;
  const std::size_t k = t < state_.prediction_start ? 0 : t - state_.prediction_start;
  return suite_.graph->center(state_.prediction[std::min(k, state_.prediction.size() - 1)]);
}

void PlanRecognitionMonitor::start_recognition(std::size_t t, Vec3 observation) {
  state_.status = MonitorStatus::recognizing;
  state_.last_trigger_time = t;
  recognition_start_ = t;
  window_.assign(1, observation);
  hypotheses_ = generate_hypotheses_near(observation, state_.remaining_goals, suite_,
                                         config_.model);
}

void PlanRecognitionMonitor::adopt(std::size_t index, std::vector<TimelineEvent>& events,
                                   std::size_t t, const Recognition& r) {
  const Hypothesis& h = hypotheses_[index];
  state_.status = MonitorStatus::nominal;
  state_.active_prediction = h;
  state_.prediction = h.cells;
  state_.prediction_start = recognition_start_;
  goal_reported_ = false;
  last_recognition_ = HypothesisSnapshot{t, recognition_start_, hypotheses_, index};

  TimelineEvent rec = make_event(t, EventKind::recognized, "PGRM", h.goal);
  rec.low_confidence = r.low_confidence;
  rec.distance = r.score;
  events.push_back(rec);

  state_.predicted_sequence = predict_sequence(h.goal, state_.remaining_goals, cost_);
  TimelineEvent seq = make_event(t, EventKind::sequence_predicted, "PGRM", h.goal);
  seq.sequence = state_.predicted_sequence;
  events.push_back(seq);
}

std::vector<TimelineEvent> PlanRecognitionMonitor::step(std::size_t t, Vec3 observation) {
  std::vector<TimelineEvent> events;
  last_check_.reset();
  if (!suite_.graph->bounds().contains(observation, 0))
    events.push_back(make_event(t, EventKind::out_of_bounds, "PGRM"));

  if (state_.status == MonitorStatus::recognizing) {
    if (hypotheses_.empty()) {
      start_recognition(t, observation);
      return events;
    }
    window_.push_back(observation);
    if (window_.size() <= config_.confirmation) return events;
    const Recognition r = recognize(window_, hypotheses_, config_.model);
    adopt(r.index, events, t, r);
  }

  const Vec3 p = *predicted_position(t);
  const double d = distance(observation, p);
  last_check_ = p;
  if (d > config_.model.kappa) {
    TimelineEvent trig = make_event(t, EventKind::trigger, "PGRM");
    if (state_.active_prediction) trig.goal = state_.active_prediction->goal;
    trig.distance = d;
    events.push_back(trig);
    start_recognition(t, observation);
    return events;
  }

  if (!state_.active_prediction || goal_reported_) return events;
  const std::size_t arrival = state_.prediction_start + state_.prediction.size() - 1;
  if (t < arrival) return events;

  const std::string reached = state_.active_prediction->goal;
  goal_reported_ = true;
  events.push_back(make_event(t, EventKind::goal_reached, "PGRM", reached));
  std::erase(state_.remaining_goals, reached);
  auto& seq = state_.predicted_sequence;
  if (!seq.empty() && seq.front() == reached) seq.erase(seq.begin());
  if (seq.empty() || reached == kBaseGoal) return events;

  // Next leg: hold at the goal for the dwell, then fly the next goal's run.
  const State end = state_.prediction.back();
  auto next = simulate_hypothesis(suite_, *suite_.find(seq.front()), end);
  if (!next) return events;
  std::vector<State> cells(config_.dwell_steps + 1, end);
  cells.insert(cells.end(), next->cells.begin() + 1, next->cells.end());
  state_.prediction = std::move(cells);
  state_.prediction_start = arrival;
  state_.active_prediction = std::move(*next);
  goal_reported_ = false;
  return events;
}

}  // namespace symctl
