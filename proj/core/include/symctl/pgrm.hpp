#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symctl/geometry.hpp"
#include "symctl/grid.hpp"
#include "symctl/scenario.hpp"
#include "symctl/solver.hpp"
#include "symctl/synthesis.hpp"

namespace symctl {

struct ObservationModel {
  /// Half-width of the output box H(x) = x + [-kappa, kappa]^3 and the
  /// Euclidean trigger threshold.
  double kappa = 0.075;
  /// Per-axis bound of the uniform observation noise.
  double noise_bound = 0.035;
};

/// o in H(x): |o_i - x_i| <= kappa on every axis.
bool in_output_set(Vec3 observation, Vec3 state_position, const ObservationModel& model);

struct SolvedGoal {
  std::string name;
  ProblemInstance instance;
  ValueFunction values;
  SolveStats stats;
  Controller controller;
  std::vector<State> cells;
  /// Goal cell nearest the goal box centre; used for goal-to-goal costs.
  State representative;
};

/// Value functions and controllers for every goal of a scenario, in goal
/// order: mission targets, then the base.
struct SolvedSuite {
  std::shared_ptr<const CellGraph> graph;
  std::vector<SolvedGoal> goals;

  /// Index into `goals`, or nullopt.
  std::optional<std::size_t> find(const std::string& name) const;
  const SolvedGoal& at(const std::string& name) const;
};

SolvedSuite solve_suite(const Scenario& scenario, std::shared_ptr<const CellGraph> graph,
                        const SolveOptions& options = {});

struct Hypothesis {
  std::string goal;
  /// Index of the goal in the suite; the recognition tie-break.
  std::size_t goal_index = 0;
  State start = 0;
  /// Nominal closed-loop run of the goal's controller, start cell first.
  std::vector<State> cells;
  std::vector<Vec3> trajectory;

  std::size_t steps() const { return cells.empty() ? 0 : cells.size() - 1; }
  /// Time-aligned position; holds the final cell after the run ends.
  Vec3 position(std::size_t k) const {
    return trajectory[std::min(k, trajectory.size() - 1)];
  }
};

/// Nominal run of one goal's controller from `start`; nullopt when `start`
/// is outside the controller's domain.
std::optional<Hypothesis> simulate_hypothesis(const SolvedSuite& suite, std::size_t goal_index,
                                              State start);

/// One hypothesis per goal in `remaining_goals` plus the base, started from
/// the cell holding `current_position`. Infeasible goals are left out.
std::vector<Hypothesis> generate_hypotheses(Vec3 current_position,
                                            std::span<const std::string> remaining_goals,
                                            const SolvedSuite& suite);

/// As generate_hypotheses, from every free cell whose centre lies in
/// H(observation); ordered by goal index, then start cell.
std::vector<Hypothesis> generate_hypotheses_near(Vec3 observation,
                                                 std::span<const std::string> remaining_goals,
                                                 const SolvedSuite& suite,
                                                 const ObservationModel& model);

struct Recognition {
  std::size_t index = 0;
  /// No hypothesis kept every observation inside its output box.
  bool low_confidence = false;
  /// Cumulative Euclidean distance of the chosen hypothesis.
  double score = 0;
};

/// `observations[k]` is compared with `hypotheses[h].position(k)`. Picks the
/// consistent hypothesis with the least cumulative distance, first in list
/// order on ties; falls back to the least distance overall.
Recognition recognize(std::span<const Vec3> observations,
                      std::span<const Hypothesis> hypotheses, const ObservationModel& model);

/// Goal-to-goal costs: cost(i, j) = W_j at the representative cell of goal i.
struct CostMatrix {
  std::vector<std::string> goals;
  std::vector<std::vector<Cost>> cost;

  std::size_t index_of(const std::string& goal) const;
  Cost operator()(const std::string& from, const std::string& to) const {
    return cost[index_of(from)][index_of(to)];
  }
};

CostMatrix goal_cost_matrix(const SolvedSuite& suite);

/// Cheapest order that starts at `current_goal`, visits every remaining goal
/// and ends at the base. Brute force over permutations, at most 8 goals;
/// ties go to the lexicographically first order of goal indices.
std::vector<std::string> predict_sequence(const std::string& current_goal,
                                          std::span<const std::string> remaining_goals,
                                          const CostMatrix& cost);

/// Same search from an arbitrary cell, whose first leg costs W_j(start).
std::vector<std::string> plan_sequence(State start, std::span<const std::string> goals,
                                       const SolvedSuite& suite, const CostMatrix& cost);

enum class EventKind {
  takeoff_done,
  trigger,
  recognized,
  sequence_predicted,
  goal_reached,
  mission_complete,
  out_of_bounds,
};

std::string to_string(EventKind kind);

struct TimelineEvent {
  std::size_t time = 0;
  EventKind kind = EventKind::trigger;
  /// "U1" for the vehicle, "PGRM" for the monitor.
  std::string source;
  std::string goal;
  /// Goal the vehicle is actually flying to, when known.
  std::string truth;
  std::vector<std::string> sequence;
  bool low_confidence = false;
  double distance = 0;
};

struct HypothesisSnapshot {
  std::size_t time = 0;
  /// Time of the first observation in the recognition window.
  std::size_t window_start = 0;
  std::vector<Hypothesis> hypotheses;
  std::size_t chosen = 0;
};

TimelineEvent make_event(std::size_t time, EventKind kind, std::string source,
                         std::string goal = {});

enum class MonitorStatus { nominal, recognizing };

struct MonitorState {
  MonitorStatus status = MonitorStatus::nominal;
  std::optional<Hypothesis> active_prediction;
  /// Predicted cells; index k belongs to time prediction_start + k.
  std::vector<State> prediction;
  std::size_t prediction_start = 0;
  std::vector<std::string> predicted_sequence;
  std::optional<std::size_t> last_trigger_time;
  std::vector<std::string> remaining_goals;
};

struct MonitorConfig {
  ObservationModel model;
  /// Observations after the trigger before a recognition is emitted.
  std::size_t confirmation = 3;
  /// Steps the vehicle holds at a goal before its next leg.
  std::size_t dwell_steps = 5;
};

/// Sequential plan-and-goal recognition monitor. Starts from a known nominal
/// prediction (the take-off run) and compares each observation with the
/// time-aligned predicted position. A Euclidean deviation above kappa
/// triggers a recognition over hypotheses started near the observation; the
/// winner becomes the new prediction.
class PlanRecognitionMonitor {
 public:
  PlanRecognitionMonitor(const SolvedSuite& suite, MonitorConfig config,
                         std::vector<std::string> remaining_goals,
                         std::vector<State> initial_prediction);

  std::vector<TimelineEvent> step(std::size_t t, Vec3 observation);

  const MonitorState& state() const { return state_; }
  /// Predicted position for time t while nominal.
  std::optional<Vec3> predicted_position(std::size_t t) const;
  /// Position the last step's observation was checked against, if any.
  const std::optional<Vec3>& last_checked_position() const { return last_check_; }
  /// Hypotheses and choice of the latest recognition.
  const std::optional<HypothesisSnapshot>& last_recognition() const { return last_recognition_; }

 private:
  void adopt(std::size_t index, std::vector<TimelineEvent>& events, std::size_t t,
             const Recognition& r);
  void start_recognition(std::size_t t, Vec3 observation);

  const SolvedSuite& suite_;
  MonitorConfig config_;
  CostMatrix cost_;
  MonitorState state_;
  std::vector<Hypothesis> hypotheses_;
  std::vector<Vec3> window_;
  std::size_t recognition_start_ = 0;
  std::optional<Vec3> last_check_;
  std::optional<HypothesisSnapshot> last_recognition_;
  bool goal_reported_ = false;
};

struct Disturbance {
  /// Applies to the leg that leaves this goal.
  std::string after_goal;
  /// Preferred lateral drift direction.
  Vec3 drift;
  /// Number of moves pushed off-nominal; deterministic moves do not count.
  std::size_t steps = 2;
};

struct MissionConfig {
  /// Goals to visit; the default is the scenario's mission.
  std::vector<std::string> targets;
  /// Fixed visiting order for the vehicle; planned by TSP when empty.
  std::vector<std::string> sequence;
  std::uint64_t seed = 1;
  std::size_t step_budget = 1000;
  std::size_t idle_steps = 20;
  double takeoff_altitude = 0.7;
  std::size_t planning_steps = 12;
  std::size_t dwell_steps = 5;
  std::size_t confirmation = 3;
  ObservationModel model;
  std::vector<Disturbance> disturbances;
};

/// Bundled mission: the scenario's targets with offset exits from A2 and A1.
MissionConfig default_mission_config(const Scenario& scenario);
MissionConfig parse_mission_config(const std::string& json_text, const Scenario& scenario);
MissionConfig load_mission_config(const std::string& path, const Scenario& scenario);

struct TraceRow {
  std::size_t t = 0;
  State cell = 0;
  Vec3 position;
  Vec3 observation;
  std::optional<Vec3> predicted;
  MonitorStatus status = MonitorStatus::nominal;
  std::string true_goal;
  std::string predicted_goal;
};

struct MissionResult {
  std::vector<TimelineEvent> events;
  std::vector<TraceRow> trace;
  std::vector<HypothesisSnapshot> recognitions;
  /// The vehicle's own plan after take-off.
  std::vector<std::string> planned_sequence;
  /// The monitor's first sequence prediction.
  std::vector<std::string> first_predicted_sequence;
  std::vector<std::string> visited;
  bool complete = false;
};

/// Simulates the vehicle and the monitor step by step: idle at the base,
/// vertical take-off, a planning hover, then one leg per goal under the
/// goal's controller with a dwell at each goal, and a final leg to the base.
/// Observations are cell centres plus uniform noise from `config.seed`.
MissionResult run_mission(const SolvedSuite& suite, const MissionConfig& config);

void write_timeline_json(std::ostream& out, const MissionResult& result);
void write_timeline_csv(std::ostream& out, const MissionResult& result);
/// Columns: t,x,y,z,ox,oy,oz,px,py,pz,status,true_goal,predicted_goal
void write_mission_trace_csv(std::ostream& out, const MissionResult& result);
/// Per-step positions and every recognition's hypothesis tracks, as JSON.
void write_plot_data(std::ostream& out, const MissionResult& result);

}  // namespace symctl
