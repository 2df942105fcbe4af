#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "symctl/pgrm.hpp"

namespace symctl {

using nlohmann::json;

MissionConfig default_mission_config(const Scenario& scenario) {
  MissionConfig c;
  c.targets = scenario.mission;
  auto has = [&](const char* name) {
    return std::find(c.targets.begin(), c.targets.end(), name) != c.targets.end();
  };
  if (has("A2")) c.disturbances.push_back({"A2", {0, 0, 1}, 2});
  if (has("A1")) c.disturbances.push_back({"A1", {0, 0, 1}, 2});
  return c;
}

namespace {

Vec3 vec_of(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json json_of(Vec3 v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

MissionConfig parse_mission_config(const std::string& json_text, const Scenario& scenario) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed mission config: ") + e.what());
  }
  if (!doc.is_object()) throw Error("mission config must be a JSON object");
  MissionConfig c = default_mission_config(scenario);
  try {
    if (doc.contains("targets")) c.targets = doc["targets"].get<std::vector<std::string>>();
    if (doc.contains("sequence")) c.sequence = doc["sequence"].get<std::vector<std::string>>();
    c.seed = doc.value("seed", c.seed);
    c.step_budget = doc.value("step_budget", c.step_budget);
    c.idle_steps = doc.value("idle_steps", c.idle_steps);
    c.takeoff_altitude = doc.value("takeoff_altitude", c.takeoff_altitude);
    c.planning_steps = doc.value("planning_steps", c.planning_steps);
    c.dwell_steps = doc.value("dwell_steps", c.dwell_steps);
    c.confirmation = doc.value("confirmation", c.confirmation);
    c.model.kappa = doc.value("kappa", c.model.kappa);
    c.model.noise_bound = doc.value("noise_bound", c.model.noise_bound);
    if (doc.contains("disturbances")) {
      c.disturbances.clear();
      for (const json& d : doc["disturbances"])
        c.disturbances.push_back({d.at("after_goal").get<std::string>(), vec_of(d.at("drift")),
                                  d.value("steps", std::size_t{2})});
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad mission config: ") + e.what());
  }
  for (const std::string& t : c.targets)
    if (!scenario.find_target(t)) throw Error("mission config names unknown target " + t);
  if (!(c.model.noise_bound < c.model.kappa))
    throw Error("noise bound must stay below kappa");
  return c;
}

MissionConfig load_mission_config(const std::string& path, const Scenario& scenario) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mission config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mission_config(buffer.str(), scenario);
}

namespace {

class MissionRun {
 public:
  MissionRun(const SolvedSuite& suite, const MissionConfig& config)
      : suite_(suite),
        graph_(*suite.graph),
        config_(config),
        rng_(config.seed),
        noise_(-config.model.noise_bound, config.model.noise_bound) {}

  MissionResult run();

 private:
  // One control step: the vehicle is in `cell` at time t_, observed by the
  // monitor. Returns false once the step budget is spent.
  bool observe(State cell, const std::string& true_goal);
  void emit(EventKind kind, const std::string& goal) {
    result_.events.push_back(make_event(t_ - 1, kind, "U1", goal));
  }

  const SolvedSuite& suite_;
  const CellGraph& graph_;
  const MissionConfig& config_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> noise_;
  std::optional<PlanRecognitionMonitor> monitor_;
  MissionResult result_;
  std::size_t t_ = 0;
};

bool MissionRun::observe(State cell, const std::string& true_goal) {
  if (t_ >= config_.step_budget) return false;
  TraceRow row;
  row.t = t_;
  row.cell = cell;
  row.position = graph_.center(cell);
  row.observation = row.position;
  for (int a = 0; a < 3; ++a) row.observation[a] += noise_(rng_);
  row.true_goal = true_goal;

  auto events = monitor_->step(t_, row.observation);
  row.predicted = monitor_->last_checked_position();
  row.status = monitor_->state().status;
  if (monitor_->state().active_prediction)
    row.predicted_goal = monitor_->state().active_prediction->goal;
  for (TimelineEvent& e : events) {
    if (e.kind == EventKind::trigger) e.truth = true_goal;
    if (e.kind == EventKind::recognized) {
      // Ground truth when the recognized window opened.
      const std::size_t opened = monitor_->last_recognition()->window_start;
      e.truth = opened < result_.trace.size() ? result_.trace[opened].true_goal : true_goal;
      result_.recognitions.push_back(*monitor_->last_recognition());
    }
    if (e.kind == EventKind::sequence_predicted && result_.first_predicted_sequence.empty())
      result_.first_predicted_sequence = e.sequence;
    result_.events.push_back(std::move(e));
  }
  result_.trace.push_back(std::move(row));
  ++t_;
  return true;
}

MissionResult MissionRun::run() {
  const double eta = graph_.spec().cell_size;
  const SolvedGoal& base = suite_.at(kBaseGoal);
  for (const std::string& t : config_.targets) {
    if (t == kBaseGoal) throw Error("the base is not a mission target");
    suite_.at(t);
  }

  const State start = base.representative;
  const auto idx = graph_.index(start);
  const auto climb = static_cast<int>(std::lround(config_.takeoff_altitude / eta));
  std::vector<State> takeoff(config_.idle_steps + 1, start);
  for (int s = 1; s <= climb; ++s) {
    if (idx[2] + s >= graph_.dims()[2]) throw Error("take-off altitude leaves the mission area");
    const State c = graph_.cell(idx[0], idx[1], idx[2] + s);
    if (!graph_.is_free(c)) throw Error("take-off path is blocked");
    takeoff.push_back(c);
  }
  monitor_.emplace(suite_, MonitorConfig{config_.model, config_.confirmation, config_.dwell_steps},
                   config_.targets, takeoff);

  std::vector<std::string> plan = config_.sequence;
  const State hover = takeoff.back();
  const CostMatrix cost = goal_cost_matrix(suite_);
  if (plan.empty()) {
    plan = plan_sequence(hover, config_.targets, suite_, cost);
    plan.pop_back();
  }
  {
    auto a = plan, b = config_.targets;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw Error("vehicle sequence must visit every mission target once");
  }
  plan.push_back(kBaseGoal);
  result_.planned_sequence = plan;

  const std::string& first = plan.front();
  for (std::size_t s = 0; s < takeoff.size(); ++s)
    if (!observe(takeoff[s], first)) return std::move(result_);
  emit(EventKind::takeoff_done, "");
  for (std::size_t s = 0; s < config_.planning_steps; ++s)
    if (!observe(hover, first)) return std::move(result_);

  State cell = hover;
  std::string previous;
  for (std::size_t leg = 0; leg < plan.size(); ++leg) {
    const std::string& goal = plan[leg];
    const SolvedGoal& g = suite_.at(goal);
    if (!g.controller.in_domain(cell))
      throw Error("vehicle left the controller domain of " + goal);

    Vec3 drift;
    std::size_t drift_left = 0;
    for (const Disturbance& d : config_.disturbances)
      if (d.after_goal == previous) {
        drift = d.drift;
        drift_left = d.steps;
      }

    while (!g.controller.stops(cell)) {
      const auto succ = g.instance.successors(cell, *g.controller.action[cell]);
      std::size_t pick = 0;
      if (drift_left > 0) {
        const Vec3 nominal = graph_.center(succ[0].to);
        double best = 0;
        for (std::size_t i = 1; i < succ.size(); ++i) {
          const double v = dot(graph_.center(succ[i].to) - nominal, drift);
          if (v > best + 1e-12) {
            best = v;
            pick = i;
          }
        }
        if (pick != 0) --drift_left;
      }
      cell = succ[pick].to;
      if (!observe(cell, goal)) return std::move(result_);
    }
    emit(EventKind::goal_reached, goal);
    result_.visited.push_back(goal);
    previous = goal;
    if (goal == kBaseGoal) break;
    for (std::size_t s = 0; s < config_.dwell_steps; ++s)
      if (!observe(cell, goal)) return std::move(result_);
  }

  result_.complete = true;
  for (const std::string& t : config_.targets)
    if (std::find(result_.visited.begin(), result_.visited.end(), t) == result_.visited.end())
      result_.complete = false;
  if (result_.complete) emit(EventKind::mission_complete, kBaseGoal);
  return std::move(result_);
}

json event_json(const TimelineEvent& e) {
  json j{{"t", e.time}, {"kind", to_string(e.kind)}, {"source", e.source}};
  if (!e.goal.empty()) j["goal"] = e.goal;
  if (!e.truth.empty()) j["truth"] = e.truth;
  if (!e.sequence.empty()) j["sequence"] = e.sequence;
  if (e.kind == EventKind::recognized) {
    j["low_confidence"] = e.low_confidence;
    j["score"] = e.distance;
  }
  if (e.kind == EventKind::trigger) j["distance"] = e.distance;
  return j;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const char* status_name(MonitorStatus s) {
  return s == MonitorStatus::nominal ? "nominal" : "recognizing";
}

}  // namespace

MissionResult run_mission(const SolvedSuite& suite, const MissionConfig& config) {
  return MissionRun(suite, config).run();
}

void write_timeline_json(std::ostream& out, const MissionResult& result) {
  json events = json::array();
  for (const TimelineEvent& e : result.events) events.push_back(event_json(e));
  json doc{{"complete", result.complete},
           {"planned_sequence", result.planned_sequence},
           {"first_predicted_sequence", result.first_predicted_sequence},
           {"visited", result.visited},
           {"steps", result.trace.size()},
           {"events", events}};
  out << doc.dump(2) << '\n';
}

void write_timeline_csv(std::ostream& out, const MissionResult& result) {
  out << "t,kind,source,goal,truth,sequence,low_confidence,distance\n";
  for (const TimelineEvent& e : result.events) {
    out << e.time << ',' << to_string(e.kind) << ',' << e.source << ',' << e.goal << ','
        << e.truth << ',' << join(e.sequence, ">") << ',' << (e.low_confidence ? 1 : 0) << ','
        << std::setprecision(6) << e.distance << '\n';
  }
}

void write_mission_trace_csv(std::ostream& out, const MissionResult& result) {
  out << "t,x,y,z,ox,oy,oz,px,py,pz,status,true_goal,predicted_goal\n";
  out << std::fixed << std::setprecision(4);
  for (const TraceRow& r : result.trace) {
    out << r.t << ',' << r.position.x << ',' << r.position.y << ',' << r.position.z << ','
        << r.observation.x << ',' << r.observation.y << ',' << r.observation.z << ',';
    if (r.predicted)
      out << r.predicted->x << ',' << r.predicted->y << ',' << r.predicted->z << ',';
    else
      out << ",,,";
    out << status_name(r.status) << ',' << r.true_goal << ',' << r.predicted_goal << '\n';
  }
  out << std::defaultfloat;
}

void write_plot_data(std::ostream& out, const MissionResult& result) {
  json steps = json::array();
  for (const TraceRow& r : result.trace) {
    json s{{"t", r.t},
           {"position", json_of(r.position)},
           {"observation", json_of(r.observation)},
           {"status", status_name(r.status)}};
    if (r.predicted) s["predicted"] = json_of(*r.predicted);
    steps.push_back(std::move(s));
  }
  json recognitions = json::array();
  for (const HypothesisSnapshot& snap : result.recognitions) {
    json hs = json::array();
    for (const Hypothesis& h : snap.hypotheses) {
      json track = json::array();
      for (Vec3 p : h.trajectory) track.push_back(json_of(p));
      hs.push_back({{"goal", h.goal}, {"start", h.start}, {"trajectory", track}});
    }
    recognitions.push_back({{"t", snap.time},
                            {"window_start", snap.window_start},
                            {"chosen", snap.chosen},
                            {"hypotheses", hs}});
  }
  out << json{{"steps", steps}, {"recognitions", recognitions}}.dump() << '\n';
}

}  // namespace symctl
