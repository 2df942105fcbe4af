#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symctl/grid.hpp"
#include "symctl/pgrm.hpp"
#include "symctl/problem_io.hpp"
#include "symctl/scenario.hpp"
#include "symctl/solver.hpp"

namespace symctl::cli {
namespace {

using nlohmann::json;

struct GridFlags {
  double cell_size = GridSpec{}.cell_size;
  std::string connectivity = to_string(GridSpec{}.connectivity);
  int disturbance = GridSpec{}.disturbance_radius;
  std::string norm = to_string(GridSpec{}.disturbance_norm);

  GridSpec spec() const {
    GridSpec g;
    g.cell_size = cell_size;
    g.connectivity = parse_connectivity(connectivity);
    g.disturbance_radius = disturbance;
    g.disturbance_norm = parse_disturbance_norm(norm);
    return g;
  }
};

void add_grid_flags(CLI::App* app, GridFlags& g) {
  app->add_option("--cell-size", g.cell_size, "Cell edge length in metres")
      ->check(CLI::PositiveNumber);
  app->add_option("--connectivity", g.connectivity, "Move set")
      ->check(CLI::IsMember({"face", "full", "6", "26"}));
  app->add_option("--disturbance", g.disturbance, "Lateral disturbance radius in cells")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--disturbance-norm", g.norm, "Distance for the disturbance radius")
      ->check(CLI::IsMember({"manhattan", "chebyshev", "l1", "linf"}));
}

Scenario scenario_from(const std::string& path) {
  return path.empty() ? load_bundled_scenario() : load_scenario(path);
}

json cost_json(Cost c) {
  if (!(c < kInfinity)) return "inf";
  if (c == std::floor(c) && std::fabs(c) < 9.0e15) return static_cast<long long>(c);
  return c;
}

json stats_json(const SolveStats& s) {
  return {{"iterations", s.iterations},
          {"cumulative_frontier", s.cumulative_frontier},
          {"frontier_ratio", s.frontier_ratio},
          {"pair_evaluations", s.pair_evaluations}};
}

// Writes to the named file, or to `fallback` when the name is empty.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error("cannot write " + path);
  write(file);
}

std::string ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", r);
  return buf;
}

struct SolveArgs {
  std::string instance;
  std::string algorithm = "modified";
  std::string argsup = "cost";
  bool check = false;
  unsigned threads = 0;
  std::string format = "json";
  std::string output;
  bool allow_negative = false;
};

int cmd_validate(const std::string& path, bool allow_negative, std::ostream& out,
                 std::ostream& err) {
  const ProblemInstance inst = load_problem(path);
  const ValidationReport report = validate(inst, {allow_negative});
  if (!report.ok()) {
    for (const Violation& v : report.violations) err << "violation: " << v.message << '\n';
    return kValidation;
  }
  std::size_t edges = inst.transitions().num_edges();
  out << "ok: " << inst.num_states() << " states, " << inst.num_inputs() << " inputs, " << edges
      << " edges\n";
  if (report.trivially_infeasible) out << "note: no finite terminal cost; W is +inf everywhere\n";
  return kOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const ProblemInstance inst = load_problem(a.instance);
  const ValidationReport report = validate(inst, {a.allow_negative});
  if (!report.ok()) {
    for (const Violation& v : report.violations) err << "violation: " << v.message << '\n';
    return kValidation;
  }
  SolveOptions opts;
  opts.argsup = parse_argsup_mode(a.argsup);
  opts.threads = a.threads;
  opts.allow_negative_costs = a.allow_negative;

  SolveResult result;
  if (a.algorithm == "oracle") {
    result = solve_oracle(inst, opts);
  } else if (a.algorithm == "baseline") {
    result = solve_baseline(inst, opts);
  } else {
    auto r = solve_modified(inst, opts);
    result = {std::move(r.values), r.stats};
  }

  if (a.check) {
    const ValueFunction expected = solve_oracle(inst, opts).values;
    for (State x = 0; x < expected.size(); ++x)
      if (expected[x] != result.values[x])
        throw ConvergenceError("check failed: W(" + std::to_string(x) + ") = " +
                               format_cost(result.values[x]) + ", oracle " +
                               format_cost(expected[x]));
    err << "check: matches oracle\n";
  }

  emit(a.output, out, [&](std::ostream& o) {
    if (a.format == "csv") {
      o << "state,value\n";
      for (State x = 0; x < result.values.size(); ++x)
        o << x << ',' << format_cost(result.values[x]) << '\n';
      return;
    }
    json values = json::array();
    for (Cost c : result.values) values.push_back(cost_json(c));
    json doc{{"algorithm", a.algorithm},
             {"argsup", a.argsup},
             {"values", values},
             {"stats", stats_json(result.stats)}};
    if (a.check) doc["check"] = "passed";
    o << doc.dump(2) << '\n';
  });
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> instances;
  std::string scenario;
  GridFlags grid;
  std::string argsup = "cost";
  unsigned threads = 0;
  std::string format = "csv";
  std::string output;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  std::vector<NamedProblem> problems;
  if (!a.instances.empty()) {
    for (const std::string& path : a.instances)
      problems.push_back({std::filesystem::path(path).stem().string(), load_problem(path)});
  } else {
    const Scenario sc = scenario_from(a.scenario);
    problems = make_scenario_suite(sc, a.grid.spec());
  }
  SolveOptions opts;
  opts.argsup = parse_argsup_mode(a.argsup);
  opts.threads = a.threads;

  struct Row {
    std::string name;
    SolveStats mod, base;
  };
  std::vector<Row> rows;
  for (const NamedProblem& p : problems) {
    require_valid(p.instance);
    const auto mod = solve_modified(p.instance, opts);
    const auto base = solve_baseline(p.instance, opts);
    if (mod.values != base.values)
      throw ConvergenceError("solvers disagree on " + p.name);
    rows.push_back({p.name, mod.stats, base.stats});
  }

  emit(a.output, out, [&](std::ostream& o) {
    if (a.format == "json") {
      json doc = json::array();
      for (const Row& r : rows)
        doc.push_back({{"problem", r.name},
                       {"modified", stats_json(r.mod)},
                       {"baseline", stats_json(r.base)}});
      o << doc.dump(2) << '\n';
      return;
    }
    o << "problem,i_mod,i_base,ratio_mod,ratio_base\n";
    for (const Row& r : rows)
      o << r.name << ',' << r.mod.iterations << ',' << r.base.iterations << ','
        << ratio(r.mod.frontier_ratio) << ',' << ratio(r.base.frontier_ratio) << '\n';
  });
  return kOk;
}

struct ScenarioArgs {
  std::string scenario;
  GridFlags grid;
  std::string export_goal;
  std::string format = "json";
  std::string output;
};

int cmd_scenario(const ScenarioArgs& a, std::ostream& out, std::ostream&) {
  const Scenario sc = scenario_from(a.scenario);
  const CellGraph graph = discretize(sc, a.grid.spec());
  if (!a.export_goal.empty()) {
    const ProblemInstance inst = build_reach_avoid(graph, a.export_goal);
    emit(a.output, out, [&](std::ostream& o) { o << problem_to_json(inst) << '\n'; });
    return kOk;
  }

  std::size_t counts[5] = {};
  for (State c = 0; c < graph.num_cells(); ++c) ++counts[static_cast<int>(graph.kind(c))];
  std::vector<std::pair<std::string, std::size_t>> goals;
  for (const std::string& t : graph.target_names()) goals.emplace_back(t, graph.cells_of(t).size());
  goals.emplace_back(kBaseGoal, graph.cells_of(kBaseGoal).size());

  emit(a.output, out, [&](std::ostream& o) {
    if (a.format == "csv") {
      o << "goal,cells\n";
      for (const auto& [name, n] : goals) o << name << ',' << n << '\n';
      return;
    }
    json g = json::object();
    for (const auto& [name, n] : goals) g[name] = n;
    json doc{{"dims", graph.dims()},
             {"cells", graph.num_cells()},
             {"inputs", graph.moves().size()},
             {"edges", graph.transitions()->num_edges()},
             {"cell_size", graph.spec().cell_size},
             {"connectivity", to_string(graph.spec().connectivity)},
             {"disturbance_radius", graph.spec().disturbance_radius},
             {"disturbance_norm", to_string(graph.spec().disturbance_norm)},
             {"free_cells", counts[0] + counts[1] + counts[2]},
             {"fire_cells", counts[3]},
             {"obstacle_cells", counts[4]},
             {"goal_cells", g}};
    o << doc.dump(2) << '\n';
  });
  return kOk;
}

struct MissionArgs {
  std::string scenario;
  std::string config;
  GridFlags grid;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string format = "json";
  std::string timeline;
  std::string trace;
  std::string plot_data;
};

int cmd_mission(const MissionArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario sc = scenario_from(a.scenario);
  MissionConfig config =
      a.config.empty() ? default_mission_config(sc) : load_mission_config(a.config, sc);
  if (a.seed) config.seed = *a.seed;

  auto graph = std::make_shared<const CellGraph>(discretize(sc, a.grid.spec()));
  SolveOptions opts;
  opts.threads = a.threads;
  const SolvedSuite suite = solve_suite(sc, graph, opts);
  const MissionResult result = run_mission(suite, config);

  emit(a.timeline, out, [&](std::ostream& o) {
    if (a.format == "csv")
      write_timeline_csv(o, result);
    else
      write_timeline_json(o, result);
  });
  if (!a.trace.empty()) emit(a.trace, out, [&](std::ostream& o) { write_mission_trace_csv(o, result); });
  if (!a.plot_data.empty()) emit(a.plot_data, out, [&](std::ostream& o) { write_plot_data(o, result); });

  auto joined = [](const std::vector<std::string>& v) {
    std::string s;
    for (const std::string& x : v) s += (s.empty() ? "" : ">") + x;
    return s;
  };
  err << "planned sequence: " << joined(result.planned_sequence) << '\n';
  err << "visited: " << joined(result.visited) << '\n';
  if (!result.complete) {
    err << "mission incomplete after " << result.trace.size() << " steps\n";
    return kMissionIncomplete;
  }
  err << "mission complete after " << result.trace.size() << " steps\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal-stopping fixed points, controller synthesis and plan recognition"};
  app.require_subcommand(1);

  std::string validate_path;
  bool validate_negative = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a problem instance");
  validate_cmd->add_option("instance", validate_path, "Problem JSON")->required();
  validate_cmd->add_flag("--allow-negative-costs", validate_negative);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the maximal fixed point W");
  solve_cmd->add_option("instance", solve.instance, "Problem JSON")->required();
  solve_cmd->add_option("--algorithm", solve.algorithm)
      ->check(CLI::IsMember({"oracle", "baseline", "modified"}));
  solve_cmd->add_option("--argsup", solve.argsup)->check(CLI::IsMember({"cost", "value"}));
  solve_cmd->add_flag("--check", solve.check, "Cross-check against the oracle");
  solve_cmd->add_option("--threads", solve.threads, "Snapshot passes on N threads");
  solve_cmd->add_option("--format", solve.format)->check(CLI::IsMember({"json", "csv"}));
  solve_cmd->add_option("-o,--output", solve.output);
  solve_cmd->add_flag("--allow-negative-costs", solve.allow_negative);

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Modified vs baseline frontier statistics");
  compare_cmd->add_option("--instance", compare.instances, "Problem JSON files instead of the scenario suite");
  compare_cmd->add_option("--scenario", compare.scenario);
  add_grid_flags(compare_cmd, compare.grid);
  compare_cmd->add_option("--argsup", compare.argsup)->check(CLI::IsMember({"cost", "value"}));
  compare_cmd->add_option("--threads", compare.threads);
  compare_cmd->add_option("--format", compare.format)->check(CLI::IsMember({"json", "csv"}));
  compare_cmd->add_option("-o,--output", compare.output);

  ScenarioArgs scenario;
  auto* scenario_cmd = app.add_subcommand("scenario", "Discretize a scenario");
  scenario_cmd->add_option("--scenario", scenario.scenario);
  add_grid_flags(scenario_cmd, scenario.grid);
  scenario_cmd->add_option("--export", scenario.export_goal, "Write the goal's reach-avoid instance");
  scenario_cmd->add_option("--format", scenario.format)->check(CLI::IsMember({"json", "csv"}));
  scenario_cmd->add_option("-o,--output", scenario.output);

  MissionArgs mission;
  auto* mission_cmd = app.add_subcommand("mission", "Simulate the mission with the monitor");
  mission_cmd->add_option("--scenario", mission.scenario);
  mission_cmd->add_option("--config", mission.config, "Mission config JSON");
  add_grid_flags(mission_cmd, mission.grid);
  mission_cmd->add_option("--seed", mission.seed);
  mission_cmd->add_option("--threads", mission.threads);
  mission_cmd->add_option("--format", mission.format)->check(CLI::IsMember({"json", "csv"}));
  mission_cmd->add_option("--timeline", mission.timeline, "Timeline output (default stdout)");
  mission_cmd->add_option("--trace", mission.trace, "Per-step trace CSV");
  mission_cmd->add_option("--plot-data", mission.plot_data, "Positions and hypotheses as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kValidation;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(validate_path, validate_negative, out, err);
    if (solve_cmd->parsed()) return cmd_solve(solve, out, err);
    if (compare_cmd->parsed()) return cmd_compare(compare, out, err);
    if (scenario_cmd->parsed()) return cmd_scenario(scenario, out, err);
    if (mission_cmd->parsed()) return cmd_mission(mission, out, err);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace symctl::cli
