#include "symctl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace symctl {

std::string to_string(Connectivity c) {
  return c == Connectivity::face ? "face" : "full";
}

Connectivity parse_connectivity(const std::string& text) {
  if (text == "face" || text == "6") return Connectivity::face;
  if (text == "full" || text == "26") return Connectivity::full;
  throw Error("unknown connectivity '" + text + "' (expected face or full)");
}

std::string to_string(DisturbanceNorm n) {
  return n == DisturbanceNorm::manhattan ? "manhattan" : "chebyshev";
}

DisturbanceNorm parse_disturbance_norm(const std::string& text) {
  if (text == "manhattan" || text == "l1") return DisturbanceNorm::manhattan;
  if (text == "chebyshev" || text == "linf") return DisturbanceNorm::chebyshev;
  throw Error("unknown disturbance norm '" + text + "' (expected manhattan or chebyshev)");
}

CellGraph::CellGraph(GridSpec spec, Box bounds, std::array<int, 3> dims,
                     std::vector<CellKind> kinds, std::vector<std::int16_t> target_of,
                     std::vector<std::string> target_names,
                     std::vector<std::array<int, 3>> moves,
                     std::shared_ptr<const TransitionSystem> transitions)
    : spec_(spec),
      bounds_(bounds),
      dims_(dims),
      kinds_(std::move(kinds)),
      target_of_(std::move(target_of)),
      target_names_(std::move(target_names)),
      moves_(std::move(moves)),
      transitions_(std::move(transitions)) {}

Vec3 CellGraph::center(State c) const {
  const auto idx = index(c);
  Vec3 p;
  for (int a = 0; a < 3; ++a)
    p[a] = bounds_.lo[a] + (idx[a] + 0.5) * spec_.cell_size;
  return p;
}

std::optional<State> CellGraph::locate(Vec3 p) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - bounds_.lo[a]) / spec_.cell_size + 1e-9);
    if (f < 0 || f >= dims_[a]) return std::nullopt;
    idx[a] = static_cast<int>(f);
  }
  return cell(idx[0], idx[1], idx[2]);
}

std::vector<State> CellGraph::cells_of(const std::string& goal) const {
  std::vector<State> out;
  if (goal == kBaseGoal) {
    for (State c = 0; c < kinds_.size(); ++c)
      if (kinds_[c] == CellKind::base) out.push_back(c);
    return out;
  }
  const auto it = std::find(target_names_.begin(), target_names_.end(), goal);
  if (it == target_names_.end()) throw Error("unknown goal " + goal);
  const auto k = static_cast<std::int16_t>(it - target_names_.begin());
  for (State c = 0; c < kinds_.size(); ++c)
    if (kinds_[c] == CellKind::target && target_of_[c] == k) out.push_back(c);
  return out;
}

namespace {

constexpr double kTol = 1e-9;

struct Range {
  int lo;
  int hi;  // inclusive; empty when lo > hi
};

// Cells of one axis a box covers: centres inside [blo, bhi], or for a flat
// box the half-open cell holding the plane.
Range axis_range(double blo, double bhi, double origin, double eta, int n) {
  Range r;
  if (bhi - blo < kTol) {
    r.lo = r.hi = static_cast<int>(std::floor((blo - origin) / eta + kTol));
    if (r.lo == n) r.lo = r.hi = n - 1;
  } else {
    r.lo = static_cast<int>(std::ceil((blo - kTol - origin) / eta - 0.5));
    r.hi = static_cast<int>(std::floor((bhi + kTol - origin) / eta - 0.5));
  }
  r.lo = std::max(r.lo, 0);
  r.hi = std::min(r.hi, n - 1);
  return r;
}

std::vector<std::array<int, 3>> make_moves(Connectivity c) {
  if (c == Connectivity::face)
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<std::array<int, 3>> moves;
  for (int dx = 1; dx >= -1; --dx)
    for (int dy = 1; dy >= -1; --dy)
      for (int dz = 1; dz >= -1; --dz)
        if (dx || dy || dz) moves.push_back({dx, dy, dz});
  std::stable_sort(moves.begin(), moves.end(), [](const auto& a, const auto& b) {
    return std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) >
           std::abs(b[0]) + std::abs(b[1]) + std::abs(b[2]);
  });
  return moves;
}

std::vector<std::array<int, 3>> lateral_offsets(const std::array<int, 3>& m, int r,
                                                DisturbanceNorm norm) {
  std::vector<std::array<int, 3>> out;
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy)
      for (int dz = -r; dz <= r; ++dz) {
        if (!dx && !dy && !dz) continue;
        if (dx * m[0] + dy * m[1] + dz * m[2] != 0) continue;
        if (norm == DisturbanceNorm::manhattan && std::abs(dx) + std::abs(dy) + std::abs(dz) > r)
          continue;
        out.push_back({dx, dy, dz});
      }
  return out;
}

}  // namespace

CellGraph discretize(const Scenario& scenario, const GridSpec& grid) {
  const double eta = grid.cell_size;
  if (!(eta > 0) || !std::isfinite(eta)) throw Error("cell size must be positive");
  if (grid.disturbance_radius < 0) throw Error("disturbance radius must be >= 0");
  const Box& area = scenario.mission_area;

  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const double cells = std::floor((area.hi[a] - area.lo[a]) / eta + kTol);
    if (cells < 1) throw Error("mission area is thinner than one cell");
    if (cells > 4096) throw Error("grid too fine");
    dims[a] = static_cast<int>(cells);
  }
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (n > (std::size_t{1} << 31)) throw Error("grid too fine");
  auto flat = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  };

  std::vector<CellKind> kinds(n, CellKind::free);
  std::vector<std::int16_t> target_of(n, -1);
  auto paint = [&](const Box& b, auto&& fn) {
    Range r[3];
    for (int a = 0; a < 3; ++a)
      r[a] = axis_range(b.lo[a], b.hi[a], area.lo[a], eta, dims[a]);
    std::size_t count = 0;
    for (int k = r[2].lo; k <= r[2].hi; ++k)
      for (int j = r[1].lo; j <= r[1].hi; ++j)
        for (int i = r[0].lo; i <= r[0].hi; ++i, ++count) fn(flat(i, j, k));
    return count;
  };

  std::vector<std::string> names;
  for (std::size_t t = 0; t < scenario.targets.size(); ++t) {
    const NamedBox& target = scenario.targets[t];
    names.push_back(target.name);
    const auto painted = paint(target.box, [&](std::size_t c) {
      kinds[c] = CellKind::target;
      target_of[c] = static_cast<std::int16_t>(t);
    });
    if (painted == 0)
      throw Error("grid too coarse: target " + target.name + " contains no cell center");
  }
  if (paint(scenario.base, [&](std::size_t c) {
        kinds[c] = CellKind::base;
        target_of[c] = -1;
      }) == 0)
    throw Error("grid too coarse: base contains no cell center");
  for (const NamedBox& fire : scenario.no_go)
    paint(fire.box, [&](std::size_t c) { kinds[c] = CellKind::fire; });
  for (const NamedBox& hill : scenario.fixed_obstacles)
    paint(hill.box, [&](std::size_t c) { kinds[c] = CellKind::obstacle; });

  const auto moves = make_moves(grid.connectivity);
  std::vector<std::vector<std::array<int, 3>>> laterals;
  for (std::size_t u = 0; u < moves.size(); ++u)
    laterals.push_back(lateral_offsets(moves[u], grid.disturbance_radius, grid.disturbance_norm));

  auto free = [&](std::size_t c) { return kinds[c] <= CellKind::target; };
  auto inside = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  };

  std::vector<std::size_t> offsets;
  offsets.reserve(n * moves.size() + 1);
  offsets.push_back(0);
  std::vector<Successor> edges;
  std::size_t per_cell = 0;
  for (const auto& l : laterals) per_cell += l.size() + 1;
  edges.reserve(n * per_cell);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const std::size_t c = flat(i, j, k);
        for (std::size_t u = 0; u < moves.size(); ++u) {
          const auto& m = moves[u];
          const int ni = i + m[0], nj = j + m[1], nk = k + m[2];
          bool enabled = free(c) && inside(ni, nj, nk) && free(flat(ni, nj, nk));
          if (enabled)
            for (const auto& d : laterals[u])
              if (!inside(ni + d[0], nj + d[1], nk + d[2])) {
                enabled = false;
                break;
              }
          if (!enabled) {
            edges.push_back({static_cast<State>(c), kInfinity});
          } else {
            const Vec3 from{double(i), double(j), double(k)};
            auto push = [&](int a, int b, int e) {
              const Vec3 to{double(a), double(b), double(e)};
              edges.push_back({static_cast<State>(flat(a, b, e)), eta * distance(from, to)});
            };
            push(ni, nj, nk);
            for (const auto& d : laterals[u]) push(ni + d[0], nj + d[1], nk + d[2]);
          }
          offsets.push_back(edges.size());
        }
      }

  auto ts = std::make_shared<const TransitionSystem>(n, moves.size(), std::move(offsets),
                                                      std::move(edges));
  return CellGraph(grid, area, dims, std::move(kinds), std::move(target_of),
                   std::move(names), moves, std::move(ts));
}

ProblemInstance build_reach_avoid(const CellGraph& graph, const std::string& goal) {
  const auto cells = graph.cells_of(goal);
  if (cells.empty()) throw Error("target " + goal + " is fully obstructed");
  std::vector<Cost> terminal(graph.num_cells(), kInfinity);
  for (State c : cells) terminal[c] = 0;
  return ProblemInstance(graph.transitions(), std::move(terminal));
}

std::vector<NamedProblem> make_scenario_suite(const Scenario& scenario,
                                              const CellGraph& graph) {
  std::vector<NamedProblem> suite;
  for (const std::string& goal : scenario.mission)
    suite.push_back({goal, build_reach_avoid(graph, goal)});
  suite.push_back({kBaseGoal, build_reach_avoid(graph, kBaseGoal)});
  return suite;
}

std::vector<NamedProblem> make_scenario_suite(const Scenario& scenario,
                                              const GridSpec& grid) {
  return make_scenario_suite(scenario, discretize(scenario, grid));
}

}  // namespace symctl
