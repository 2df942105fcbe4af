#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symctl/geometry.hpp"
#include "symctl/problem.hpp"
#include "symctl/scenario.hpp"

namespace symctl {

enum class Connectivity {
  face,  // 6 axis moves
  full,  // 26 moves
};

std::string to_string(Connectivity c);
Connectivity parse_connectivity(const std::string& text);

/// Distance used for the disturbance radius.
enum class DisturbanceNorm {
  manhattan,  // grid steps
  chebyshev,  // max over axes
};

std::string to_string(DisturbanceNorm n);
DisturbanceNorm parse_disturbance_norm(const std::string& text);

struct GridSpec {
  /// Edge length of a cubic cell, metres.
  double cell_size = 0.1;
  Connectivity connectivity = Connectivity::full;
  /// Lateral disturbance in cells: a move may end in any cell within this
  /// radius of the nominal cell, in the plane orthogonal to the move.
  int disturbance_radius = 1;
  DisturbanceNorm disturbance_norm = DisturbanceNorm::manhattan;
};

enum class CellKind : std::uint8_t { free, base, target, fire, obstacle };

/// Name used for the base in goal lists and suites.
inline const std::string kBaseGoal = "base";

/// Uniform grid abstraction of a scenario. Cells are states; moves are
/// inputs. Each move's successor set is the nominal cell followed by its
/// lateral disturbance neighbours. Moves whose nominal cell is blocked or
/// whose successor set leaves the grid are disabled as +inf self-loops, as
/// are all moves of fire and obstacle cells, so every pair stays strict.
class CellGraph {
 public:
  CellGraph(GridSpec spec, Box bounds, std::array<int, 3> dims,
            std::vector<CellKind> kinds, std::vector<std::int16_t> target_of,
            std::vector<std::string> target_names,
            std::vector<std::array<int, 3>> moves,
            std::shared_ptr<const TransitionSystem> transitions);

  const GridSpec& spec() const { return spec_; }
  const Box& bounds() const { return bounds_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t num_cells() const { return kinds_.size(); }

  State cell(int i, int j, int k) const {
    return static_cast<State>((static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i);
  }
  std::array<int, 3> index(State c) const {
    const int i = static_cast<int>(c % dims_[0]);
    const int j = static_cast<int>((c / dims_[0]) % dims_[1]);
    const int k = static_cast<int>(c / (static_cast<std::size_t>(dims_[0]) * dims_[1]));
    return {i, j, k};
  }
  Vec3 center(State c) const;
  /// Cell containing `p`, or nullopt outside the grid.
  std::optional<State> locate(Vec3 p) const;

  CellKind kind(State c) const { return kinds_[c]; }
  bool is_free(State c) const { return kinds_[c] <= CellKind::target; }
  /// Cells tagged with `goal` (a target name or kBaseGoal), ascending.
  std::vector<State> cells_of(const std::string& goal) const;
  const std::vector<std::string>& target_names() const { return target_names_; }

  const std::vector<std::array<int, 3>>& moves() const { return moves_; }
  const std::shared_ptr<const TransitionSystem>& transitions() const {
    return transitions_;
  }

 private:
  GridSpec spec_;
  Box bounds_;
  std::array<int, 3> dims_;
  std::vector<CellKind> kinds_;
  std::vector<std::int16_t> target_of_;
  std::vector<std::string> target_names_;
  std::vector<std::array<int, 3>> moves_;
  std::shared_ptr<const TransitionSystem> transitions_;
};

/// Tags cells by centre containment (for a flat box axis, by the half-open
/// cell extent holding it). Precedence: obstacle > fire > base > target.
CellGraph discretize(const Scenario& scenario, const GridSpec& grid);

/// G = 0 on the goal's cells and +inf elsewhere; g is the Euclidean step
/// length between cell centres.
ProblemInstance build_reach_avoid(const CellGraph& graph, const std::string& goal);

struct NamedProblem {
  std::string name;
  ProblemInstance instance;
};

/// One reach-avoid instance per mission target plus the base, sharing one
/// transition system.
std::vector<NamedProblem> make_scenario_suite(const Scenario& scenario,
                                              const CellGraph& graph);
std::vector<NamedProblem> make_scenario_suite(const Scenario& scenario,
                                              const GridSpec& grid);

}  // namespace symctl
