#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "symctl/geometry.hpp"

namespace symctl {

struct NamedBox {
  std::string name;
  Box box;
};

/// Firefighting scenario: mission area, base, target (water release) areas,
/// fires below the targets, and fixed obstacles.
struct Scenario {
  Box mission_area;
  Box base;
  std::vector<NamedBox> targets;
  /// Fires, one per target, when the file gives a fire offset.
  std::vector<NamedBox> no_go;
  std::vector<NamedBox> fixed_obstacles;
  /// Targets the default mission visits, in file order.
  std::vector<std::string> mission;
  /// Offset from a target to its fire; empty when the file has no fires.
  std::optional<Vec3> fire_offset;

  const NamedBox* find_target(const std::string& name) const;
};

/// Scenario JSON:
///
///   {
///     "mission_area": {"lo": [x,y,z], "hi": [x,y,z]},
///     "base":         {"lo": [...], "hi": [...]},
///     "hover_area":   {"lo": [...], "hi": [...]},          // optional
///     "targets": [ {"name": "A1", "at": [x,y,z]},          // at + hover_area
///                  {"name": "B",  "lo": [...], "hi": [...]} ],
///     "fire_offset": [0, 0, -0.15],                        // optional
///     "fixed_obstacles": [ {"name": "Hf1", "lo": [...], "hi": [...]} ],
///     "mission": ["A1", "A2"]                              // optional
///   }
///
/// The fire of target "A<k>" is named "H<k>"; other targets get "H_<name>".
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Location of the bundled firefighting scenario (source tree first, then
/// the install prefix).
std::filesystem::path bundled_scenario_path();
Scenario load_bundled_scenario();

}  // namespace symctl
