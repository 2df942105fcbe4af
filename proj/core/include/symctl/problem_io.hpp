#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "symctl/problem.hpp"

namespace symctl {

/// Problem-instance JSON:
///
///   {
///     "num_states": 3,
///     "num_inputs": 1,
///     "edges":    [ {"from": 0, "input": 0, "to": 1, "cost": 1}, ... ],
///     "terminal": [ {"state": 2, "cost": 0}, ... ]
///   }
///
/// States without a terminal entry have G = +inf. A cost may be a number,
/// the string "inf", or null (also +inf). Successors keep file order.
ProblemInstance parse_problem(const std::string& json_text);
ProblemInstance load_problem(const std::filesystem::path& path);

std::string problem_to_json(const ProblemInstance& instance);

/// Renders +inf as "inf" and everything else with up to 17 significant
/// digits.
std::string format_cost(Cost c);

}  // namespace symctl
