#include "symctl/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace symctl {

using nlohmann::json;

namespace {

Cost parse_cost(const json& j) {
  if (j.is_null()) return kInfinity;
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInfinity;
  }
  throw Error("invalid cost value: " + j.dump());
}

json cost_json(Cost c) {
  if (c == kInfinity) return "inf";
  return c;
}

std::size_t index_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer() ||
      it->get<long long>() < 0)
    throw Error(std::string("missing or negative integer field '") + key +
                "'");
  return it->get<std::size_t>();
}

}  // namespace

ProblemInstance parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed problem file: ") + e.what());
  }
  if (!doc.is_object()) throw Error("problem file must be a JSON object");
  const std::size_t n = index_field(doc, "num_states");
  const std::size_t m = index_field(doc, "num_inputs");
  if (n == 0 || m == 0) throw Error("num_states and num_inputs must be > 0");

  TransitionBuilder builder(n, m);
  for (const json& e : doc.value("edges", json::array())) {
    const std::size_t from = index_field(e, "from");
    const std::size_t input = index_field(e, "input");
    if (from >= n) throw Error("edge 'from' out of range: " + e.dump());
    if (input >= m) throw Error("edge 'input' out of range: " + e.dump());
    builder.add(static_cast<State>(from), static_cast<Input>(input),
                static_cast<State>(index_field(e, "to")),
                parse_cost(e.value("cost", json(0))));
  }
  std::vector<Cost> terminal(n, kInfinity);
  for (const json& t : doc.value("terminal", json::array())) {
    const std::size_t x = index_field(t, "state");
    if (x >= n) throw Error("terminal state out of range: " + t.dump());
    terminal[x] = parse_cost(t.at("cost"));
  }
  return ProblemInstance(std::move(builder).build(), std::move(terminal));
}

ProblemInstance load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

std::string problem_to_json(const ProblemInstance& instance) {
  json edges = json::array();
  for (State x = 0; x < instance.num_states(); ++x)
    for (Input u = 0; u < instance.num_inputs(); ++u)
      for (const Successor& s : instance.successors(x, u))
        edges.push_back(
            {{"from", x}, {"input", u}, {"to", s.to}, {"cost", cost_json(s.cost)}});
  json terminal = json::array();
  for (State x = 0; x < instance.num_states(); ++x)
    if (instance.terminal(x) < kInfinity)
      terminal.push_back({{"state", x}, {"cost", instance.terminal(x)}});
  json doc = {{"num_states", instance.num_states()},
              {"num_inputs", instance.num_inputs()},
              {"edges", std::move(edges)},
              {"terminal", std::move(terminal)}};
  return doc.dump(1);
}

std::string format_cost(Cost c) {
  if (c == kInfinity) return "inf";
  char buf[32];
  if (c == std::trunc(c) && std::fabs(c) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", c);
    return buf;
  }
  // Shortest fixed or scientific rendering that round-trips.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, c);
    if (std::strtod(buf, nullptr) == c) break;
  }
  return buf;
}

}  // namespace symctl
