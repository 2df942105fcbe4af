#include "symctl/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "symctl/problem.hpp"

namespace symctl {

using nlohmann::json;

const NamedBox* Scenario::find_target(const std::string& name) const {
  for (const NamedBox& t : targets)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

Vec3 parse_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(what + ": expected a 3-vector");
  for (const json& v : j)
    if (!v.is_number()) throw Error(what + ": expected numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Box parse_box(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw Error(what + ": expected {\"lo\": [...], \"hi\": [...]}");
  Box b{parse_vec(j["lo"], what + ".lo"), parse_vec(j["hi"], what + ".hi")};
  if (!b.valid()) throw Error(what + ": box with lo > hi");
  return b;
}

std::string fire_name(const std::string& target) {
  if (target.size() > 1 && target[0] == 'A') return "H" + target.substr(1);
  return "H_" + target;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed scenario file: ") + e.what());
  }
  if (!doc.is_object()) throw Error("scenario file must be a JSON object");

  Scenario s;
  s.mission_area = parse_box(doc.at("mission_area"), "mission_area");
  s.base = parse_box(doc.at("base"), "base");
  std::optional<Box> hover;
  if (doc.contains("hover_area")) hover = parse_box(doc["hover_area"], "hover_area");

  for (const json& t : doc.value("targets", json::array())) {
    const std::string name = t.at("name").get<std::string>();
    if (s.find_target(name)) throw Error("duplicate target " + name);
    Box box;
    if (t.contains("at")) {
      if (!hover) throw Error("target " + name + " uses 'at' without hover_area");
      box = hover->translated(parse_vec(t["at"], name + ".at"));
    } else {
      box = parse_box(t, name);
    }
    s.targets.push_back({name, box});
  }
  if (s.targets.empty()) throw Error("no targets");

  if (doc.contains("fire_offset")) {
    s.fire_offset = parse_vec(doc["fire_offset"], "fire_offset");
    for (const NamedBox& t : s.targets)
      s.no_go.push_back({fire_name(t.name), t.box.translated(*s.fire_offset)});
  }
  for (const json& o : doc.value("fixed_obstacles", json::array())) {
    const std::string name = o.at("name").get<std::string>();
    s.fixed_obstacles.push_back({name, parse_box(o, name)});
  }

  if (doc.contains("mission")) {
    for (const json& name : doc["mission"]) {
      const auto n = name.get<std::string>();
      if (!s.find_target(n)) throw Error("mission names unknown target " + n);
      s.mission.push_back(n);
    }
  } else {
    for (const NamedBox& t : s.targets) s.mission.push_back(t.name);
  }

  auto check_inside = [&](const Box& b, const std::string& name) {
    if (!b.intersects(s.mission_area))
      throw Error(name + " does not intersect the mission area");
  };
  check_inside(s.base, "base");
  for (const auto* group : {&s.targets, &s.no_go, &s.fixed_obstacles})
    for (const NamedBox& b : *group) check_inside(b.box, b.name);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::filesystem::path bundled_scenario_path() {
  const std::filesystem::path name = "firefighting.json";
  const std::filesystem::path source = std::filesystem::path(SYMCTL_SOURCE_DATA_DIR) / name;
  if (std::filesystem::exists(source)) return source;
  return std::filesystem::path(SYMCTL_INSTALL_DATA_DIR) / name;
}

Scenario load_bundled_scenario() { return load_scenario(bundled_scenario_path()); }

}  // namespace symctl
