#include "msrr/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace msrr {

using nlohmann::json;

namespace {

Index3 index3(const json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 3) throw ParseError("expected [x, y, z] cell index");
  return {v[0], v[1], v[2]};
}

Color color_of(const json& j, const char* key, Color fallback) {
  return j.contains(key) ? parse_color(j.at(key).get<std::string>()) : fallback;
}

Index2 quarter_vector(int q) {
  switch (((q % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

std::vector<Index3> stair_cells(const StairFlight& f, double resolution) {
  const int layers = std::max(1, static_cast<int>(std::lround(f.rise / resolution)));
  const Index2 a = quarter_vector(f.direction);
  const Index2 l = quarter_vector(f.direction + 1);
  std::vector<Index3> out;
  const int depth = static_cast<int>(f.total_depth_cells());
  for (int u = 0; u < depth; ++u) {
    const int step = std::min(u / f.step_depth, f.steps - 1);
    const int height = (step + 1) * layers;
    for (int v = 0; v < f.width; ++v)
      for (int z = 0; z < height; ++z)
        out.push_back({f.start.x + u * a.x + v * l.x, f.start.y + u * a.y + v * l.y, z});
  }
  return out;
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    throw ParseError(e.what(), 1 + static_cast<int>(std::count(upto.begin(), upto.end(), '\n')));
  }
  Scenario s;
  try {
    s.name = doc.value("name", std::string("scenario"));
    s.seed = doc.value("seed", std::uint64_t{1});

    const json& w = doc.at("world");
    const auto size = w.at("size").get<std::vector<int>>();
    if (size.size() != 3 || size[0] <= 0 || size[1] <= 0 || size[2] <= 0)
      throw ParseError("world.size: expected three positive integers");
    s.shape = {size[0], size[1], size[2], w.value("resolution", 0.08), {}};
    for (const auto& b : w.value("boxes", json::array()))
      s.boxes.push_back({index3(b.at("min")), index3(b.at("max")), color_of(b, "color", Color::Gray)});
    for (const auto& st : w.value("stairs", json::array())) {
      StairFlight f;
      const auto start = st.at("start").get<std::vector<int>>();
      if (start.size() != 2) throw ParseError("stairs.start: expected [x, y]");
      f.start = {start[0], start[1]};
      f.direction = st.value("direction", 0);
      f.steps = st.value("steps", 1);
      f.step_depth = st.value("step_depth", 2);
      f.landing_depth = st.value("landing_depth", f.step_depth);
      f.width = st.value("width", 4);
      f.rise = st.value("rise", kModuleSize);
      if (f.steps < 1 || f.step_depth < 1 || f.landing_depth < 1 || f.width < 1 || !(f.rise > 0.0))
        throw ParseError("stairs: dimensions must be positive");
      s.stairs.push_back(f);
      s.stair_color = color_of(st, "color", Color::Gray);
    }
    for (const auto& o : w.value("objects", json::array()))
      s.objects.push_back({o.at("id").get<std::string>(), color_of(o, "color", Color::None), index3(o.at("cell"))});

    const json& r = doc.at("robot");
    s.start_configuration = r.value("configuration", std::string("Car"));
    const auto pos = r.at("position").get<std::vector<double>>();
    if (pos.size() != 2) throw ParseError("robot.position: expected [x, y] in meters");
    s.start_position = {pos[0], pos[1]};
    s.start_heading = deg_to_rad(r.value("heading_deg", 0.0));
    if (r.contains("carrying")) s.carrying = r.at("carrying").get<std::string>();

    if (doc.contains("faults")) {
      const json& f = doc.at("faults");
      s.faults.hardware = f.value("hardware", 0.0);
      s.faults.navigation = f.value("navigation", 0.0);
      s.faults.perception = f.value("perception", 0.0);
      s.faults.network = f.value("network", 0.0);
      s.faults.validate();
    }
    if (doc.contains("noise")) {
      const json& n = doc.at("noise");
      s.noise.position_std = n.value("position_std", 0.0);
      s.noise.heading_std = deg_to_rad(n.value("heading_std_deg", 1.0));
    }
    if (doc.contains("mission")) {
      const json& m = doc.at("mission");
      s.mission.tick_budget = m.value("tick_budget", s.mission.tick_budget);
      s.mission.end_drive_capable = m.value("end_drive_capable", false);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

WorldState make_world(const Scenario& s, const Library& library) {
  WorldState w;
  w.voxels = Grid3<Voxel>(s.shape, Voxel{});
  w.rng_seed = s.seed;
  const auto set_solid = [&](Index3 c, Color color) {
    if (!s.shape.contains(c)) throw Error("scenario geometry leaves the grid");
    w.voxels[c] = {true, color};
  };
  for (const auto& b : s.boxes)
    for (int z = b.min.z; z < b.max.z; ++z)
      for (int y = b.min.y; y < b.max.y; ++y)
        for (int x = b.min.x; x < b.max.x; ++x) set_solid({x, y, z}, b.color);
  for (const auto& f : s.stairs)
    for (const auto& c : stair_cells(f, s.shape.resolution)) set_solid(c, s.stair_color);
  w.stairs = s.stairs;

  for (const auto& o : s.objects) {
    if (!s.shape.contains(o.cell)) throw Error("object " + o.id + " lies outside the grid");
    w.objects.push_back({o.id, o.color, s.shape.center(o.cell), std::nullopt});
  }

  const ConfigurationGraph& config = library.configuration(s.start_configuration);
  w.robot.configuration = config.name();
  w.robot.base = {s.start_position, wrap_angle(s.start_heading)};
  for (const auto& node : config.modules()) {
    w.modules.push_back({node.id, node.kind, {}, 0.0, {}});
    w.robot.binding[node.id] = node.id;
    if (node.kind == ModuleKind::Sensor)
      w.robot.sensor_module = node.id;
    else
      w.robot.members.insert(node.id);
  }
  place_cluster(w, config);

  if (s.carrying) {
    auto it = std::find_if(w.objects.begin(), w.objects.end(), [&](const TaskObject& o) { return o.id == *s.carrying; });
    if (it == w.objects.end()) throw Error("robot carries unknown object " + *s.carrying);
    it->carried_by = w.robot.sensor_module;
    it->position = {s.start_position.x, s.start_position.y, 0.2};
  }
  return w;
}

}  // namespace msrr
