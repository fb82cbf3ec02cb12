#include "msrr/library.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace msrr {

using nlohmann::json;

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::Static: return "static";
    case BehaviorKind::Parametric: return "parametric";
    case BehaviorKind::Effect: return "effect";
  }
  return "effect";
}

std::string_view to_string(EffectKind k) {
  switch (k) {
    case EffectKind::PickUp: return "pickUp";
    case EffectKind::Drop: return "drop";
    case EffectKind::HighReach: return "highReach";
    case EffectKind::ClimbUp: return "climbUp";
    case EffectKind::ClimbDown: return "climbDown";
  }
  return "pickUp";
}

namespace {

EffectKind parse_effect(const std::string& s) {
  for (EffectKind k : {EffectKind::PickUp, EffectKind::Drop, EffectKind::HighReach, EffectKind::ClimbUp,
                       EffectKind::ClimbDown})
    if (to_string(k) == s) return k;
  throw ParseError("unknown effect '" + s + "'");
}

BehaviorKind parse_behavior_kind(const std::string& s) {
  for (BehaviorKind k : {BehaviorKind::Static, BehaviorKind::Parametric, BehaviorKind::Effect})
    if (to_string(k) == s) return k;
  throw ParseError("unknown behavior kind '" + s + "'");
}

bool is_joint_name(const std::string& j) {
  return j == "left_wheel" || j == "right_wheel" || j == "pan" || j == "tilt";
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Wraps a field access so type errors report the JSON path.
template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

ConfigurationGraph config_from_json(const json& j, const std::string& where) {
  ConfigurationGraph g(field<std::string>(j, "name", where));
  if (j.contains("provenance")) g.set_provenance(j.at("provenance").get<std::string>());
  const auto modules = field<json>(j, "modules", where);
  for (std::size_t i = 0; i < modules.size(); ++i) {
    const std::string w = where + ".modules[" + std::to_string(i) + "]";
    const auto& m = modules[i];
    ModuleNode node;
    node.id = field<int>(m, "id", w);
    node.kind = parse_module_kind(field<std::string>(m, "kind", w));
    const auto cell = field<std::vector<int>>(m, "cell", w);
    if (cell.size() != 3) throw ParseError(w + ".cell: expected 3 integers");
    node.cell = {cell[0], cell[1], cell[2]};
    node.yaw_quarters = m.value("yaw", 0) / 90;
    if (m.value("yaw", 0) % 90 != 0) throw ParseError(w + ".yaw: must be a multiple of 90");
    g.add_module(node);
  }
  const auto conns = j.value("connections", json::array());
  for (std::size_t i = 0; i < conns.size(); ++i) {
    const std::string w = where + ".connections[" + std::to_string(i) + "]";
    const auto& c = conns[i];
    if (!c.is_array() || c.size() != 4) throw ParseError(w + ": expected [a, face_a, b, face_b]");
    g.connect({c[0].get<int>(), parse_face(c[1].get<std::string>()), c[2].get<int>(),
               parse_face(c[3].get<std::string>())});
  }
  return g;
}

json config_to_json(const ConfigurationGraph& g) {
  json j;
  j["name"] = g.name();
  if (!g.provenance().empty()) j["provenance"] = g.provenance();
  j["modules"] = json::array();
  for (const auto& m : g.modules())
    j["modules"].push_back({{"id", m.id},
                            {"kind", std::string(to_string(m.kind))},
                            {"cell", {m.cell.x, m.cell.y, m.cell.z}},
                            {"yaw", m.yaw_quarters * 90}});
  j["connections"] = json::array();
  for (const auto& c : g.connections())
    j["connections"].push_back(
        {c.a, std::string(to_string(c.face_a)), c.b, std::string(to_string(c.face_b))});
  return j;
}

Behavior behavior_from_json(const json& j, const std::string& where) {
  Behavior b;
  b.name = field<std::string>(j, "name", where);
  b.kind = parse_behavior_kind(field<std::string>(j, "kind", where));
  b.duration_s = j.value("duration_s", 0.0);
  if (b.kind == BehaviorKind::Effect) b.effect = parse_effect(field<std::string>(j, "effect", where));
  for (const auto& p : j.value("parameters", json::array()))
    b.parameters.push_back({p.at("name").get<std::string>(), p.at("min").get<double>(), p.at("max").get<double>()});
  for (const auto& s : j.value("script", json::array())) {
    ScriptStep step{s.at("t").get<double>(), s.at("module").get<int>(), s.at("joint").get<std::string>(),
                    s.at("value").get<double>()};
    if (!is_joint_name(step.joint)) throw ParseError(where + ".script: unknown joint '" + step.joint + "'");
    b.script.push_back(step);
  }
  return b;
}

json behavior_to_json(const Behavior& b) {
  json j{{"name", b.name}, {"kind", std::string(to_string(b.kind))}, {"duration_s", b.duration_s}};
  if (b.kind == BehaviorKind::Effect) j["effect"] = std::string(to_string(b.effect));
  if (!b.parameters.empty()) {
    j["parameters"] = json::array();
    for (const auto& p : b.parameters) j["parameters"].push_back({{"name", p.name}, {"min", p.min}, {"max", p.max}});
  }
  if (!b.script.empty()) {
    j["script"] = json::array();
    for (const auto& s : b.script)
      j["script"].push_back({{"t", s.time_s}, {"module", s.module}, {"joint", s.joint}, {"value", s.value}});
  }
  return j;
}

}  // namespace

void Library::add_configuration(ConfigurationGraph config) {
  if (has_configuration(config.name())) throw Error("duplicate configuration '" + config.name() + "'");
  config.validate();
  configurations_.push_back(std::move(config));
}

void Library::add_entry(LibraryEntry entry) {
  const ConfigurationGraph& config = configuration(entry.configuration);
  if (entry.properties.empty()) throw Error(entry.label() + ": behavior properties must be non-empty");
  if (entry.environments.empty()) throw Error(entry.label() + ": environment types must be non-empty");
  const Behavior& b = entry.behavior;
  for (const auto& step : b.script)
    if (!config.find(step.module))
      throw Error(entry.label() + ": script references module " + std::to_string(step.module) +
                  " absent from " + config.name());
  if (b.kind == BehaviorKind::Static && b.script.empty())
    throw Error(entry.label() + ": static behavior without a script");
  if (b.kind == BehaviorKind::Parametric) {
    if (b.parameters.empty()) throw Error(entry.label() + ": parametric behavior declares no parameters");
    for (const auto& p : b.parameters)
      if (p.min > p.max) throw Error(entry.label() + ": empty range for parameter " + p.name);
  }
  entries_.push_back(std::move(entry));
}

std::vector<LibraryEntry> Library::query(std::string_view property, EnvironmentType env) const {
  std::vector<LibraryEntry> out;
  for (const auto& e : entries_)
    if (e.properties.count(std::string(property)) && e.environments.count(env)) out.push_back(e);
  return out;
}

std::vector<LibraryEntry> Library::entries_for_configuration(std::string_view name) const {
  if (!has_configuration(name)) throw UnknownConfiguration(std::string(name));
  std::vector<LibraryEntry> out;
  for (const auto& e : entries_)
    if (e.configuration == name) out.push_back(e);
  return out;
}

bool Library::has_configuration(std::string_view name) const {
  return std::any_of(configurations_.begin(), configurations_.end(),
                     [&](const ConfigurationGraph& g) { return g.name() == name; });
}

const ConfigurationGraph& Library::configuration(std::string_view name) const {
  for (const auto& g : configurations_)
    if (g.name() == name) return g;
  throw UnknownConfiguration(std::string(name));
}

Library parse_library(std::string_view text) {
  Library lib;
  if (std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
    return lib;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of_offset(text, e.byte));
  }
  try {
    const auto configs = doc.value("configurations", json::array());
    for (std::size_t i = 0; i < configs.size(); ++i)
      lib.add_configuration(config_from_json(configs[i], "configurations[" + std::to_string(i) + "]"));
    const auto entries = doc.value("entries", json::array());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string w = "entries[" + std::to_string(i) + "]";
      const auto& e = entries[i];
      LibraryEntry entry;
      entry.configuration = field<std::string>(e, "configuration", w);
      entry.behavior = behavior_from_json(field<json>(e, "behavior", w), w + ".behavior");
      for (const auto& p : field<std::vector<std::string>>(e, "properties", w)) entry.properties.insert(p);
      for (const auto& name : field<std::vector<std::string>>(e, "environments", w)) {
        auto env = parse_environment_type(name);
        if (!env) throw ParseError(w + ".environments: unknown environment type '" + name + "'");
        entry.environments.insert(*env);
      }
      const json values = e.value("values", json::object());
      for (const auto& [k, v] : values.items()) entry.values[k] = v.get<double>();
      lib.add_entry(std::move(entry));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return lib;
}

Library load_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open library file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_library(ss.str());
}

std::string save_library(const Library& lib) {
  json doc;
  doc["configurations"] = json::array();
  for (const auto& g : lib.configurations()) doc["configurations"].push_back(config_to_json(g));
  doc["entries"] = json::array();
  for (const auto& e : lib.entries()) {
    json je{{"configuration", e.configuration}, {"behavior", behavior_to_json(e.behavior)}};
    je["properties"] = std::vector<std::string>(e.properties.begin(), e.properties.end());
    je["environments"] = json::array();
    for (auto env : e.environments) je["environments"].push_back(std::string(to_string(env)));
    if (!e.values.empty()) je["values"] = e.values;
    doc["entries"].push_back(je);
  }
  return doc.dump(2) + "\n";
}

}  // namespace msrr
