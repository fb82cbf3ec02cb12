#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msrr/config_graph.hpp"
#include "msrr/types.hpp"

namespace msrr {

enum class BehaviorKind { Static, Parametric, Effect };

/// Abstract world effects realized by effect behaviors.
enum class EffectKind { PickUp, Drop, HighReach, ClimbUp, ClimbDown };

std::string_view to_string(BehaviorKind k);
std::string_view to_string(EffectKind k);

/// One timed joint setpoint of a static behavior.
struct ScriptStep {
  double time_s = 0.0;
  ModuleId module = 0;
  std::string joint;  // left_wheel | right_wheel | pan | tilt
  double value = 0.0;
  bool operator==(const ScriptStep&) const = default;
};

struct ParameterRange {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  bool operator==(const ParameterRange&) const = default;
};

struct Behavior {
  std::string name;
  BehaviorKind kind = BehaviorKind::Effect;
  EffectKind effect = EffectKind::PickUp;   // Effect behaviors only.
  std::vector<ParameterRange> parameters;   // Parametric behaviors only.
  std::vector<ScriptStep> script;           // Static behaviors (optional gait for effects).
  double duration_s = 0.0;
  bool operator==(const Behavior&) const = default;
};

/// l = (C, B_C, P_b, P_e) plus numeric environment properties such as the
/// rated stair rise of a climbing gait.
struct LibraryEntry {
  std::string configuration;
  Behavior behavior;
  std::set<std::string> properties;
  std::set<EnvironmentType> environments;
  std::map<std::string, double> values;

  std::string label() const { return configuration + "." + behavior.name; }
  double value_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  bool operator==(const LibraryEntry&) const = default;
};

class UnknownConfiguration : public Error {
 public:
  explicit UnknownConfiguration(const std::string& name) : Error("unknown configuration '" + name + "'") {}
};

/// Immutable-after-load store of configurations and behavior entries.
class Library {
 public:
  /// Throws InvalidConfiguration if the graph breaks an invariant.
  void add_configuration(ConfigurationGraph config);
  /// Throws Error if the entry's configuration is missing or the entry is
  /// not executable by it.
  void add_entry(LibraryEntry entry);

  /// Entries whose behavior properties contain `property` and whose
  /// environment types contain `env`, in insertion order.
  std::vector<LibraryEntry> query(std::string_view property, EnvironmentType env) const;
  std::vector<LibraryEntry> entries_for_configuration(std::string_view name) const;

  bool has_configuration(std::string_view name) const;
  const ConfigurationGraph& configuration(std::string_view name) const;
  const std::vector<ConfigurationGraph>& configurations() const { return configurations_; }
  const std::vector<LibraryEntry>& entries() const { return entries_; }

  bool operator==(const Library&) const = default;

 private:
  std::vector<ConfigurationGraph> configurations_;
  std::vector<LibraryEntry> entries_;
};

/// Reads the JSON library format documented in docs/formats.md.
Library parse_library(std::string_view text);
Library load_library(const std::filesystem::path& path);
std::string save_library(const Library& lib);

}  // namespace msrr
