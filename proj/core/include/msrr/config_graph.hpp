#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msrr/geometry.hpp"
#include "msrr/grid.hpp"
#include "msrr/types.hpp"

namespace msrr {

/// Edge length of one module and of one world voxel, in meters.
inline constexpr double kModuleSize = 0.08;

enum class ModuleKind { Body, Sensor, Cube };

/// Connector faces. Body modules expose left/right/top/bottom, where top leads
/// and bottom trails when the module drives on its wheels; sensor modules
/// expose front/back; passive cubes expose all six (top/bottom vertical).
enum class Face { Front, Back, Left, Right, Top, Bottom };

std::string_view to_string(ModuleKind k);
std::string_view to_string(Face f);
ModuleKind parse_module_kind(std::string_view s);
Face parse_face(std::string_view s);

bool kind_has_face(ModuleKind kind, Face face);

/// Outward face normal in the module's own frame, one lattice step.
Index3 face_normal_local(ModuleKind kind, Face face);

struct ModuleNode {
  ModuleId id = 0;
  ModuleKind kind = ModuleKind::Body;
  /// Lattice cell relative to the sensor module, in module units.
  Index3 cell;
  /// Heading in quarter turns about +z.
  int yaw_quarters = 0;

  bool operator==(const ModuleNode&) const = default;

  Vec2 local_position() const { return {cell.x * kModuleSize, cell.y * kModuleSize}; }
  double local_yaw() const { return yaw_quarters * kPi / 2.0; }
};

struct Connection {
  ModuleId a = 0;
  Face face_a = Face::Top;
  ModuleId b = 0;
  Face face_b = Face::Bottom;

  bool operator==(const Connection&) const = default;
  bool touches(ModuleId m, Face f) const { return (a == m && face_a == f) || (b == m && face_b == f); }
  bool involves(ModuleId m) const { return a == m || b == m; }
};

/// Thrown by ConfigurationGraph::validate.
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

/// Modules as nodes and face-to-face connections as labeled edges.
class ConfigurationGraph {
 public:
  ConfigurationGraph() = default;
  explicit ConfigurationGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  void add_module(ModuleNode node);
  /// Adds an edge; throws InvalidConfiguration if either face is taken.
  void connect(Connection c);
  /// Removes the edge through (module, face). Returns false if none exists.
  bool disconnect(ModuleId module, Face face);

  const std::vector<ModuleNode>& modules() const { return modules_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const ModuleNode* find(ModuleId id) const;
  ModuleNode* find(ModuleId id);
  std::optional<Connection> connection_at(ModuleId module, Face face) const;
  int degree(ModuleId module) const;
  std::optional<ModuleId> sensor_id() const;

  bool is_connected() const;
  /// Checks every structural invariant; throws InvalidConfiguration.
  /// Geometric checking confirms each edge joins lattice-adjacent modules
  /// with opposing face normals.
  void validate(bool require_connected = true) const;

  bool operator==(const ConfigurationGraph&) const = default;

 private:
  std::string name_;
  std::string provenance_;
  std::vector<ModuleNode> modules_;
  std::vector<Connection> connections_;
};

/// World-frame outward normal of `face` on `node` (applies the node's yaw).
Index3 face_normal(const ModuleNode& node, Face face);

/// Face-labeled isomorphism: a bijection of modules preserving kinds and
/// mapping every edge (a, fa, b, fb) onto an edge (pi(a), fa, pi(b), fb).
/// Returns the mapping from `from` module ids to `to` module ids.
std::optional<std::map<ModuleId, ModuleId>> find_isomorphism(const ConfigurationGraph& from,
                                                             const ConfigurationGraph& to);

}  // namespace msrr
