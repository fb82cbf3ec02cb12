#include "msrr/config_graph.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <queue>
#include <set>
#include <utility>

namespace msrr {
namespace {

constexpr std::array<std::pair<Face, std::string_view>, 6> kFaceNames{{
    {Face::Front, "front"},
    {Face::Back, "back"},
    {Face::Left, "left"},
    {Face::Right, "right"},
    {Face::Top, "top"},
    {Face::Bottom, "bottom"},
}};

Index3 rotate_quarters(Index3 v, int q) {
  q = ((q % 4) + 4) % 4;
  for (int i = 0; i < q; ++i) v = {-v.y, v.x, v.z};
  return v;
}

std::vector<Face> used_faces(const ConfigurationGraph& g, ModuleId m) {
  std::vector<Face> faces;
  for (const auto& c : g.connections()) {
    if (c.a == m) faces.push_back(c.face_a);
    if (c.b == m) faces.push_back(c.face_b);
  }
  std::sort(faces.begin(), faces.end());
  return faces;
}

}  // namespace

std::string_view to_string(ModuleKind k) {
  switch (k) {
    case ModuleKind::Body: return "body";
    case ModuleKind::Sensor: return "sensor";
    case ModuleKind::Cube: return "cube";
  }
  return "body";
}

std::string_view to_string(Face f) {
  for (const auto& [face, name] : kFaceNames)
    if (face == f) return name;
  return "top";
}

ModuleKind parse_module_kind(std::string_view s) {
  if (s == "body") return ModuleKind::Body;
  if (s == "sensor") return ModuleKind::Sensor;
  if (s == "cube") return ModuleKind::Cube;
  throw ParseError("unknown module kind '" + std::string(s) + "'");
}

Face parse_face(std::string_view s) {
  for (const auto& [face, name] : kFaceNames)
    if (name == s) return face;
  throw ParseError("unknown face '" + std::string(s) + "'");
}

bool kind_has_face(ModuleKind kind, Face face) {
  switch (kind) {
    case ModuleKind::Body:
      return face == Face::Left || face == Face::Right || face == Face::Top || face == Face::Bottom;
    case ModuleKind::Sensor:
      return face == Face::Front || face == Face::Back;
    case ModuleKind::Cube:
      return true;
  }
  return false;
}

Index3 face_normal_local(ModuleKind kind, Face face) {
  switch (face) {
    case Face::Front: return {1, 0, 0};
    case Face::Back: return {-1, 0, 0};
    case Face::Left: return {0, 1, 0};
    case Face::Right: return {0, -1, 0};
    case Face::Top: return kind == ModuleKind::Cube ? Index3{0, 0, 1} : Index3{1, 0, 0};
    case Face::Bottom: return kind == ModuleKind::Cube ? Index3{0, 0, -1} : Index3{-1, 0, 0};
  }
  return {};
}

Index3 face_normal(const ModuleNode& node, Face face) {
  return rotate_quarters(face_normal_local(node.kind, face), node.yaw_quarters);
}

void ConfigurationGraph::add_module(ModuleNode node) {
  if (find(node.id)) throw InvalidConfiguration(name_ + ": duplicate module id " + std::to_string(node.id));
  modules_.push_back(node);
}

void ConfigurationGraph::connect(Connection c) {
  if (connection_at(c.a, c.face_a) || connection_at(c.b, c.face_b))
    throw InvalidConfiguration(name_ + ": face already connected");
  connections_.push_back(c);
}

bool ConfigurationGraph::disconnect(ModuleId module, Face face) {
  auto it = std::find_if(connections_.begin(), connections_.end(),
                         [&](const Connection& c) { return c.touches(module, face); });
  if (it == connections_.end()) return false;
  connections_.erase(it);
  return true;
}

const ModuleNode* ConfigurationGraph::find(ModuleId id) const {
  for (const auto& m : modules_)
    if (m.id == id) return &m;
  return nullptr;
}

ModuleNode* ConfigurationGraph::find(ModuleId id) {
  for (auto& m : modules_)
    if (m.id == id) return &m;
  return nullptr;
}

std::optional<Connection> ConfigurationGraph::connection_at(ModuleId module, Face face) const {
  for (const auto& c : connections_)
    if (c.touches(module, face)) return c;
  return std::nullopt;
}

int ConfigurationGraph::degree(ModuleId module) const {
  return static_cast<int>(std::count_if(connections_.begin(), connections_.end(),
                                        [&](const Connection& c) { return c.involves(module); }));
}

std::optional<ModuleId> ConfigurationGraph::sensor_id() const {
  for (const auto& m : modules_)
    if (m.kind == ModuleKind::Sensor) return m.id;
  return std::nullopt;
}

bool ConfigurationGraph::is_connected() const {
  if (modules_.empty()) return true;
  std::set<ModuleId> seen{modules_.front().id};
  std::queue<ModuleId> open;
  open.push(modules_.front().id);
  while (!open.empty()) {
    const ModuleId m = open.front();
    open.pop();
    for (const auto& c : connections_) {
      if (!c.involves(m)) continue;
      const ModuleId other = c.a == m ? c.b : c.a;
      if (seen.insert(other).second) open.push(other);
    }
  }
  return seen.size() == modules_.size();
}

void ConfigurationGraph::validate(bool require_connected) const {
  const auto fail = [&](const std::string& why) { throw InvalidConfiguration(name_ + ": " + why); };
  int sensors = 0;
  std::set<Index3> cells;
  for (const auto& m : modules_) {
    if (m.kind == ModuleKind::Sensor) ++sensors;
    if (!cells.insert(m.cell).second) fail("two modules share a lattice cell");
  }
  if (sensors != 1) fail("expected exactly one sensor module, found " + std::to_string(sensors));
  std::set<std::pair<ModuleId, Face>> used;
  for (const auto& c : connections_) {
    const ModuleNode* a = find(c.a);
    const ModuleNode* b = find(c.b);
    if (!a || !b) fail("connection references an unknown module");
    if (c.a == c.b) fail("self connection on module " + std::to_string(c.a));
    if (!kind_has_face(a->kind, c.face_a) || !kind_has_face(b->kind, c.face_b))
      fail("face not available on module kind");
    if (!used.insert({c.a, c.face_a}).second || !used.insert({c.b, c.face_b}).second)
      fail("face used by more than one connection");
    const Index3 na = face_normal(*a, c.face_a);
    const Index3 nb = face_normal(*b, c.face_b);
    const Index3 expected{a->cell.x + na.x, a->cell.y + na.y, a->cell.z + na.z};
    if (expected != b->cell || nb != Index3{-na.x, -na.y, -na.z})
      fail("connection " + std::to_string(c.a) + "." + std::string(to_string(c.face_a)) + " - " +
           std::to_string(c.b) + "." + std::string(to_string(c.face_b)) + " is not geometrically adjacent");
  }
  if (require_connected && !is_connected()) fail("graph is not connected");
}

std::optional<std::map<ModuleId, ModuleId>> find_isomorphism(const ConfigurationGraph& from,
                                                             const ConfigurationGraph& to) {
  if (from.modules().size() != to.modules().size() ||
      from.connections().size() != to.connections().size())
    return std::nullopt;

  std::vector<ModuleId> order;
  for (const auto& m : from.modules()) order.push_back(m.id);

  std::map<ModuleId, ModuleId> forward;
  std::set<ModuleId> taken;

  // Every edge between already-mapped modules must exist in `to` with the same faces.
  const auto consistent = [&](ModuleId m) {
    for (const auto& c : from.connections()) {
      if (!c.involves(m)) continue;
      const ModuleId other = c.a == m ? c.b : c.a;
      if (!forward.count(other)) continue;
      const auto target = to.connection_at(forward.at(c.a), c.face_a);
      if (!target) return false;
      const bool match = (target->a == forward.at(c.a) && target->face_a == c.face_a &&
                          target->b == forward.at(c.b) && target->face_b == c.face_b) ||
                         (target->b == forward.at(c.a) && target->face_b == c.face_a &&
                          target->a == forward.at(c.b) && target->face_a == c.face_b);
      if (!match) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t i) {
    if (i == order.size()) return true;
    const ModuleId m = order[i];
    const ModuleNode* node = from.find(m);
    const auto faces = used_faces(from, m);
    std::vector<ModuleId> candidates;
    if (to.find(m)) candidates.push_back(m);
    for (const auto& n : to.modules())
      if (n.id != m) candidates.push_back(n.id);
    for (ModuleId cand : candidates) {
      if (taken.count(cand)) continue;
      if (to.find(cand)->kind != node->kind || used_faces(to, cand) != faces) continue;
      forward[m] = cand;
      taken.insert(cand);
      if (consistent(m) && extend(i + 1)) return true;
      forward.erase(m);
      taken.erase(cand);
    }
    return false;
  };

  if (!extend(0)) return std::nullopt;
  return forward;
}

}  // namespace msrr
