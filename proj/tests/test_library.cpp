#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "msrr/library.hpp"

using namespace msrr;

namespace {

const char* kTiny = R"({
  "configurations": [
    {"name": "Solo", "modules": [{"id": 1, "kind": "sensor", "cell": [0, 0, 0]},
                                 {"id": 2, "kind": "body", "cell": [-1, 0, 0], "yaw": 270}],
     "connections": [[1, "back", 2, "left"]]}
  ],
  "entries": [
    {"configuration": "Solo", "properties": ["drop"], "environments": ["free"],
     "behavior": {"name": "drop", "kind": "effect", "effect": "drop"}, "values": {"reach": 0.2}}
  ]
})";

std::vector<std::string> labels(const std::vector<LibraryEntry>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(e.label());
  return out;
}

}  // namespace

TEST_CASE("query equals a linear scan over every property and environment") {
  const Library& lib = fixture::library();
  std::set<std::string> props;
  for (const auto& e : lib.entries()) props.insert(e.properties.begin(), e.properties.end());
  props.insert("no_such_property");
  for (const auto& p : props)
    for (EnvironmentType t : kAllEnvironmentTypes) {
      std::vector<std::string> want;
      for (const auto& e : lib.entries())
        if (e.properties.count(p) && e.environments.count(t)) want.push_back(e.label());
      CHECK(labels(lib.query(p, t)) == want);
    }
}

TEST_CASE("the default library answers the mission queries") {
  const Library& lib = fixture::library();
  CHECK(labels(lib.query("drop", EnvironmentType::Stairs)) == std::vector<std::string>{"Snake.drop"});
  CHECK(labels(lib.query("pickUp", EnvironmentType::Tunnel)) == std::vector<std::string>{"Proboscis.pickUp"});
  CHECK(labels(lib.query("highReach", EnvironmentType::High)) == std::vector<std::string>{"Proboscis.highReach"});
  CHECK(labels(lib.query("drive", EnvironmentType::Free)) == std::vector<std::string>{"Car.drive", "Scorpion.drive"});
  CHECK(lib.query("climbUp", EnvironmentType::Free).empty());
  CHECK(lib.configurations().size() == 4);
  for (const auto& g : lib.configurations()) {
    CHECK(g.modules().size() == 5);
    CHECK_NOTHROW(g.validate());
  }
  CHECK(lib.entries_for_configuration("Snake").size() == 3);
  CHECK_THROWS_AS(lib.entries_for_configuration("Tripod"), UnknownConfiguration);
  CHECK_THROWS_AS(lib.configuration("Tripod"), UnknownConfiguration);
}

TEST_CASE("save and parse round-trip") {
  const Library& lib = fixture::library();
  const std::string text = save_library(lib);
  const Library back = parse_library(text);
  CHECK(back == lib);
  CHECK(save_library(back) == text);
  const Library tiny = parse_library(kTiny);
  CHECK(parse_library(save_library(tiny)) == tiny);
  CHECK(tiny.entries()[0].value_or("reach", 0.0) == doctest::Approx(0.2));
  CHECK(tiny.entries()[0].value_or("max_height", 7.0) == doctest::Approx(7.0));
}

TEST_CASE("an empty document is an empty library") {
  CHECK(parse_library("").entries().empty());
  CHECK(parse_library("  \n").configurations().empty());
}

TEST_CASE("malformed libraries are parse errors") {
  try {
    parse_library("{\n  \"configurations\": [\n  ,]\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::string bad = kTiny;
  CHECK_THROWS_AS(parse_library(std::string(bad).replace(bad.find("\"effect\": \"drop\""), 16, "\"effect\": \"fly\"")),
                  ParseError);
  CHECK_THROWS_AS(parse_library(std::string(bad).replace(bad.find("\"free\""), 6, "\"swamp\"")), ParseError);
  CHECK_THROWS_AS(parse_library(std::string(bad).replace(bad.find("\"configuration\": \"Solo\""), 23,
                                                         "\"configuration\": \"Duo\"")),
                  ParseError);
  CHECK_THROWS_AS(parse_library(std::string(bad).replace(bad.find("\"yaw\": 270"), 10, "\"yaw\": 45")), ParseError);
  CHECK_THROWS_AS(parse_library(std::string(bad).replace(bad.find("\"left\""), 6, "\"front\"")), ParseError);
}

TEST_CASE("entries must be executable by their configuration") {
  Library lib = parse_library(kTiny);
  LibraryEntry e = lib.entries()[0];
  e.behavior.script.push_back({0.0, 9, "pan", 0.3});
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  e = lib.entries()[0];
  e.properties.clear();
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  e = lib.entries()[0];
  e.environments.clear();
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  e = lib.entries()[0];
  e.behavior.kind = BehaviorKind::Parametric;
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  e.behavior.parameters.push_back({"speed", 1.0, 0.0});
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  e = lib.entries()[0];
  e.behavior.kind = BehaviorKind::Static;
  CHECK_THROWS_AS(lib.add_entry(e), Error);
  CHECK_THROWS_AS(lib.add_configuration(lib.configuration("Solo")), Error);
}

TEST_CASE("configuration invariants") {
  ConfigurationGraph g("Pair");
  g.add_module({1, ModuleKind::Sensor, {0, 0, 0}, 0});
  g.add_module({2, ModuleKind::Body, {-1, 0, 0}, 3});
  CHECK_THROWS_AS(g.add_module({2, ModuleKind::Cube, {5, 5, 0}, 0}), InvalidConfiguration);
  CHECK_THROWS_AS(g.validate(), InvalidConfiguration);  // disconnected
  CHECK_NOTHROW(g.validate(false));
  g.connect({1, Face::Back, 2, Face::Left});
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS(g.connect({1, Face::Back, 2, Face::Right}), InvalidConfiguration);
  CHECK(g.degree(1) == 1);
  CHECK(g.sensor_id() == 1);

  ConfigurationGraph skew = g;
  skew.find(2)->cell = {-1, 1, 0};
  CHECK_THROWS_AS(skew.validate(), InvalidConfiguration);

  ConfigurationGraph two = g;
  two.add_module({3, ModuleKind::Sensor, {-2, 0, 0}, 0});
  CHECK_THROWS_AS(two.validate(false), InvalidConfiguration);

  CHECK(g.disconnect(2, Face::Left));
  CHECK_FALSE(g.disconnect(2, Face::Left));
  CHECK_FALSE(g.is_connected());
}

TEST_CASE("isomorphism ignores module numbering but not structure") {
  const Library& lib = fixture::library();
  const ConfigurationGraph& car = lib.configuration("Car");
  std::vector<ModuleId> ids;
  for (const auto& m : car.modules()) ids.push_back(m.id);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ModuleId> perm = ids;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::map<ModuleId, ModuleId> rename;
    for (std::size_t i = 0; i < ids.size(); ++i) rename[ids[i]] = perm[i] + 100;
    ConfigurationGraph r("Renamed");
    for (auto m : car.modules()) {
      m.id = rename[m.id];
      r.add_module(m);
    }
    for (auto c : car.connections()) r.connect({rename[c.a], c.face_a, rename[c.b], c.face_b});
    const auto iso = find_isomorphism(car, r);
    REQUIRE(iso);
    for (const auto& c : car.connections()) CHECK(r.connection_at(iso->at(c.a), c.face_a));
  }
  for (const auto& other : lib.configurations())
    if (other.name() != "Car") CHECK_FALSE(find_isomorphism(car, other));
}
