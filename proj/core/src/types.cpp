#include "msrr/types.hpp"

#include <array>
#include <utility>

namespace msrr {
namespace {

constexpr std::array<std::pair<Color, std::string_view>, 8> kColorNames{{
    {Color::None, "none"},
    {Color::Red, "red"},
    {Color::Green, "green"},
    {Color::Blue, "blue"},
    {Color::Pink, "pink"},
    {Color::Yellow, "yellow"},
    {Color::Orange, "orange"},
    {Color::Gray, "gray"},
}};

constexpr std::array<std::pair<EnvironmentType, std::string_view>, 4> kEnvNames{{
    {EnvironmentType::Free, "free"},
    {EnvironmentType::Tunnel, "tunnel"},
    {EnvironmentType::High, "high"},
    {EnvironmentType::Stairs, "stairs"},
}};

}  // namespace

std::string_view to_string(Color c) {
  for (const auto& [color, name] : kColorNames)
    if (color == c) return name;
  return "none";
}

Color parse_color(std::string_view name) {
  for (const auto& [color, n] : kColorNames)
    if (n == name) return color;
  throw ParseError("unknown color '" + std::string(name) + "'");
}

std::string_view to_string(EnvironmentType t) {
  for (const auto& [env, name] : kEnvNames)
    if (env == t) return name;
  return "free";
}

std::optional<EnvironmentType> parse_environment_type(std::string_view name) {
  for (const auto& [env, n] : kEnvNames)
    if (n == name) return env;
  return std::nullopt;
}

}  // namespace msrr
