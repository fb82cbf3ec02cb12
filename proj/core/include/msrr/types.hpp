#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace msrr {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the offending line (1-based, 0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Color labels carried by solid voxels and perceived objects.
enum class Color : std::uint8_t { None = 0, Red, Green, Blue, Pink, Yellow, Orange, Gray };

std::string_view to_string(Color c);
/// Throws ParseError for an unknown name. "none" maps to Color::None.
Color parse_color(std::string_view name);

/// Discrete terrain classes around an object of interest.
enum class EnvironmentType : std::uint8_t { Free, Tunnel, High, Stairs };

inline constexpr EnvironmentType kAllEnvironmentTypes[] = {
    EnvironmentType::Free, EnvironmentType::Tunnel, EnvironmentType::High, EnvironmentType::Stairs};

std::string_view to_string(EnvironmentType t);
std::optional<EnvironmentType> parse_environment_type(std::string_view name);

using ModuleId = int;

}  // namespace msrr
