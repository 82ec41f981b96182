#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace lrmc {

/// Shortest round-trip decimal representation; deterministic across runs, so
/// CSV outputs of identical results are byte-identical.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace lrmc
