#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace rlab {

// Shortest decimal form that round-trips the exact double, so serialized
// artifacts are byte-stable across runs.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string format_significant(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

}  // namespace rlab
