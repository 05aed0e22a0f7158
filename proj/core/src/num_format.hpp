#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "cfmgml/errors.hpp"

namespace cfmgml::detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const char* begin, const char* end,
                           const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(where + ": invalid number '" + std::string(begin, end) + "'");
  return v;
}

}  // namespace cfmgml::detail
