#pragma once

#include <stdexcept>
#include <string>

namespace cfmgml {

// Malformed content in a file we are reading (bad record, bad field,
// out-of-range index). Carries a human-readable location.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure: missing file, unwritable destination.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cfmgml
