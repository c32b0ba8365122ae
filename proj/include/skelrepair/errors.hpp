#pragma once

#include <stdexcept>
#include <string>

namespace skelrepair {

// Each class maps to one CLI exit code (see tools/skelrepair.cpp).

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when two rasters that must share dimensions do not.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace skelrepair
