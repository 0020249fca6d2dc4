#pragma once

#include <stdexcept>

namespace cyclephase {

// Unusable input: unreadable/malformed files, empty or insufficient data.
// CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that cannot proceed numerically (unstable filter design,
// zero-variance signal, degenerate circular mean). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cyclephase
