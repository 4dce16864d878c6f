#pragma once

#include <stdexcept>
#include <string>

namespace svdg {

/// Data-dependent numerical failure: degenerate geometry, broken Delaunay
/// criterion, solver breakdown. Distinct from std::invalid_argument, which
/// signals a violated call contract.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while reading or writing grid/report files.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace svdg
