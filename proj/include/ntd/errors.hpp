#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ntd {

/// Operand lengths or grid extents do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pivot or filtering coefficient came out zero or non-finite.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, int level, std::size_t index)
      : std::runtime_error(what), level_(level), index_(index) {}

  /// Nesting level where the failure happened (1 = points, 2 = lines, 3 = planes, 0 = ILU0).
  int level() const noexcept { return level_; }
  /// Global row, line or plane index of the offending block.
  std::size_t index() const noexcept { return index_; }

 private:
  int level_;
  std::size_t index_;
};

/// The Krylov iteration produced a non-finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ntd
