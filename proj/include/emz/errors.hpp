#pragma once

#include <stdexcept>
#include <string>

namespace emz {

/// Invalid user input: malformed config, bad observable table, unknown keys.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated mathematical precondition (non-confining potential, domain too
/// small, basis too small for a requested expansion, t < 0, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure past construction: lost orthogonality, defective kernel
/// block, singular Gram matrix, fit with too few usable points.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure: unreadable path, truncated or foreign binary payload.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emz
