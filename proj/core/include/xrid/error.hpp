#pragma once

#include <stdexcept>
#include <string>

namespace xrid {

/// Data / contract errors surfaced to the CLI as exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training diverged; surfaced to the CLI as exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace xrid
