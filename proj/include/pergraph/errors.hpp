#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pergraph {

/// \brief Malformed arguments or inputs (unknown vertex, bad exponent, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// \brief A periodicity specification failed one or more structural checks.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// \brief A numerical procedure ran out of budget before reaching a verdict.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pergraph
