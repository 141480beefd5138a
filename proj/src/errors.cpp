#include "pergraph/errors.hpp"

namespace pergraph {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid periodic specification";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace pergraph
