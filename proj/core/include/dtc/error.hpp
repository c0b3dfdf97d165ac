#pragma once

#include <stdexcept>
#include <string>

namespace dtc {

// Base of every engine failure. `code()` is a stable machine-readable tag
// ("BoundaryUndefined", "OverlapError", ...) that the CLI prints as a single
// diagnostic line; `what()` carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace dtc
