#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace tsvf {

/// Operand shapes are incompatible with the requested operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A normalizing trace is too close to zero for the result to mean anything.
class DegenerateStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IntegrationDiverged : public std::runtime_error {
 public:
  explicit IntegrationDiverged(std::size_t step)
      : std::runtime_error("integration diverged: non-finite state at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

using WarningSink = std::function<void(const std::string&)>;

// Non-fatal diagnostics (positivity loss, non-block-diagonal enlarged states)
// go through a process-wide sink. The default writes to stderr. Calls are
// serialized, so sinks need no locking of their own.
void warn(const std::string& message);

/// Installs a sink and returns the previous one. Passing an empty function
/// restores the default.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace tsvf
