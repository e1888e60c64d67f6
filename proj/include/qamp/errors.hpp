#pragma once

#include <stdexcept>
#include <string>

namespace qamp {

// Thrown when an input violates a documented precondition. Messages name the
// violated check and, where it applies, the measured residual.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string &what)
        : std::invalid_argument(what) {}
};

// Thrown when a request exceeds a simulation capacity limit (dimension or
// branch caps). The message states the budget that would be needed.
class CapacityError : public std::runtime_error {
  public:
    explicit CapacityError(const std::string &what)
        : std::runtime_error(what) {}
};

} // namespace qamp
