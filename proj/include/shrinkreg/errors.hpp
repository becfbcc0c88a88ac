#pragma once

#include <stdexcept>
#include <string>

namespace shrinkreg {

/// Raised when caller-supplied parameters violate a precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace shrinkreg
