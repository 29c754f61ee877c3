#pragma once

#include <stdexcept>
#include <string>

namespace isodyn {

/// A field was evaluated inside the guard radius of its singularity.
class SingularPoint : public std::domain_error {
 public:
  explicit SingularPoint(const std::string& what) : std::domain_error(what) {}
};

/// Conic analysis needs a nonzero charge to build N = K + (alpha/q) J.
class DegenerateCharge : public std::domain_error {
 public:
  explicit DegenerateCharge(const std::string& what) : std::domain_error(what) {}
};

/// Scenario or configuration rejected before running.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace isodyn
