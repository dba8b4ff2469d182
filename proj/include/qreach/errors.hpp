#pragma once

#include <stdexcept>
#include <string>

namespace qreach {

/// Raised when a right-hand side is evaluated at a coordinate singularity
/// (R or rho at or below its guard).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the integrator; carries the time at which integration stopped.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qreach

namespace qreach {

/// The second theta-derivative of the Hamiltonian vanished, so the maximizing
/// angle is no longer an implicit smooth function of the phase point.
class DegenerateArgmaxError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qreach
