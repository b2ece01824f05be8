#pragma once

#include <stdexcept>
#include <string>

namespace hslg {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monte Carlo estimate unusable (too few effective samples, no successes, ...).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request outside the supported budget (enumeration size, replica count).
struct RefusalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pathwise invariant failed; indicates a bug rather than bad input.
struct InvariantBreach : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace hslg
