#pragma once

#include <stdexcept>
#include <string>

namespace qam {

/// Rejected input: bad parameters, malformed configuration, mismatched grids.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not deliver a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability leaked into the outer edge of the truncated momentum ladder.
class UnderResolvedError : public NumericalError {
 public:
  UnderResolvedError(const std::string& what, double tail_mass)
      : NumericalError(what), tail_mass_(tail_mass) {}
  double tail_mass() const noexcept { return tail_mass_; }

 private:
  double tail_mass_;
};

/// Smooth-gauge construction for band eigenvectors failed (complex potentials).
class GaugeFixingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qam
