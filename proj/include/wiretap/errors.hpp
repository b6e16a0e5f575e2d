#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

/// Malformed arguments: shape mismatches, non-PSD covariances, bad configs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A channel realization that is rank deficient where a generic one is assumed.
class DegenerateChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The antenna configuration admits no positive secure degrees of freedom.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical solver did not reach its accuracy target.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wiretap
