#pragma once

#include <stdexcept>
#include <string>

namespace orthoglide {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input: bad geometry, bad config keys, bad labels.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation that is well-posed in general but has no answer for these
/// particular numbers (unreachable pose, singular matrix, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public NumericalError {
 public:
  UnreachableError(int leg, const std::string& what) : NumericalError(what), leg_(leg) {}
  int leg() const noexcept { return leg_; }

 private:
  int leg_;
};

class InconsistentJointsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateJointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconsistentPoseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularConfigurationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GaugeOffLegError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace orthoglide
