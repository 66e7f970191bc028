#pragma once

#include <stdexcept>
#include <string>

namespace sobol_eff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Var(Y) is (numerically) zero, so the index is undefined.
class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class InvalidLevel : public Error {
 public:
  using Error::Error;
};

class InvalidK : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A model lacks the analytic truth needed by a verification routine.
class MissingTruth : public Error {
 public:
  using Error::Error;
};

/// Malformed samples, configuration values out of range, unknown names.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace sobol_eff
