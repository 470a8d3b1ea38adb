#pragma once

#include <stdexcept>
#include <string>

namespace hybridcap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter object violates its invariants (e.g. sigma <= 0).
class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its subdivision budget.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// An integrand returned NaN or infinity.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// The requested closed form does not exist for this configuration.
class UnsupportedMode : public Error {
 public:
  using Error::Error;
};

/// The quantity is undefined at this input (e.g. normalizing a zero density).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A formula's denominator vanishes.
class Singularity : public Error {
 public:
  using Error::Error;
};

/// An inverse trigonometric argument lies outside [-1, 1].
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Too many samples fall outside a histogram range.
class InsufficientCoverage : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridcap
