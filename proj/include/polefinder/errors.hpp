#pragma once

#include <stdexcept>
#include <string>

namespace polefinder {

//! Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Input series contains NaN or infinity.
struct NonFiniteInput : Error {
  using Error::Error;
};

//! A band count or smoothing span does not fit the available grid.
struct BandwidthTooLarge : Error {
  using Error::Error;
};

//! Series too short for the requested estimation entry point.
struct SeriesTooShort : Error {
  using Error::Error;
};

//! Every ordinate in a log-periodogram band (or the whole periodogram) is zero.
struct DegenerateBand : Error {
  using Error::Error;
};

//! The autocovariance cannot be embedded in a nonnegative-definite circulant.
struct NotEmbeddable : Error {
  using Error::Error;
};

//! Adaptive quadrature did not reach the requested tolerance.
struct QuadratureFailure : Error {
  using Error::Error;
};

//! Argument outside the mathematical domain of a function.
struct DomainError : Error {
  using Error::Error;
};

//! Plug-in memory estimate is nonpositive where a positive value is required.
struct AlphaNonPositive : Error {
  using Error::Error;
};

//! A user-supplied weight violates a construction-time constraint.
struct InvalidWeight : Error {
  using Error::Error;
};

}  // namespace polefinder
