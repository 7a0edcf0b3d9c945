#pragma once

#include <stdexcept>
#include <string>

namespace resid_edf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Fewer complete cases than the operation needs.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// No complete case received positive kernel weight at the query point,
/// even after the bandwidth inflation cap was reached.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// The localized design stayed rank deficient after the inflation cap.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be strictly positive came out as zero
/// (e.g. a residual scale used for standardization).
class DegenerateScale : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed to reach the requested tolerance.
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace resid_edf
