#pragma once

#include <stdexcept>
#include <string>

namespace tunnel {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates an operation precondition.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Failures of a numerical procedure on otherwise valid input. The CLI maps
/// every subclass to the same exit status.
class NumericalError : public Error {
public:
  using Error::Error;
};

class GridTooCoarse : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class OutOfRange : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class UnderflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NormalizationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ResolutionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotAsymptotic : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// A setup or experiment configuration violates one of its bounds.
class ConfigurationError : public InvalidParameter {
public:
  using InvalidParameter::InvalidParameter;
};

/// Malformed configuration text.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace tunnel
