#pragma once

#include <stdexcept>
#include <string>

namespace stlasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of matrices or parameter blocks disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// (I - W) is singular or numerically indistinguishable from singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered during an iterative computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// No feasible starting point could be constructed.
class InitializationError : public Error {
 public:
  using Error::Error;
};

/// Reading or aligning input data failed.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Every penalty triple of a cross-validation grid failed.
class SearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace stlasso
