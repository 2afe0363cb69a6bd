#pragma once

#include <stdexcept>
#include <string>

namespace cat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unreadable files, parse failures, invalid shapes.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A quantity the estimators cannot handle, e.g. a zero variance that would
/// feed a log, or duplicate points beyond the jitter capacity.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Constraint set admits no directed spanning tree.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument outside its documented domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cat
