#ifndef METAPI_ERRORS_HPP
#define METAPI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace metapi {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An argument is outside its admissible range (probability, variance, shape, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The study collection violates a structural requirement (K < 2, bad variance, ...).
class DatasetError : public Error {
 public:
  using Error::Error;
};

/// A method cannot be applied to the dataset at hand (e.g. t with K-2 df at K = 2).
class DegreesOfFreedomError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine failed to deliver the requested accuracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative estimator ran out of iterations; carries the last iterate so the
/// caller can decide on an explicit fallback.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double last_iterate, int iterations)
      : Error(what), last_iterate_(last_iterate), iterations_(iterations) {}

  double last_iterate() const noexcept { return last_iterate_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_iterate_;
  int iterations_;
};

/// Malformed input file (CSV studies, JSON config); message names the offender.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace metapi

#endif  // METAPI_ERRORS_HPP
