#pragma once

#include <stdexcept>
#include <string>

namespace msim {

/// Base class of every error raised by the simulator core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or physically inconsistent input (config files, geometry,
/// out-of-range arguments).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested timing class has no prediction rule.
class UnsupportedTimingError : public Error {
 public:
  using Error::Error;
};

/// A probability needed for sampling lies outside [0, 1] at the configured
/// phases. Carries the offending joint-table entry.
class ValidityError : public Error {
 public:
  ValidityError(int sigma, int omega, double value, const std::string& what)
      : Error(what), sigma_(sigma), omega_(omega), value_(value) {}

  int sigma() const noexcept { return sigma_; }
  int omega() const noexcept { return omega_; }
  double value() const noexcept { return value_; }

 private:
  int sigma_;
  int omega_;
  double value_;
};

/// Estimation requested on an empty event selection.
class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace msim
