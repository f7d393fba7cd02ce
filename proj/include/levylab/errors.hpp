#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levylab {

// Base of every error raised by the toolkit. `kind()` is the short tag the
// CLI prints in its structured error line.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

class DomainError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain error"; }
};

class ArgumentError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument error"; }
};

class ConfigError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "config error"; }
};

class GeometryError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "geometry error"; }
};

class CapabilityError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "capability error"; }
};

// Numerical failure. Carries the tolerance that was actually reached and,
// for iterative solvers, the residual history.
class NumericError : public Error {
public:
  NumericError(const std::string& what, double achieved, std::vector<double> history = {})
      : Error(what), achieved_(achieved), history_(std::move(history)) {}
  const char* kind() const noexcept override { return "numeric error"; }
  double achieved() const noexcept { return achieved_; }
  const std::vector<double>& history() const noexcept { return history_; }

private:
  double achieved_;
  std::vector<double> history_;
};

}  // namespace levylab
