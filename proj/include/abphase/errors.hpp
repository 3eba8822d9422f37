#pragma once

#include <stdexcept>
#include <string>

namespace abphase {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A worldline whose frame time does not strictly increase along its parameter.
class NonMonotoneTime : public Error {
 public:
  using Error::Error;
};

/// Invalid physical domain, e.g. a boost with |v| >= c.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Scenario geometry that violates its invariants.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Nonzero electromagnetic field sampled on a particle path (strict mode only).
class FieldOnPath : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its depth or panel budget above tolerance.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double residual, long panels)
      : Error(what), residual_(residual), panels_(panels) {}

  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] long panels() const noexcept { return panels_; }

 private:
  double residual_;
  long panels_;
};

/// Configuration file or command-line schema violation. The path names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : Error(path.empty() ? msg : path + ": " + msg), path_(path) {}

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace abphase
