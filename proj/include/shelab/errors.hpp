#pragma once

#include <stdexcept>
#include <string>

namespace shelab {

/// Invalid argument outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or incomplete run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature or factorisation failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Allocation request above the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state produced by the explicit spatial integrator.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, double z, double radius)
      : std::runtime_error(what), z_(z), radius_(radius) {}
  double z() const { return z_; }
  double spectral_radius() const { return radius_; }

 private:
  double z_;
  double radius_;
};

}  // namespace shelab
