#pragma once

#include <stdexcept>
#include <string>

namespace stickperm {

/// Malformed input: bad model spec, bad config, inconsistent case tag.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, root bracketing, truncation) failed to
/// reach its tolerance. Carries the residual it stopped at.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace stickperm
