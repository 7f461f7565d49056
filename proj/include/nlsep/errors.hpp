#ifndef NLSEP_ERRORS_HPP
#define NLSEP_ERRORS_HPP

#include <cstddef>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace nlsep {

/// Invalid parameters or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated snapshot file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The implicit stage system did not converge within the iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double residual, int iterations,
                   std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(Describe(residual, iterations, step)),
        residual_(residual),
        iterations_(iterations),
        step_(step) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }
  std::optional<std::size_t> step() const { return step_; }

  ConvergenceError AtStep(std::size_t step) const {
    return ConvergenceError(residual_, iterations_, step);
  }

 private:
  static std::string Describe(double residual, int iterations,
                              std::optional<std::size_t> step) {
    char res[32];
    std::snprintf(res, sizeof(res), "%.3e", residual);
    std::string msg = "fixed-point iteration did not converge after " +
                      std::to_string(iterations) + " iterations (residual " +
                      res + ")";
    if (step) msg += " at step " + std::to_string(*step);
    return msg;
  }

  double residual_;
  int iterations_;
  std::optional<std::size_t> step_;
};

}  // namespace nlsep

#endif  // NLSEP_ERRORS_HPP
