#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ops_ftrl {

// Point outside the domain of a loss, barrier or dual objective.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input: bad market vector, dimension mismatch, bad CSV cell.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid algorithm or experiment configuration (e.g. learning rate too large).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// State machine driven outside its contract (e.g. past the declared horizon).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterative solver did not reach its tolerance. Carries the last iterate so
// the failure can be reproduced.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_iterate, double residual,
              std::size_t iterations)
      : std::runtime_error(what),
        last_iterate_(last_iterate),
        residual_(residual),
        iterations_(iterations) {}

  double last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double last_iterate_;
  double residual_;
  std::size_t iterations_;
};

}  // namespace ops_ftrl
