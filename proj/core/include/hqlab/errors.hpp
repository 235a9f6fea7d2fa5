#pragma once

#include <stdexcept>
#include <string>

namespace hqlab {

/// Thrown when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a value leaves the admissible cone. Carries the first
/// symmetric-function level whose sign failed (1-based, 0 if unknown).
class ConeViolation : public std::domain_error {
 public:
  ConeViolation(const std::string& what, int failing_level, double min_sigma)
      : std::domain_error(what),
        failing_level_(failing_level),
        min_sigma_(min_sigma) {}

  int failing_level() const { return failing_level_; }
  double min_sigma() const { return min_sigma_; }

 private:
  int failing_level_ = 0;
  double min_sigma_ = 0.0;
};

/// Rejection sampling gave up: the constraint set is (numerically) empty.
class SamplingExhausted : public std::runtime_error {
 public:
  SamplingExhausted(const std::string& what, std::uint64_t proposals,
                    std::uint64_t accepted)
      : std::runtime_error(what), proposals_(proposals), accepted_(accepted) {}

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Newton iteration failed to converge (line-search underflow or iteration cap).
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linearized system could not be factorized.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hqlab
