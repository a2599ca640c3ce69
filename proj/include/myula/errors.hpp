#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace myula {

/// Geometric precondition on a body failed (e.g. origin not interior).
class InvalidBody : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model could not be built (non-SPD matrix, rank-deficient design).
class InvalidModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sampler was asked to step from a state that violates its precondition.
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside the admissible interval of a closed-form bound.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double lo, double hi, bool hi_closed)
      : std::domain_error(what), lower_(lo), upper_(hi), upper_closed_(hi_closed) {}

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool upper_closed() const { return upper_closed_; }

 private:
  double lower_;
  double upper_;
  bool upper_closed_;
};

/// Strong convexity was required but the potential has none.
class StrongConvexityRequired : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The chain produced a non-finite or exploding coordinate.
class DivergedChain : public std::runtime_error {
 public:
  DivergedChain(const std::string& what, std::uint64_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  std::uint64_t iteration() const { return iteration_; }

 private:
  std::uint64_t iteration_;
};

/// An annealing ratio left the representable range.
class ScheduleTooCoarse : public std::runtime_error {
 public:
  ScheduleTooCoarse(const std::string& what, std::size_t phase)
      : std::runtime_error(what), phase_(phase) {}
  std::size_t phase() const { return phase_; }

 private:
  std::size_t phase_;
};

}  // namespace myula
