#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace finsheaf {

enum class ErrorKind {
  // finspace
  MinOpenNotOpen,
  NotT0,
  PointMissingFromOwnNeighborhood,
  UnknownPoint,
  SpaceTooLarge,
  // finalg
  NotPrime,
  InvalidPolynomial,
  InvalidArgument,
  NonSquare,
  NotAField,
  RingAxiomViolated,
  // presheaf / vecsheaf / grassmann
  InvalidMorphism,
  InvalidPresheaf,
  CocycleConditionViolated,
  InvalidWeights,
  TrivializationMismatch,
  NotLocallyFree,
  SearchBudgetExceeded,
  // io
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_budget() const noexcept {
    return kind_ == ErrorKind::SearchBudgetExceeded || kind_ == ErrorKind::SpaceTooLarge;
  }

 private:
  ErrorKind kind_;
};

/// Counts visited states of an exhaustive search and throws once the limit is hit.
class SearchBudget {
 public:
  explicit SearchBudget(std::size_t limit = 1'000'000) : limit_(limit) {}

  void charge(std::size_t states = 1) {
    used_ += states;
    if (used_ > limit_) {
      throw Error(ErrorKind::SearchBudgetExceeded,
                  "search exceeded " + std::to_string(limit_) + " states");
    }
  }

  std::size_t used() const noexcept { return used_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

}  // namespace finsheaf
