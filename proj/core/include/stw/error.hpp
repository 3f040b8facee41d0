#pragma once

#include <stdexcept>
#include <string>

namespace stw {

/// Bad input: mismatched moduli or dimensions, non-prime modulus, out-of-range parameters.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured enumeration or flag budget would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An identity that must hold exactly did not. Always a bug or a bad rank engine configuration.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configured modular primes disagree on a rank; rerun with exact arithmetic.
class RankDisagreement : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

}  // namespace stw
