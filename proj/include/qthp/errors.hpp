#pragma once

#include <stdexcept>
#include <string>

namespace qthp {

/// Input rejected at an API boundary (bad dimension, angle domain, weights...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix handed to the protocol is not unitary within the validation gate.
class NotUnitaryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Both ends of a threshold bracket produce the same verdict.
class NoBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature self-check: N and 2N node results disagree beyond tolerance.
class GridTooCoarseError : public std::runtime_error {
 public:
  GridTooCoarseError(const std::string& what, double delta)
      : std::runtime_error(what), delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

}  // namespace qthp
