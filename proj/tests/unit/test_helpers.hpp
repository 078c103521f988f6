#pragma once

#include <random>

#include "qthp/quantum_core.hpp"

namespace qthp::testing {

inline StrategyParams random_params(std::mt19937_64& rng, int dims = 3) {
  std::uniform_real_distribution<double> th(-kPi, kPi);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  return StrategyParams::make(th(rng), dims > 1 ? ph(rng) : 0.0, dims > 2 ? ph(rng) : 0.0, dims);
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace qthp::testing
