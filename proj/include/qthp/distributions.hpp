#pragma once

// Circular (von Mises) and spherical (von Mises-Fisher) densities used as
// tremble distributions, their Bessel normalizations, and exact samplers.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qthp/quantum_core.hpp"

namespace qthp {

using Rng = std::mt19937_64;

/// Uniform double on the open interval (0, 1), built from the top 53 bits.
double uniform_open01(Rng& rng);

/// Modified Bessel function of the first kind I_nu(x), nu >= 0 real, x >= 0.
/// Power series below the switch point, Hankel asymptotic expansion above.
/// Throws std::overflow_error when the result is not representable.
double bessel_i(double nu, double x);

/// e^{-x} I_nu(x); finite for every x >= 0.
double bessel_i_scaled(double nu, double x);

/// Mean resultant length I_1(kappa)/I_0(kappa) of a von Mises distribution.
double vm_mean_resultant_length(double kappa);

/// c_2 = 1 / (2 pi I_0(kappa)).
double vm_normalization(double kappa);

/// Von Mises density on the circle, c_2 exp(kappa cos(x - mu)).
double vm_density(double x, double mu, double kappa);

/// Product of von Mises factors centered at `center` on the active coordinates.
struct TrembleSpec {
  StrategyParams center;
  double kappa = 0.0;
  int dims = 1;

  /// dims taken from the center.
  static TrembleSpec make(const StrategyParams& center, double kappa);
};

/// Throws ConfigError for kappa < 0 (or non-finite) or a dims mismatch.
void validate(const TrembleSpec& spec);

/// c_2^d exp(kappa sum_i cos(x_i - x0_i)) over the d active coordinates, with
/// respect to the flat measure on the d-torus.
double torus_vm_density(const StrategyParams& point, const TrembleSpec& spec);

/// Unit vector in R^p.
class SphereDirection {
 public:
  /// Throws ConfigError if |coords| deviates from 1 by more than 1e-12.
  explicit SphereDirection(std::vector<double> coords);
  /// Rescales a nonzero vector to unit length.
  static SphereDirection normalized(std::vector<double> coords);

  std::span<const double> coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

 private:
  std::vector<double> coords_;
};

/// c_p(kappa) = kappa^{p/2-1} / ((2 pi)^{p/2} I_{p/2-1}(kappa)); at kappa = 0
/// the inverse surface area of S^{p-1}.
double vmf_normalization(double kappa, int p);

/// c_p(kappa) exp(kappa x . x0) with respect to the surface measure of S^{p-1}.
double vmf_density(const SphereDirection& x, const SphereDirection& x0, double kappa, int p);

/// Best-Fisher rejection sampler; kappa = 0 gives uniform. Result in [-pi, pi).
double sample_vm(Rng& rng, double theta0, double kappa);

/// Independent von Mises draws on each active coordinate, canonicalized.
StrategyParams sample_torus(Rng& rng, const TrembleSpec& spec);

}  // namespace qthp
