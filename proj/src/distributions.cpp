#include "qthp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qthp/errors.hpp"

namespace qthp {

double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

constexpr double kAsymptoticSwitch = 15.0;

bool use_asymptotic(double nu, double x) {
  return x >= kAsymptoticSwitch && x >= 2.0 * nu * nu;
}

// sum_k (x/2)^{2k} / (k! Gamma(k+nu+1)) * prefactor, with prefactor folded into
// the first term. All terms are positive, so there is no cancellation.
double series_from(double first, double nu, double x) {
  const double q = 0.25 * x * x;
  double term = first;
  double sum = first;
  for (int k = 0; k < 10000; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

// e^{-x} I_nu(x) from the large-argument expansion
// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k prod_{j<=k}(mu - (2j-1)^2) / (k! (8x)^k).
double asymptotic_scaled(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (std::abs(term) >= last) break;  // divergent tail
    sum += term;
    last = std::abs(term);
    if (last <= 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(kTwoPi * x);
}

void check_bessel_args(double nu, double x) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("Bessel order must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("Bessel argument must be >= 0");
}

// log(I_nu(x) / x^nu), finite down to x = 0.
double log_bessel_i_over_power(double nu, double x) {
  if (!use_asymptotic(nu, x)) {
    const double first = std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0));
    return std::log(series_from(first, nu, x));
  }
  return std::log(asymptotic_scaled(nu, x)) + x - nu * std::log(x);
}

}  // namespace

double bessel_i_scaled(double nu, double x) {
  check_bessel_args(nu, x);
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (use_asymptotic(nu, x)) return asymptotic_scaled(nu, x);
  const double first = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) - x);
  return series_from(first, nu, x);
}

double bessel_i(double nu, double x) {
  check_bessel_args(nu, x);
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  double value;
  if (use_asymptotic(nu, x)) {
    value = asymptotic_scaled(nu, x) * std::exp(x);
  } else {
    const double first = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    value = series_from(first, nu, x);
  }
  if (!std::isfinite(value)) {
    throw std::overflow_error("bessel_i overflows at x = " + std::to_string(x));
  }
  return value;
}

double vm_mean_resultant_length(double kappa) {
  return bessel_i_scaled(1.0, kappa) / bessel_i_scaled(0.0, kappa);
}

double vm_normalization(double kappa) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (kappa == 0.0) return 1.0 / kTwoPi;
  return 1.0 / (kTwoPi * bessel_i(0.0, kappa));
}

double vm_density(double x, double mu, double kappa) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (kappa == 0.0) return 1.0 / kTwoPi;
  // c_2 e^{kappa cos} written with the scaled Bessel so large kappa stays finite.
  return std::exp(kappa * (std::cos(x - mu) - 1.0)) / (kTwoPi * bessel_i_scaled(0.0, kappa));
}

TrembleSpec TrembleSpec::make(const StrategyParams& center, double kappa) {
  TrembleSpec spec{center, kappa, center.dims()};
  validate(spec);
  return spec;
}

void validate(const TrembleSpec& spec) {
  if (!(spec.kappa >= 0.0) || !std::isfinite(spec.kappa)) {
    throw ConfigError("tremble kappa must be finite and >= 0");
  }
  if (spec.dims < 1 || spec.dims > 3) throw ConfigError("tremble dims must be 1, 2 or 3");
  if (spec.dims != spec.center.dims()) {
    throw ConfigError("tremble dims does not match its center's dims");
  }
}

double torus_vm_density(const StrategyParams& point, const TrembleSpec& spec) {
  validate(spec);
  if (point.dims() != spec.dims) {
    throw ConfigError("point has " + std::to_string(point.dims()) + " active parameters, tremble has " +
                      std::to_string(spec.dims));
  }
  double density = 1.0;
  for (int i = 0; i < spec.dims; ++i) {
    density *= vm_density(point.coord(i), spec.center.coord(i), spec.kappa);
  }
  return density;
}

SphereDirection::SphereDirection(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw ConfigError("sphere direction needs at least 2 coordinates");
  const double n2 = std::inner_product(coords_.begin(), coords_.end(), coords_.begin(), 0.0);
  if (std::abs(std::sqrt(n2) - 1.0) > kConstructionTol) {
    throw ConfigError("sphere direction is not a unit vector");
  }
}

SphereDirection SphereDirection::normalized(std::vector<double> coords) {
  const double n = std::sqrt(std::inner_product(coords.begin(), coords.end(), coords.begin(), 0.0));
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("cannot normalize a zero vector");
  for (double& c : coords) c /= n;
  return SphereDirection(std::move(coords));
}

double vmf_normalization(double kappa, int p) {
  if (p < 2) throw ConfigError("vMF dimension p must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be finite and >= 0");
  const double half = 0.5 * p;
  if (kappa == 0.0) {
    // 1 / |S^{p-1}| = Gamma(p/2) / (2 pi^{p/2})
    return std::exp(std::lgamma(half) - std::log(2.0) - half * std::log(kPi));
  }
  const double nu = half - 1.0;
  return std::exp(-half * std::log(kTwoPi) - log_bessel_i_over_power(nu, kappa));
}

double vmf_density(const SphereDirection& x, const SphereDirection& x0, double kappa, int p) {
  if (x.dim() != p || x0.dim() != p) {
    throw ConfigError("vMF directions must both have dimension p = " + std::to_string(p));
  }
  const auto a = x.coords();
  const auto b = x0.coords();
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  if (kappa == 0.0) return vmf_normalization(0.0, p);
  const double nu = 0.5 * p - 1.0;
  // log c_p + kappa dot, kept in log space so neither factor overflows alone.
  const double log_c = -0.5 * p * std::log(kTwoPi) - log_bessel_i_over_power(nu, kappa);
  return std::exp(log_c + kappa * dot);
}

double sample_vm(Rng& rng, double theta0, double kappa) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  double angle;
  if (kappa == 0.0) {
    angle = kTwoPi * uniform_open01(rng) - kPi;
  } else {
    // Best & Fisher (1979). tau - sqrt(2 tau) is rewritten to avoid
    // cancellation at small kappa.
    const double root = std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double tau = 1.0 + root;
    const double tau_minus_two = 4.0 * kappa * kappa / (root + 1.0);
    const double rho = tau * tau_minus_two / (tau + std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    double f;
    for (;;) {
      const double u1 = uniform_open01(rng);
      const double u2 = uniform_open01(rng);
      const double z = std::cos(kPi * u1);
      f = (1.0 + r * z) / (r + z);
      const double c = kappa * (r - f);
      if (c * (2.0 - c) - u2 > 0.0) break;
      if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double u3 = uniform_open01(rng);
    const double offset = std::acos(std::clamp(f, -1.0, 1.0));
    angle = theta0 + (u3 > 0.5 ? offset : -offset);
  }
  angle = std::remainder(angle, kTwoPi);
  if (angle >= kPi) angle -= kTwoPi;
  return angle;
}

StrategyParams sample_torus(Rng& rng, const TrembleSpec& spec) {
  validate(spec);
  double coords[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < spec.dims; ++i) coords[i] = sample_vm(rng, spec.center.coord(i), spec.kappa);
  return StrategyParams::make(coords[0], coords[1], coords[2], spec.dims);
}

}  // namespace qthp
