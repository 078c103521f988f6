#pragma once

// Expected payoffs when one or both players' gates are drawn from tremble
// distributions: deterministic torus quadrature, a Monte Carlo cross-check,
// and discrete mixtures over pure/trembled components.

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "qthp/distributions.hpp"
#include "qthp/quantum_core.hpp"

namespace qthp {

struct PureStrategy {
  StrategyParams params;
};

struct TrembledStrategy {
  TrembleSpec spec;
};

using MixtureComponent = std::variant<PureStrategy, TrembledStrategy>;

struct MixtureEntry {
  double weight = 0.0;
  MixtureComponent component;
};

/// What a player actually plays: a pure gate, a smeared gate, or a discrete
/// mixture of those.
class StrategyDistribution {
 public:
  enum class Kind { Pure, Trembled, Mixture };

  static StrategyDistribution pure(const StrategyParams& params);
  static StrategyDistribution trembled(const TrembleSpec& spec);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static StrategyDistribution mixture(std::vector<MixtureEntry> entries);

  Kind kind() const;
  const StrategyParams& pure_params() const;
  const TrembleSpec& tremble() const;
  const std::vector<MixtureEntry>& entries() const;

  /// The distribution as a list of weighted components (one entry unless a mixture).
  std::vector<MixtureEntry> components() const;

 private:
  using Storage = std::variant<PureStrategy, TrembledStrategy, std::vector<MixtureEntry>>;
  explicit StrategyDistribution(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

/// Uniform periodic grid on the d-torus: theta nodes -pi + 2 pi k/N, alpha and
/// beta nodes 2 pi k/N, all weights (2 pi/N)^d.
class QuadratureGrid {
 public:
  QuadratureGrid(int nodes_per_dim, int dims);

  int nodes_per_dim() const { return n_; }
  int dims() const { return dims_; }
  std::size_t size() const;
  double weight() const;
  /// Node value on axis 0 (theta), 1 (alpha) or 2 (beta).
  double node(int axis, int k) const;
  /// Flat index -> strategy point, lexicographic in (theta, alpha, beta).
  StrategyParams point(std::size_t flat) const;

 private:
  int n_;
  int dims_;
};

struct QuadratureOptions {
  int nodes = 64;     // per dimension, d <= 2
  int nodes_3d = 48;  // per dimension, d = 3
  bool self_check = false;
  double self_check_tol = 1e-6;

  QuadratureGrid grid_for(int dims) const;
  QuadratureOptions doubled() const;
};

/// E[U_ia conj(U_kc)] stored at ((i*2 + k)*2 + a)*2 + c. For a pure gate this
/// is U (x) conj(U); the protocol payoff is linear in it for each player.
using GateMoment = std::array<Complex, 16>;

GateMoment gate_moment(const Unitary& u);
/// Trapezoid average over the grid, weights normalized to sum to one.
GateMoment tremble_moment(const TrembleSpec& spec, const QuadratureGrid& grid);
GateMoment distribution_moment(const StrategyDistribution& dist, const QuadratureOptions& opts);

/// E[(A (x) B) rho_i (A (x) B)^dagger] for independent A, B.
QuantumState averaged_final_state(const GateMoment& a, const GateMoment& b);

PayoffPair payoff_from_moments(const GameSpec& game, const GateMoment& a, const GateMoment& b);

/// Payoffs of a pure responder against a fixed (possibly smeared) opponent,
/// with the opponent's side contracted once up front.
class ResponseEvaluator {
 public:
  ResponseEvaluator(const GameSpec& game, Player responder, const GateMoment& opponent);

  PayoffPair payoff(const Unitary& u) const;
  PayoffPair payoff(const StrategyParams& p) const { return payoff(su2(p)); }
  Player responder() const { return responder_; }

 private:
  Player responder_;
  std::array<GateMoment, 2> kernel_;  // indexed by payoff owner
};

/// Factorized quadrature of the continuous-mixture payoff. Pure sides collapse
/// to point evaluation. Throws GridTooCoarseError in self-check mode when the
/// doubled grid moves either payoff by more than opts.self_check_tol.
PayoffPair smeared_payoff(const GameSpec& game, const StrategyDistribution& a,
                          const StrategyDistribution& b, const QuadratureOptions& opts = {});

/// Same integral by direct summation over every pair of nodes. O(N^{2d});
/// used to cross-check the factorized path on small grids.
PayoffPair smeared_payoff_direct(const GameSpec& game, const StrategyDistribution& a,
                                 const StrategyDistribution& b, const QuadratureOptions& opts);

struct McEstimate {
  double payoff_a = 0.0;
  double payoff_b = 0.0;
  double stderr_a = 0.0;
  double stderr_b = 0.0;
};

/// Monte Carlo estimate; n_samples >= 1000, reproducible for a fixed seed.
McEstimate smeared_payoff_mc(const GameSpec& game, const StrategyDistribution& a,
                             const StrategyDistribution& b, std::int64_t n_samples,
                             std::uint64_t seed);

/// sum_ij p_i^A p_j^B smeared_payoff(component_i^A, component_j^B). A pure or
/// trembled argument counts as a one-component mixture.
PayoffPair discrete_mixture_payoff(const GameSpec& game, const StrategyDistribution& mix_a,
                                   const StrategyDistribution& mix_b,
                                   const QuadratureOptions& opts = {});

}  // namespace qthp
