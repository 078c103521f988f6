#pragma once

// Trembling-hand perfectness of quantum equilibria: best responses against
// smeared opponents, per-kappa robustness verdicts and kappa thresholds.

#include <vector>

#include "qthp/games.hpp"
#include "qthp/integration.hpp"

namespace qthp {

// Payoffs closer than this are tied.
inline constexpr double kPayoffTieTol = 1e-9;
// Gates closer than this (max-entry norm, up to global phase) are the same strategy.
inline constexpr double kAngularTol = 0.05;

struct BestResponse {
  StrategyParams argmax;
  double value = 0.0;
  // value minus the best probed payoff farther than kAngularTol from argmax.
  double runner_up_gap = 0.0;
};

struct SearchOptions {
  int grid_nodes = 64;
  bool refine = true;
  double min_step = 1e-4;
};

/// Grid search over the responder's pure strategies on its `dims`-torus (ties
/// go to the lowest lexicographic node), then optional coordinate-descent
/// polish with halving steps down to min_step.
BestResponse best_response(const GameSpec& game, Player responder, int dims,
                           const StrategyDistribution& opponent, const SearchOptions& search = {},
                           const QuadratureOptions& quad = {});

struct Profile {
  StrategyParams a;
  StrategyParams b;

  const StrategyParams& of(Player p) const { return p == Player::A ? a : b; }
};

enum class EquilibriumKind { Strict, Weak, NotEquilibrium };
const char* equilibrium_kind_name(EquilibriumKind k);

/// Each player's strategy against the opponent's pure strategy, searched over
/// `dims` parameters.
EquilibriumKind check_equilibrium(const GameSpec& game, const Profile& profile, int dims,
                                  const SearchOptions& search = {});

/// One responder's outcome against the opponent's trembled equilibrium strategy.
struct ResponseVerdict {
  Player responder = Player::B;
  bool holds = false;
  double distance = 0.0;  // gate distance from equilibrium strategy to the argmax
  double margin = 0.0;    // equilibrium payoff minus best payoff outside its neighborhood
  StrategyParams best_response;
  double best_value = 0.0;
  double equilibrium_value = 0.0;
};

/// holds <=> distance <= kAngularTol or margin >= -kPayoffTieTol, per responder;
/// the combined fields take the worst case over responders.
struct RobustnessVerdict {
  double kappa = 0.0;
  bool holds = false;
  double distance = 0.0;
  double margin = 0.0;
  std::vector<ResponseVerdict> responses;
};

struct ScanOptions {
  int tremble_dims = 2;
  int response_dims = 2;
  // Symmetric games: only tremble Alice and let Bob respond.
  bool one_side = false;
  SearchOptions search;
  QuadratureOptions quad;
};

/// For each kappa (positive, ascending) tremble each player's equilibrium
/// strategy in turn and test whether the other's equilibrium strategy is still
/// a best response.
std::vector<RobustnessVerdict> thp_scan(const GameSpec& game, const Profile& profile,
                                        const std::vector<double>& kappas, const ScanOptions& opts);

RobustnessVerdict thp_verdict(const GameSpec& game, const Profile& profile, double kappa,
                              const ScanOptions& opts);

/// True when no verdict flips from holding back to failing as kappa grows.
bool single_crossing(const std::vector<RobustnessVerdict>& verdicts);

/// Bisection on a boolean predicate. Requires pred(lo) != pred(hi); returns the
/// final bracket of width <= tol that still straddles the flip.
template <class Pred>
std::pair<double, double> bisect_flip(Pred&& pred, double lo, double hi, double tol, bool pred_lo) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid) == pred_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

struct ThresholdResult {
  double kappa_star = 0.0;  // midpoint of the final bracket
  double lo = 0.0;          // final bracket
  double hi = 0.0;
  double initial_lo = 0.0;
  double initial_hi = 0.0;
  double tol = 0.0;
  bool holds_at_lo = false;
  bool holds_at_hi = false;
  // False when the coarse pre-scan saw the verdict flip more than once.
  bool single_crossing = true;
};

/// Kappa at which the verdict flips inside [kappa_lo, kappa_hi], to width tol.
/// A coarse scan of `prescan_points` kappas runs first; bisection refines its
/// first flip. Throws NoBracketError when the endpoints agree.
ThresholdResult threshold_search(const GameSpec& game, const Profile& profile, double kappa_lo,
                                 double kappa_hi, double tol, const ScanOptions& opts,
                                 int prescan_points = 9);

/// Classical check with (1-eps, eps) trembles: each player's move must remain a
/// best pure reply to the other's trembled move. Requires 0 < eps < 1/2.
bool classical_thp_check(const GameSpec& game, Move a, Move b, double epsilon);

}  // namespace qthp
