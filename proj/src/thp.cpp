#include "qthp/thp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qthp/errors.hpp"

namespace qthp {

namespace {

struct Probe {
  StrategyParams params;
  double value;
};

struct Landscape {
  std::vector<Probe> probes;
  std::size_t best = 0;
};

// Grid argmax. A later node must beat the incumbent by more than roundoff, so
// exact ties keep the lowest lexicographic node.
Landscape scan(const ResponseEvaluator& eval, int dims, int nodes) {
  const QuadratureGrid grid(nodes, dims);
  Landscape out;
  out.probes.reserve(grid.size());
  const Player me = eval.responder();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const StrategyParams p = grid.point(n);
    const double v = eval.payoff(p).of(me);
    out.probes.push_back({p, v});
    if (v > out.probes[out.best].value + 1e-12) out.best = n;
  }
  return out;
}

Probe polish(const ResponseEvaluator& eval, Probe start, int dims, double step, double min_step) {
  const Player me = eval.responder();
  Probe cur = start;
  int budget = 100000;
  while (step >= min_step && budget-- > 0) {
    bool improved = false;
    for (int axis = 0; axis < dims; ++axis) {
      for (double sign : {1.0, -1.0}) {
        double c[3] = {cur.params.theta(), cur.params.alpha(), cur.params.beta()};
        c[axis] += sign * step;
        const StrategyParams p = StrategyParams::make(c[0], c[1], c[2], dims);
        const double v = eval.payoff(p).of(me);
        if (v > cur.value) {
          cur = {p, v};
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return cur;
}

// Best probed payoff among gates farther than kAngularTol from `center`.
double best_outside(const Landscape& land, const Mat2& center) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& probe : land.probes) {
    if (probe.value <= best) continue;
    if (gate_distance(su2(probe.params).matrix(), center) > kAngularTol) best = probe.value;
  }
  return best;
}

void check_search(const SearchOptions& s) {
  if (s.grid_nodes < 8) throw ConfigError("best-response grid needs at least 8 nodes per dimension");
  if (!(s.min_step > 0.0)) throw ConfigError("refinement step floor must be positive");
}

StrategyParams in_dims(const StrategyParams& p, int dims) {
  return StrategyParams::make(p.theta(), p.alpha(), p.beta(), dims);
}

}  // namespace

BestResponse best_response(const GameSpec& game, Player responder, int dims,
                           const StrategyDistribution& opponent, const SearchOptions& search,
                           const QuadratureOptions& quad) {
  validate(game);
  check_search(search);
  if (dims < 1 || dims > 3) throw ConfigError("response dims must be 1, 2 or 3");
  const ResponseEvaluator eval(game, responder, distribution_moment(opponent, quad));
  const Landscape land = scan(eval, dims, search.grid_nodes);
  Probe top = land.probes[land.best];
  if (search.refine) top = polish(eval, top, dims, kTwoPi / search.grid_nodes, search.min_step);
  BestResponse out;
  out.argmax = top.params;
  out.value = top.value;
  out.runner_up_gap = top.value - best_outside(land, su2(top.params).matrix());
  return out;
}

const char* equilibrium_kind_name(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Strict: return "strict";
    case EquilibriumKind::Weak: return "weak";
    case EquilibriumKind::NotEquilibrium: return "not-equilibrium";
  }
  return "?";
}

namespace {

ResponseVerdict respond(const GameSpec& game, Player responder, const StrategyParams& own,
                        const StrategyDistribution& opponent, int dims, const SearchOptions& search,
                        const QuadratureOptions& quad) {
  const ResponseEvaluator eval(game, responder, distribution_moment(opponent, quad));
  const Landscape land = scan(eval, dims, search.grid_nodes);
  Probe top = land.probes[land.best];
  if (search.refine) top = polish(eval, top, dims, kTwoPi / search.grid_nodes, search.min_step);

  const StrategyParams eq = in_dims(own, dims);
  const Mat2 eq_gate = su2(eq).matrix();
  ResponseVerdict v;
  v.responder = responder;
  v.best_response = top.params;
  v.best_value = top.value;
  v.equilibrium_value = eval.payoff(eq).of(responder);
  v.distance = gate_distance(su2(top.params).matrix(), eq_gate);
  const double alternative = v.distance > kAngularTol ? top.value : best_outside(land, eq_gate);
  v.margin = v.equilibrium_value - alternative;
  v.holds = v.distance <= kAngularTol || v.margin >= -kPayoffTieTol;
  return v;
}

}  // namespace

EquilibriumKind check_equilibrium(const GameSpec& game, const Profile& profile, int dims,
                                  const SearchOptions& search) {
  validate(game);
  check_search(search);
  if (dims < 1 || dims > 3) throw ConfigError("equilibrium dims must be 1, 2 or 3");
  bool weak = false;
  for (Player r : {Player::A, Player::B}) {
    const auto opponent = StrategyDistribution::pure(in_dims(profile.of(opponent_of(r)), dims));
    const ResponseVerdict v = respond(game, r, profile.of(r), opponent, dims, search, {});
    const bool best = v.distance <= kAngularTol || v.equilibrium_value >= v.best_value - kPayoffTieTol;
    if (!best) return EquilibriumKind::NotEquilibrium;
    // Strict needs a positive gap over every strategy outside the neighborhood.
    if (v.margin <= kPayoffTieTol) weak = true;
  }
  return weak ? EquilibriumKind::Weak : EquilibriumKind::Strict;
}

RobustnessVerdict thp_verdict(const GameSpec& game, const Profile& profile, double kappa,
                              const ScanOptions& opts) {
  validate(game);
  check_search(opts.search);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("scan kappas must be positive");
  if (opts.response_dims < 1 || opts.response_dims > 3) throw ConfigError("response dims must be 1, 2 or 3");
  RobustnessVerdict out;
  out.kappa = kappa;
  out.holds = true;
  out.margin = std::numeric_limits<double>::infinity();
  std::vector<Player> trembling{Player::A};
  if (!opts.one_side) trembling.push_back(Player::B);
  for (Player t : trembling) {
    const Player r = opponent_of(t);
    const TrembleSpec spec = TrembleSpec::make(in_dims(profile.of(t), opts.tremble_dims), kappa);
    const ResponseVerdict v =
        respond(game, r, profile.of(r), StrategyDistribution::trembled(spec), opts.response_dims,
                opts.search, opts.quad);
    out.holds = out.holds && v.holds;
    out.distance = std::max(out.distance, v.distance);
    out.margin = std::min(out.margin, v.margin);
    out.responses.push_back(v);
  }
  return out;
}

std::vector<RobustnessVerdict> thp_scan(const GameSpec& game, const Profile& profile,
                                        const std::vector<double>& kappas, const ScanOptions& opts) {
  if (kappas.empty()) throw ConfigError("kappa list is empty");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] > 0.0)) throw ConfigError("scan kappas must be positive");
    if (i > 0 && !(kappas[i] > kappas[i - 1])) throw ConfigError("scan kappas must be ascending");
  }
  std::vector<RobustnessVerdict> out;
  out.reserve(kappas.size());
  for (double k : kappas) out.push_back(thp_verdict(game, profile, k, opts));
  return out;
}

bool single_crossing(const std::vector<RobustnessVerdict>& verdicts) {
  bool seen_hold = false;
  for (const auto& v : verdicts) {
    if (v.holds) seen_hold = true;
    else if (seen_hold) return false;
  }
  return true;
}

ThresholdResult threshold_search(const GameSpec& game, const Profile& profile, double kappa_lo,
                                 double kappa_hi, double tol, const ScanOptions& opts,
                                 int prescan_points) {
  if (!(kappa_lo > 0.0) || !(kappa_hi > kappa_lo)) throw ConfigError("need 0 < kappa_lo < kappa_hi");
  if (!(tol > 0.0)) throw ConfigError("threshold tolerance must be positive");
  if (prescan_points < 2) prescan_points = 2;

  auto holds = [&](double k) { return thp_verdict(game, profile, k, opts).holds; };

  std::vector<double> ks(prescan_points);
  for (int i = 0; i < prescan_points; ++i) {
    ks[i] = (i == prescan_points - 1) ? kappa_hi
                                      : kappa_lo + (kappa_hi - kappa_lo) * i / (prescan_points - 1);
  }
  std::vector<bool> hv(prescan_points);
  for (int i = 0; i < prescan_points; ++i) hv[i] = holds(ks[i]);

  ThresholdResult res;
  res.initial_lo = kappa_lo;
  res.initial_hi = kappa_hi;
  res.tol = tol;
  res.holds_at_lo = hv.front();
  res.holds_at_hi = hv.back();
  if (res.holds_at_lo == res.holds_at_hi) {
    throw NoBracketError("verdict is '" + std::string(res.holds_at_lo ? "holds" : "fails") +
                         "' at both kappa = " + std::to_string(kappa_lo) + " and kappa = " +
                         std::to_string(kappa_hi));
  }
  int flips = 0;
  int first = -1;
  for (int i = 1; i < prescan_points; ++i) {
    if (hv[i] != hv[i - 1]) {
      ++flips;
      if (first < 0) first = i - 1;
    }
  }
  res.single_crossing = flips == 1;
  const auto [lo, hi] = bisect_flip(holds, ks[first], ks[first + 1], tol, hv[first]);
  res.lo = lo;
  res.hi = hi;
  res.kappa_star = 0.5 * (lo + hi);
  return res;
}

bool classical_thp_check(const GameSpec& game, Move a, Move b, double epsilon) {
  validate(game);
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 1/2)");
  const int x = static_cast<int>(a);
  const int y = static_cast<int>(b);
  // Probability of C in a trembled move.
  auto p_c = [&](int move) { return move == 0 ? 1.0 - epsilon : epsilon; };
  // Bob against Alice's trembled move, over Bob's pure replies.
  const double bob_eq = classical_payoff(game, p_c(x), y == 0 ? 1.0 : 0.0).b;
  const double bob_dev = classical_payoff(game, p_c(x), y == 0 ? 0.0 : 1.0).b;
  const double alice_eq = classical_payoff(game, x == 0 ? 1.0 : 0.0, p_c(y)).a;
  const double alice_dev = classical_payoff(game, x == 0 ? 0.0 : 1.0, p_c(y)).a;
  constexpr double tol = 1e-12;
  return bob_eq >= bob_dev - tol && alice_eq >= alice_dev - tol;
}

}  // namespace qthp
