#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qthp/game_spec.hpp"
#include "qthp/integration.hpp"

namespace qthp {

/// PD (Prisoners' Dilemma), EG (example game), SH (Stag Hunt).
GameSpec builtin_game(std::string_view name);

/// Parses {"name": str, "a": [[aCC, aCD], [aDC, aDD]], "b": [[...], [...]]}.
GameSpec game_from_json(const std::string& text);
GameSpec load_game_file(const std::string& path);

/// Builtin name, otherwise a path to a game file.
GameSpec resolve_game(const std::string& name_or_path);

enum class Move { C = 0, D = 1 };
inline const char* move_name(Move m) { return m == Move::C ? "C" : "D"; }

/// sum_ij p_i^A p_j^B payoff(i, j) with p_A, p_B the probabilities of C.
PayoffPair classical_payoff(const GameSpec& game, double p_a, double p_b);

struct ClassicalEquilibrium {
  Move a;
  Move b;
  bool strict;  // false: some unilateral deviation ties
};

/// Pure-strategy Nash equilibria in profile order CC, CD, DC, DD.
std::vector<ClassicalEquilibrium> classical_equilibria(const GameSpec& game);

struct SurfaceAxis {
  std::string name;
  std::vector<double> values;
};

/// Payoffs sampled on a tensor grid; values are flattened row-major over axes
/// (last axis fastest).
struct Surface {
  std::vector<SurfaceAxis> axes;
  std::vector<double> values_a;
  std::vector<double> values_b;
  std::string context;

  std::size_t size() const { return values_a.size(); }
};

/// Evaluates the payoffs of the `varying` player's pure strategies over its
/// first `dims` parameters (theta on [-pi, pi], alpha and beta on [0, 2 pi],
/// `nodes` points per axis, endpoints included) against a fixed opponent.
Surface payoff_surface(const GameSpec& game, Player varying, int dims,
                       const StrategyDistribution& opponent, int nodes = 65,
                       const QuadratureOptions& opts = {});

/// Classical mixed-strategy landscape over (theta_A, theta_B) in [0, pi]^2 with
/// p_C = cos^2(theta/2).
Surface classical_surface(const GameSpec& game, int nodes = 65);

}  // namespace qthp
