#include <doctest.h>

#include <cmath>
#include <random>

#include "qthp/errors.hpp"
#include "qthp/thp.hpp"
#include "test_helpers.hpp"

using namespace qthp;

namespace {

Profile profile(const char* a, const char* b) { return {StrategyParams::named(a, 3), StrategyParams::named(b, 3)}; }

StrategyDistribution trembled(const char* name, int dims, double kappa) {
  return StrategyDistribution::trembled(TrembleSpec::make(StrategyParams::named(name, dims), kappa));
}

double distance_to(const StrategyParams& p, const char* name) {
  return gate_distance(su2(p).matrix(), su2(StrategyParams::named(name, 3)).matrix());
}

ScanOptions scan(int tremble_dims, int response_dims) {
  ScanOptions o;
  o.tremble_dims = tremble_dims;
  o.response_dims = response_dims;
  return o;
}

}  // namespace

TEST_CASE("best responses") {
  SUBCASE("EG: Bob answers a classical tremble of C with C") {
    const double eps = 0.01;
    const auto alice = StrategyDistribution::mixture({{1 - eps, PureStrategy{StrategyParams::named("C", 1)}},
                                                      {eps, PureStrategy{StrategyParams::named("D", 1)}}});
    const auto br = best_response(builtin_game("EG"), Player::B, 1, alice);
    CHECK(std::abs(br.argmax.theta()) <= 1e-3);
    CHECK(br.value == doctest::Approx(1 + eps));
  }
  SUBCASE("PD: Alice answers pure Q with Q") {
    const auto br = best_response(builtin_game("PD"), Player::A, 2,
                                  StrategyDistribution::pure(StrategyParams::named("Q", 2)));
    CHECK(distance_to(br.argmax, "Q") <= 1e-3);
    CHECK(br.value == doctest::Approx(3.0));
    CHECK(br.runner_up_gap > 0.0);
  }
  SUBCASE("SH: against trembled C at kappa = 1, Bob moves to Q") {
    const auto br = best_response(builtin_game("SH"), Player::B, 2, trembled("C", 2, 1.0));
    CHECK(distance_to(br.argmax, "Q") <= kAngularTol);
    CHECK(distance_to(br.argmax, "C") > kAngularTol);
  }
}

TEST_CASE("best response dominates random probes") {
  std::mt19937_64 rng(12);
  const char* games[] = {"PD", "EG", "SH"};
  for (int t = 0; t < 6; ++t) {
    const auto g = builtin_game(games[t % 3]);
    const auto opp = StrategyDistribution::trembled(TrembleSpec::make(testing::random_params(rng, 2), 0.5 + t));
    const Player r = t % 2 ? Player::A : Player::B;
    const auto br = best_response(g, r, 2, opp);
    const ResponseEvaluator eval(g, r, distribution_moment(opp, {}));
    for (int k = 0; k < 1000; ++k) {
      CHECK(eval.payoff(testing::random_params(rng, 2)).of(r) <= br.value + 1e-9);
    }
  }
}

TEST_CASE("argmax is invariant under payoff shifts") {
  auto g = builtin_game("SH");
  auto shifted = g;
  const double c = 7.25;
  for (auto& row : shifted.b)
    for (auto& v : row) v += c;
  for (double kappa : {0.8, 3.0}) {
    const auto opp = trembled("C", 2, kappa);
    const auto x = best_response(g, Player::B, 2, opp);
    const auto y = best_response(shifted, Player::B, 2, opp);
    CHECK(gate_distance(su2(x.argmax).matrix(), su2(y.argmax).matrix()) <= 1e-6);
    CHECK(std::abs(y.value - x.value - c) <= 1e-9);
  }
}

TEST_CASE("pure-opponent equilibrium check") {
  CHECK(check_equilibrium(builtin_game("EG"), profile("D", "D"), 2) == EquilibriumKind::Weak);
  CHECK(check_equilibrium(builtin_game("EG"), profile("C", "C"), 2) == EquilibriumKind::NotEquilibrium);
  CHECK(check_equilibrium(builtin_game("PD"), profile("Q", "Q"), 2) == EquilibriumKind::Strict);
  CHECK(check_equilibrium(builtin_game("PD"), profile("C", "C"), 2) == EquilibriumKind::NotEquilibrium);
  // One-parameter strategies are the classical game.
  CHECK(check_equilibrium(builtin_game("PD"), profile("D", "D"), 1) == EquilibriumKind::Strict);
  CHECK(check_equilibrium(builtin_game("EG"), profile("C", "C"), 1) == EquilibriumKind::Strict);
  CHECK(std::string(equilibrium_kind_name(EquilibriumKind::Weak)) == "weak");
}

TEST_CASE("robustness scans") {
  SUBCASE("PD (Q,Q) survives three-parameter trembles") {
    const auto vs = thp_scan(builtin_game("PD"), profile("Q", "Q"), {0.5, 1.0, 5.0}, scan(3, 2));
    for (const auto& v : vs) {
      CHECK(v.holds);
      CHECK(v.responses.size() == 2);
    }
  }
  SUBCASE("EG (D,D) fails with two parameters, best response C") {
    const auto vs = thp_scan(builtin_game("EG"), profile("D", "D"), {1.0, 5.0}, scan(2, 2));
    for (const auto& v : vs) {
      CHECK_FALSE(v.holds);
      bool saw_c = false;
      for (const auto& r : v.responses)
        if (!r.holds) saw_c = saw_c || distance_to(r.best_response, "C") <= kAngularTol;
      CHECK(saw_c);
    }
  }
  SUBCASE("EG (D,D) survives with three parameters") {
    CHECK(thp_verdict(builtin_game("EG"), profile("D", "D"), 1.0, scan(3, 2)).holds);
  }
  SUBCASE("SH (Q,Q) holds everywhere scanned") {
    for (int d : {2, 3}) {
      for (const auto& v : thp_scan(builtin_game("SH"), profile("Q", "Q"), {0.5, 1.0, 1.5, 2.0, 5.0, 25.0}, scan(d, 2))) {
        CHECK(v.holds);
      }
    }
  }
  SUBCASE("verdict invariant: holds iff distance or margin passes") {
    for (const auto& v : thp_scan(builtin_game("SH"), profile("C", "C"), {0.5, 1.0, 2.0, 4.0}, scan(2, 2))) {
      for (const auto& r : v.responses) {
        CHECK(r.holds == (r.distance <= kAngularTol || r.margin >= -kPayoffTieTol));
      }
    }
  }
}

TEST_CASE("SH (C,C) verdict is single-crossing in kappa") {
  const std::vector<double> ks{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 5.0, 10.0, 25.0};
  for (int d : {2, 3}) {
    const auto vs = thp_scan(builtin_game("SH"), profile("C", "C"), ks, scan(d, 2));
    CHECK(single_crossing(vs));
    CHECK_FALSE(vs.front().holds);
    CHECK(vs.back().holds);
  }
  std::vector<RobustnessVerdict> bumpy(3);
  bumpy[0].holds = true;
  bumpy[1].holds = false;
  bumpy[2].holds = true;
  CHECK_FALSE(single_crossing(bumpy));
}

TEST_CASE("kappa thresholds") {
  const auto sh = builtin_game("SH");
  const auto two = threshold_search(sh, profile("C", "C"), 1.0, 5.0, 1e-3, scan(2, 2));
  CHECK(two.kappa_star > 1.5);
  CHECK(two.kappa_star <= 1.75);
  CHECK(two.hi - two.lo <= 1e-3);
  CHECK_FALSE(two.holds_at_lo);
  CHECK(two.holds_at_hi);
  CHECK(two.single_crossing);

  const auto three = threshold_search(sh, profile("C", "C"), 0.5, 5.0, 1e-3, scan(3, 2));
  CHECK(three.kappa_star > 1.0);
  CHECK(three.kappa_star < 5.0);

  CHECK_THROWS_AS(threshold_search(builtin_game("PD"), profile("Q", "Q"), 0.5, 5.0, 1e-2, scan(3, 2)), NoBracketError);
  CHECK_THROWS_AS(threshold_search(sh, profile("C", "C"), 2.0, 1.0, 1e-2, scan(2, 2)), ConfigError);
  CHECK_THROWS_AS(threshold_search(sh, profile("C", "C"), 1.0, 2.0, 0.0, scan(2, 2)), ConfigError);
}

TEST_CASE("bisect_flip") {
  int calls = 0;
  auto pred = [&](double x) {
    ++calls;
    return x > std::sqrt(2.0);
  };
  const auto [lo, hi] = bisect_flip(pred, 1.0, 2.0, 1e-9, false);
  CHECK(lo <= std::sqrt(2.0));
  CHECK(hi > std::sqrt(2.0));
  CHECK(hi - lo <= 1e-9);
  CHECK(calls <= 31);
}

TEST_CASE("classical THP") {
  const auto eg = builtin_game("EG");
  CHECK(classical_thp_check(eg, Move::C, Move::C, 0.01));
  CHECK_FALSE(classical_thp_check(eg, Move::D, Move::D, 0.01));
  CHECK(classical_thp_check(builtin_game("SH"), Move::C, Move::C, 0.01));
  CHECK(classical_thp_check(builtin_game("SH"), Move::D, Move::D, 0.01));
  CHECK_THROWS_AS(classical_thp_check(eg, Move::C, Move::C, 0.0), ConfigError);
  CHECK_THROWS_AS(classical_thp_check(eg, Move::C, Move::C, 0.5), ConfigError);
}

TEST_CASE("one-parameter trembles reproduce the classical verdicts") {
  const auto eg = builtin_game("EG");
  for (const auto& [name, move] : {std::pair{"C", Move::C}, std::pair{"D", Move::D}}) {
    const bool quantum = thp_verdict(eg, profile(name, name), 50.0, scan(1, 1)).holds;
    CHECK(quantum == classical_thp_check(eg, move, move, 0.01));
  }
}

TEST_CASE("sharp trembles agree with the pure-opponent check") {
  // Weak equilibria are excluded: any tremble can break a tie.
  ScanOptions o = scan(2, 2);
  o.quad.nodes = 128;
  struct Case {
    const char* game;
    const char* a;
    const char* b;
  };
  for (const Case& c : {Case{"PD", "Q", "Q"}, Case{"PD", "C", "C"}, Case{"EG", "C", "C"}, Case{"SH", "C", "C"},
                        Case{"SH", "Q", "Q"}, Case{"PD", "D", "D"}}) {
    const auto g = builtin_game(c.game);
    const auto kind = check_equilibrium(g, profile(c.a, c.b), 2);
    REQUIRE(kind != EquilibriumKind::Weak);
    CHECK_MESSAGE(thp_verdict(g, profile(c.a, c.b), 200.0, o).holds == (kind == EquilibriumKind::Strict),
                  c.game << " (" << c.a << "," << c.b << ")");
  }
}

TEST_CASE("input validation") {
  const auto pd = builtin_game("PD");
  CHECK_THROWS_AS(thp_scan(pd, profile("Q", "Q"), {}, scan(2, 2)), ConfigError);
  CHECK_THROWS_AS(thp_scan(pd, profile("Q", "Q"), {1.0, 0.5}, scan(2, 2)), ConfigError);
  CHECK_THROWS_AS(thp_scan(pd, profile("Q", "Q"), {-1.0}, scan(2, 2)), ConfigError);
  CHECK_THROWS_AS(thp_verdict(pd, profile("Q", "Q"), 1.0, scan(2, 4)), ConfigError);
  SearchOptions coarse;
  coarse.grid_nodes = 4;
  CHECK_THROWS_AS(best_response(pd, Player::A, 2, trembled("Q", 2, 1.0), coarse), ConfigError);
  CHECK_THROWS_AS(best_response(pd, Player::A, 0, trembled("Q", 2, 1.0)), ConfigError);
}
