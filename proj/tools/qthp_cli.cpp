// qthp: payoff surfaces, trembling-hand scans and kappa thresholds for
// Eisert-scheme 2x2 quantum games.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qthp/cli.hpp"
#include "qthp/errors.hpp"

namespace {

using qthp::cli::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& output, std::string& format) {
  cmd->add_option("--game", cfg.game, "PD, EG, SH or a path to a game JSON file")->capture_default_str();
  cmd->add_option("-o,--output", output, "Output file (default: stdout)");
  cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd->add_option("--quad-nodes", cfg.quad_nodes, "Quadrature nodes per dimension for 1-2 parameter trembles")
      ->check(CLI::Range(8, 4096))
      ->capture_default_str();
  cmd->add_option("--quad-nodes-3d", cfg.quad_nodes_3d, "Quadrature nodes per dimension for 3 parameter trembles")
      ->check(CLI::Range(8, 512))
      ->capture_default_str();
  cmd->add_flag("--self-check", cfg.self_check, "Fail (exit 4) unless doubling the quadrature grid agrees");
}

void add_profile(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--profile", cfg.strategy_a, "Symmetric profile shorthand: both players use this strategy")
      ->each([&cfg](const std::string& s) { cfg.strategy_b = s; });
  cmd->add_option("--a", cfg.strategy_a, "Alice's equilibrium strategy (C, D, Q or theta,alpha,beta)");
  cmd->add_option("--b", cfg.strategy_b, "Bob's equilibrium strategy");
  cmd->add_option("--tremble-dims", cfg.tremble_dims, "Tremble dimensionality")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  cmd->add_option("--response-dims", cfg.response_dims, "Responder dimensionality (default min(tremble-dims, 2))")
      ->check(CLI::Range(1, 3));
  cmd->add_option("--search-nodes", cfg.search_nodes, "Best-response grid nodes per dimension")
      ->check(CLI::Range(8, 4096))
      ->capture_default_str();
  cmd->add_flag("--one-side", cfg.one_side, "Only tremble Alice (symmetric games)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trembling-hand perfectness of quantum 2x2 game equilibria"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string output;
  std::string format = "csv";
  std::string vary = "A";

  auto* surface = app.add_subcommand("surface", "Payoffs of one player's pure strategies against a fixed opponent");
  add_common(surface, cfg, output, format);
  surface->add_option("--vary", vary, "Player whose strategy varies")->check(CLI::IsMember({"A", "B"}));
  surface->add_option("--dims", cfg.dims, "Active parameters of the varying player")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  surface->add_option("--opponent", cfg.opponent, "pure:<s> or tremble:<s>,kappa=<k>[,dims=<d>]")
      ->capture_default_str();
  surface->add_option("--nodes", cfg.nodes, "Grid nodes per axis, endpoints included")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();

  auto* thp = app.add_subcommand("thp", "Robustness verdicts of an equilibrium against trembles, per kappa");
  add_common(thp, cfg, output, format);
  add_profile(thp, cfg);
  thp->add_option("--kappa", cfg.kappas, "Concentrations, ascending")->delimiter(',')->capture_default_str();

  auto* threshold = app.add_subcommand("threshold", "Bisect the kappa where an equilibrium's verdict flips");
  add_common(threshold, cfg, output, format);
  add_profile(threshold, cfg);
  threshold->add_option("--lo", cfg.kappa_lo, "Lower end of the kappa bracket")->capture_default_str();
  threshold->add_option("--hi", cfg.kappa_hi, "Upper end of the kappa bracket")->capture_default_str();
  threshold->add_option("--tol", cfg.tol, "Bracket width to stop at")->capture_default_str();

  auto* classical = app.add_subcommand("classical", "Classical mixed-strategy surface, equilibria and THP checks");
  add_common(classical, cfg, output, format);
  classical->add_option("--epsilon", cfg.epsilon, "Tremble probability")->capture_default_str();
  classical->add_option("--nodes", cfg.nodes, "Grid nodes per axis")->check(CLI::Range(2, 100000))->capture_default_str();

  auto* payoff = app.add_subcommand("payoff", "Smeared expected payoffs for two strategy distributions");
  add_common(payoff, cfg, output, format);
  payoff->add_option("--dist-a", cfg.dist_a, "Alice: pure:<s> or tremble:<s>,kappa=<k>[,dims=<d>]")->capture_default_str();
  payoff->add_option("--dist-b", cfg.dist_b, "Bob: same syntax")->capture_default_str();
  payoff->add_option("--mc-samples", cfg.mc_samples, "Also run a Monte Carlo estimate with this many samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? qthp::cli::kOk : qthp::cli::kConfigError;
  }

  cfg.format = format == "json" ? qthp::cli::Format::Json : qthp::cli::Format::Csv;
  cfg.vary = vary == "B" ? qthp::Player::B : qthp::Player::A;

  try {
    std::string result;
    if (surface->parsed()) result = qthp::cli::run_surface(cfg);
    else if (thp->parsed()) result = qthp::cli::run_thp(cfg);
    else if (threshold->parsed()) result = qthp::cli::run_threshold(cfg);
    else if (classical->parsed()) result = qthp::cli::run_classical(cfg);
    else result = qthp::cli::run_payoff(cfg);

    if (output.empty()) {
      std::cout << result;
    } else {
      qthp::cli::write_atomic(output, result);
    }
  } catch (const qthp::NoBracketError& e) {
    std::cerr << "qthp: no bracket: " << e.what() << "\n";
    return qthp::cli::kNoBracket;
  } catch (const qthp::GridTooCoarseError& e) {
    std::cerr << "qthp: " << e.what() << "\n";
    return qthp::cli::kSelfCheckFailed;
  } catch (const qthp::ConfigError& e) {
    std::cerr << "qthp: invalid configuration: " << e.what() << "\n";
    return qthp::cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "qthp: " << e.what() << "\n";
    return qthp::cli::kFailure;
  }
  return qthp::cli::kOk;
}
