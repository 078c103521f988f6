#pragma once

// Command implementations behind the `qthp` tool. Each command renders its
// result to a string; the tool writes it to stdout or atomically to a file.

#include <cstdint>
#include <string>
#include <vector>

#include "qthp/integration.hpp"
#include "qthp/thp.hpp"

namespace qthp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNoBracket = 3,
  kSelfCheckFailed = 4,
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string game = "PD";
  Format format = Format::Csv;
  std::uint64_t seed = 0;
  bool self_check = false;
  int quad_nodes = 64;
  int quad_nodes_3d = 48;

  // surface
  Player vary = Player::A;
  int dims = 2;
  std::string opponent = "pure:C";
  int nodes = 65;

  // thp / threshold
  std::string strategy_a = "C";
  std::string strategy_b = "C";
  int tremble_dims = 2;
  int response_dims = 0;  // 0: min(tremble_dims, 2)
  int search_nodes = 64;
  bool one_side = false;
  std::vector<double> kappas{1.0};
  double kappa_lo = 1.0;
  double kappa_hi = 5.0;
  double tol = 0.01;

  // classical
  double epsilon = 0.01;

  // payoff
  std::string dist_a = "pure:C";
  std::string dist_b = "pure:C";
  std::int64_t mc_samples = 0;

  QuadratureOptions quadrature() const;
};

/// `C`, `D`, `Q` or `theta,alpha,beta` (radians). Canonicalized, with `dims`
/// active parameters.
StrategyParams parse_strategy(const std::string& literal, int dims);

/// `pure:<strategy>` or `tremble:<strategy>,kappa=<k>[,dims=<d>]`. Pure
/// strategies get 3 active parameters; trembles default to `default_dims`.
StrategyDistribution parse_distribution(const std::string& literal, int default_dims);

/// 17 significant digits, '.' decimal point, independent of locale.
std::string format_number(double v);

std::string run_surface(const RunConfig& cfg);
std::string run_thp(const RunConfig& cfg);
std::string run_threshold(const RunConfig& cfg);
std::string run_classical(const RunConfig& cfg);
std::string run_payoff(const RunConfig& cfg);

/// Writes via a temporary sibling file and rename, so `path` is either the old
/// content or the complete new content.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace qthp::cli
