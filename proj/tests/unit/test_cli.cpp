#include <doctest.h>

#include <array>
#include <charconv>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "qthp/cli.hpp"
#include "qthp/errors.hpp"

using namespace qthp;
using namespace qthp::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(QTHP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("strategy literals") {
  CHECK(parse_strategy("Q", 2) == StrategyParams::named("Q", 2));
  CHECK(parse_strategy("D", 1) == StrategyParams::named("D", 1));
  const auto p = parse_strategy("0.5,1,2", 3);
  CHECK(p.theta() == 0.5);
  CHECK(p.alpha() == 1.0);
  CHECK(p.beta() == 2.0);
  CHECK(parse_strategy("7,0,0", 1).theta() == doctest::Approx(7 - kTwoPi));
  CHECK_THROWS_AS(parse_strategy("0.5,1,2", 1), ConfigError);
  CHECK_THROWS_AS(parse_strategy("X", 2), ConfigError);
  CHECK_THROWS_AS(parse_strategy("1,2", 3), ConfigError);
  CHECK_THROWS_AS(parse_strategy("Q", 1), ConfigError);
}

TEST_CASE("distribution literals") {
  const auto pure = parse_distribution("pure:Q", 2);
  CHECK(pure.kind() == StrategyDistribution::Kind::Pure);
  CHECK(pure.pure_params().dims() == 3);

  const auto t = parse_distribution("tremble:C,kappa=5", 2);
  REQUIRE(t.kind() == StrategyDistribution::Kind::Trembled);
  CHECK(t.tremble().kappa == 5.0);
  CHECK(t.tremble().dims == 2);
  CHECK(parse_distribution("tremble:D,kappa=0.5,dims=3", 2).tremble().dims == 3);

  for (const char* bad : {"tremble:Q", "bogus:Q", "tremble:Q,kappa=-1", "tremble:Q,kappa=1,foo=2",
                          "tremble:Q,kappa=1,dims=1", "pure:", "tremble:C,kappa=abc"}) {
    CHECK_THROWS_AS(parse_distribution(bad, 2), ConfigError);
  }
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t u = bits(rng);
    double v;
    std::memcpy(&v, &u, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_number(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
    ++checked;
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-3.0) == "-3");
}

TEST_CASE("surface CSV") {
  RunConfig cfg;
  cfg.game = "PD";
  cfg.vary = Player::A;
  cfg.dims = 2;
  cfg.opponent = "pure:Q";
  cfg.nodes = 65;
  const auto rows = lines(run_surface(cfg));
  REQUIRE(rows.size() == 1 + 65 * 65);
  CHECK(rows[0] == "theta,alpha,payoff_A,payoff_B");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(fields(rows[i]).size() == 4);

  cfg.dims = 3;
  cfg.nodes = 5;
  const auto rows3 = lines(run_surface(cfg));
  CHECK(rows3.size() == 1 + 125);
  CHECK(fields(rows3[0]).size() == 5);
}

TEST_CASE("SH surface against trembled C peaks at C") {
  RunConfig cfg;
  cfg.game = "SH";
  cfg.vary = Player::B;
  cfg.dims = 2;
  cfg.opponent = "tremble:C,kappa=1.75";
  const auto rows = lines(run_surface(cfg));
  double best = -1e300, best_theta = 99;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    const double v = std::stod(f[3]);
    if (v > best) {
      best = v;
      best_theta = std::stod(f[0]);
    }
  }
  CHECK(std::abs(best_theta) <= 1e-12);
}

TEST_CASE("thp JSON records") {
  RunConfig cfg;
  cfg.game = "EG";
  cfg.format = Format::Json;
  cfg.strategy_a = cfg.strategy_b = "D";
  cfg.tremble_dims = 2;
  cfg.kappas = {1.0, 5.0};
  const json j = json::parse(run_thp(cfg));
  CHECK(j["command"] == "thp");
  CHECK(j["seed"] == 0);
  REQUIRE(j["records"].size() == 2);
  for (const auto& r : j["records"]) {
    CHECK(r["holds"] == false);
    CHECK(r.contains("distance"));
    CHECK(r.contains("margin"));
    CHECK(r["responses"].size() == 2);
  }

  cfg.tremble_dims = 3;
  cfg.kappas = {1.0};
  CHECK(json::parse(run_thp(cfg))["records"][0]["holds"] == true);

  cfg.game = "PD";
  cfg.strategy_a = cfg.strategy_b = "Q";
  cfg.tremble_dims = 2;
  cfg.kappas = {5.0};
  cfg.format = Format::Csv;
  const auto rows = lines(run_thp(cfg));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "kappa,holds,distance,margin");
  CHECK(fields(rows[1])[1] == "true");
}

TEST_CASE("threshold output") {
  RunConfig cfg;
  cfg.game = "SH";
  cfg.tremble_dims = 2;
  cfg.kappa_lo = 1.0;
  cfg.kappa_hi = 5.0;
  cfg.format = Format::Json;
  const json j = json::parse(run_threshold(cfg));
  const double k = j["kappa_star"].get<double>();
  CHECK(k > 1.5);
  CHECK(k <= 1.75);
  CHECK(j["tol"] == 0.01);
  CHECK(j["holds_at_lo"] == false);
  CHECK(j["holds_at_hi"] == true);

  cfg.game = "PD";
  cfg.strategy_a = cfg.strategy_b = "Q";
  cfg.tremble_dims = 3;
  cfg.kappa_lo = 0.5;
  CHECK_THROWS_AS(run_threshold(cfg), NoBracketError);
}

TEST_CASE("classical output") {
  RunConfig cfg;
  cfg.format = Format::Json;
  cfg.game = "EG";
  json j = json::parse(run_classical(cfg));
  REQUIRE(j["equilibria"].size() == 2);
  CHECK(j["equilibria"][0]["profile"] == "CC");
  CHECK(j["equilibria"][0]["thp"] == true);
  CHECK(j["equilibria"][1]["profile"] == "DD");
  CHECK(j["equilibria"][1]["thp"] == false);

  cfg.game = "PD";
  j = json::parse(run_classical(cfg));
  REQUIRE(j["equilibria"].size() == 1);
  CHECK(j["equilibria"][0]["profile"] == "DD");

  cfg.game = "SH";
  j = json::parse(run_classical(cfg));
  REQUIRE(j["equilibria"].size() == 2);
  for (const auto& e : j["equilibria"]) CHECK(e["thp"] == true);

  cfg.format = Format::Csv;
  cfg.nodes = 9;
  const auto rows = lines(run_classical(cfg));
  CHECK(rows.size() == 1 + 81);
  CHECK(rows[0] == "theta_A,theta_B,payoff_A,payoff_B");
}

TEST_CASE("payoff output") {
  RunConfig cfg;
  cfg.dist_a = "tremble:Q,kappa=1";
  cfg.dist_b = "pure:Q";
  cfg.mc_samples = 2000;
  const auto rows = lines(run_payoff(cfg));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "method,payoff_A,payoff_B,stderr_A,stderr_B");
  CHECK(fields(rows[2]).size() == 5);
  cfg.format = Format::Json;
  const json j = json::parse(run_payoff(cfg));
  CHECK(j["monte_carlo"]["samples"] == 2000);
}

TEST_CASE("binary exit codes") {
  CHECK(run_cli("surface --game PD --dims 1 --opponent pure:Q --nodes 5").code == kOk);
  CHECK(run_cli("surface --game XX").code == kConfigError);
  CHECK(run_cli("surface --dims 1 --opponent tremble:Q").code == kConfigError);
  CHECK(run_cli("thp --kappa 5,1").code == kConfigError);
  CHECK(run_cli("surface --no-such-flag").code == kConfigError);
  CHECK(run_cli("").code == kConfigError);
  CHECK(run_cli("threshold --game PD --profile Q --tremble-dims 3 --lo 0.5 --hi 5").code == kNoBracket);
  CHECK(run_cli("surface --dims 1 --nodes 3 --opponent tremble:Q,kappa=25,dims=2 --quad-nodes 8 --self-check").code ==
        kSelfCheckFailed);
  CHECK(run_cli("surface --dims 1 --nodes 3 --opponent tremble:Q,kappa=1,dims=2 --self-check").code == kOk);
}

TEST_CASE("binary output is deterministic and written atomically") {
  const fs::path dir = fs::temp_directory_path() / "qthp_cli_test";
  fs::create_directories(dir);
  const std::string args = "payoff --game SH --dist-a tremble:Q,kappa=2 --dist-b tremble:C,kappa=1 --mc-samples 5000 --seed 9";
  for (const char* fmt : {"csv", "json"}) {
    const fs::path x = dir / (std::string("x.") + fmt), y = dir / (std::string("y.") + fmt);
    REQUIRE(run_cli(args + " --format " + fmt + " -o " + x.string()).code == kOk);
    REQUIRE(run_cli(args + " --format " + fmt + " -o " + y.string()).code == kOk);
    CHECK(slurp(x) == slurp(y));
    CHECK_FALSE(slurp(x).empty());
    CHECK_FALSE(fs::exists(fs::path(x.string() + ".tmp")));
  }
  CHECK(run_cli(args + " --format csv").out == slurp(dir / "x.csv"));

  // A failed run leaves no output behind.
  const fs::path bad = dir / "bad.csv";
  CHECK(run_cli("threshold --game PD --profile Q --tremble-dims 3 --lo 0.5 --hi 5 -o " + bad.string()).code ==
        kNoBracket);
  CHECK_FALSE(fs::exists(bad));
  CHECK_FALSE(fs::exists(fs::path(bad.string() + ".tmp")));

  const fs::path game = dir / "game.json";
  {
    std::ofstream out(game);
    out << R"({"name": "custom", "a": [[3, 0], [5, 1]], "b": [[3, 5], [0, 1]]})";
  }
  const auto custom = run_cli("classical --format json --game " + game.string());
  REQUIRE(custom.code == kOk);
  CHECK(json::parse(custom.out)["game"]["name"] == "custom");
  fs::remove_all(dir);
}

TEST_CASE("atomic write replaces content") {
  const fs::path p = fs::temp_directory_path() / "qthp_atomic.txt";
  write_atomic(p.string(), "first");
  write_atomic(p.string(), "second");
  CHECK(slurp(p) == "second");
  CHECK_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
  fs::remove(p);
  CHECK_THROWS(write_atomic("/nonexistent-dir/x.csv", "data"));
}
