#include "qthp/games.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qthp/errors.hpp"

namespace qthp {

void validate(const GameSpec& game) {
  for (const auto* t : {&game.a, &game.b})
    for (const auto& row : *t)
      for (double v : row)
        if (!std::isfinite(v)) throw ConfigError("game '" + game.name + "' has a non-finite payoff");
}

GameSpec builtin_game(std::string_view name) {
  if (name == "PD") return {"PD", {{{3, 0}, {5, 1}}}, {{{3, 5}, {0, 1}}}};
  if (name == "EG") return {"EG", {{{1, 2}, {0, 2}}}, {{{1, 0}, {2, 2}}}};
  if (name == "SH") return {"SH", {{{10, 0}, {8, 7}}}, {{{10, 8}, {0, 7}}}};
  throw ConfigError("unknown builtin game '" + std::string(name) + "' (expected PD, EG or SH)");
}

namespace {

Payoff2x2 read_table(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("game file is missing \"") + key + "\"");
  const auto& t = j.at(key);
  if (!t.is_array() || t.size() != 2) throw ConfigError(std::string("\"") + key + "\" must be a 2x2 array");
  Payoff2x2 out{};
  for (std::size_t r = 0; r < 2; ++r) {
    if (!t[r].is_array() || t[r].size() != 2) {
      throw ConfigError(std::string("\"") + key + "\" must be a 2x2 array");
    }
    for (std::size_t c = 0; c < 2; ++c) {
      if (!t[r][c].is_number()) throw ConfigError(std::string("\"") + key + "\" entries must be numbers");
      out[r][c] = t[r][c].get<double>();
    }
  }
  return out;
}

}  // namespace

GameSpec game_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("game file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("game file must hold a JSON object");
  GameSpec g;
  if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError("game file needs a string \"name\"");
  g.name = j.at("name").get<std::string>();
  g.a = read_table(j, "a");
  g.b = read_table(j, "b");
  validate(g);
  return g;
}

GameSpec load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return game_from_json(ss.str());
}

GameSpec resolve_game(const std::string& name_or_path) {
  if (name_or_path == "PD" || name_or_path == "EG" || name_or_path == "SH") {
    return builtin_game(name_or_path);
  }
  return load_game_file(name_or_path);
}

PayoffPair classical_payoff(const GameSpec& game, double p_a, double p_b) {
  if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
    throw ConfigError("classical probabilities must lie in [0, 1]");
  }
  const double wa[2] = {p_a, 1.0 - p_a};
  const double wb[2] = {p_b, 1.0 - p_b};
  PayoffPair out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      out.a += wa[i] * wb[j] * game.a[i][j];
      out.b += wa[i] * wb[j] * game.b[i][j];
    }
  return out;
}

std::vector<ClassicalEquilibrium> classical_equilibria(const GameSpec& game) {
  std::vector<ClassicalEquilibrium> out;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double dev_a = game.a[1 - x][y] - game.a[x][y];
      const double dev_b = game.b[x][1 - y] - game.b[x][y];
      if (dev_a > 0.0 || dev_b > 0.0) continue;
      const bool strict = dev_a < 0.0 && dev_b < 0.0;
      out.push_back({static_cast<Move>(x), static_cast<Move>(y), strict});
    }
  }
  return out;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = (k == n - 1) ? hi : lo + (hi - lo) * k / (n - 1);
  return v;
}

const char* kAxisNames[3] = {"theta", "alpha", "beta"};

std::string describe(const StrategyDistribution& d) {
  auto point = [](const StrategyParams& p) {
    std::ostringstream os;
    os << "(" << p.theta() << ", " << p.alpha() << ", " << p.beta() << ")";
    return os.str();
  };
  switch (d.kind()) {
    case StrategyDistribution::Kind::Pure: return "pure " + point(d.pure_params());
    case StrategyDistribution::Kind::Trembled: {
      std::ostringstream os;
      os << "trembled around " << point(d.tremble().center) << ", kappa=" << d.tremble().kappa
         << ", dims=" << d.tremble().dims;
      return os.str();
    }
    case StrategyDistribution::Kind::Mixture: break;
  }
  return "mixture of " + std::to_string(d.entries().size()) + " components";
}

}  // namespace

Surface payoff_surface(const GameSpec& game, Player varying, int dims,
                       const StrategyDistribution& opponent, int nodes, const QuadratureOptions& opts) {
  validate(game);
  if (dims < 1 || dims > 3) throw ConfigError("surface dims must be 1, 2 or 3");
  if (nodes < 2) throw ConfigError("surface needs at least 2 nodes per axis");

  Surface s;
  for (int axis = 0; axis < dims; ++axis) {
    s.axes.push_back({kAxisNames[axis], axis == 0 ? linspace(-kPi, kPi, nodes) : linspace(0.0, kTwoPi, nodes)});
  }
  s.context = std::string("player ") + player_name(varying) + " varies; opponent plays " + describe(opponent);

  const ResponseEvaluator eval(game, varying, distribution_moment(opponent, opts));
  std::size_t total = 1;
  for (int i = 0; i < dims; ++i) total *= static_cast<std::size_t>(nodes);
  s.values_a.reserve(total);
  s.values_b.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double c[3] = {0.0, 0.0, 0.0};
    std::size_t rest = flat;
    for (int axis = dims - 1; axis >= 0; --axis) {
      c[axis] = s.axes[axis].values[rest % nodes];
      rest /= nodes;
    }
    const PayoffPair p = eval.payoff(StrategyParams::make(c[0], c[1], c[2], dims));
    s.values_a.push_back(p.a);
    s.values_b.push_back(p.b);
  }
  return s;
}

Surface classical_surface(const GameSpec& game, int nodes) {
  validate(game);
  if (nodes < 2) throw ConfigError("surface needs at least 2 nodes per axis");
  Surface s;
  s.axes.push_back({"theta_A", linspace(0.0, kPi, nodes)});
  s.axes.push_back({"theta_B", linspace(0.0, kPi, nodes)});
  s.context = "classical mixed strategies, p_C = cos^2(theta/2)";
  for (double ta : s.axes[0].values) {
    const double ca = std::cos(0.5 * ta);
    for (double tb : s.axes[1].values) {
      const double cb = std::cos(0.5 * tb);
      const PayoffPair p = classical_payoff(game, std::min(1.0, ca * ca), std::min(1.0, cb * cb));
      s.values_a.push_back(p.a);
      s.values_b.push_back(p.b);
    }
  }
  return s;
}

}  // namespace qthp
