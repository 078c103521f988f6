#include "qthp/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "qthp/errors.hpp"
#include "qthp/games.hpp"

namespace qthp::cli {

using nlohmann::json;

QuadratureOptions RunConfig::quadrature() const {
  QuadratureOptions q;
  q.nodes = quad_nodes;
  q.nodes_3d = quad_nodes_3d;
  q.self_check = self_check;
  return q;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

StrategyParams strategy_from_tokens(const std::vector<std::string>& tokens, int dims) {
  if (tokens.size() == 1) return StrategyParams::named(tokens[0], dims);
  if (tokens.size() == 3) {
    return StrategyParams::make(parse_double(tokens[0]), parse_double(tokens[1]),
                                parse_double(tokens[2]), dims);
  }
  throw ConfigError("strategy must be C, D, Q or theta,alpha,beta");
}

json game_json(const GameSpec& g) {
  return {{"name", g.name},
          {"a", {{g.a[0][0], g.a[0][1]}, {g.a[1][0], g.a[1][1]}}},
          {"b", {{g.b[0][0], g.b[0][1]}, {g.b[1][0], g.b[1][1]}}}};
}

json params_json(const StrategyParams& p) {
  return {{"theta", p.theta()}, {"alpha", p.alpha()}, {"beta", p.beta()}, {"dims", p.dims()}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string surface_csv(const Surface& s) {
  std::string out;
  for (const auto& ax : s.axes) out += ax.name + ",";
  out += "payoff_A,payoff_B\n";
  const std::size_t dims = s.axes.size();
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    std::vector<std::size_t> idx(dims);
    std::size_t rest = flat;
    for (std::size_t ax = dims; ax-- > 0;) {
      idx[ax] = rest % s.axes[ax].values.size();
      rest /= s.axes[ax].values.size();
    }
    for (std::size_t ax = 0; ax < dims; ++ax) out += format_number(s.axes[ax].values[idx[ax]]) + ",";
    out += format_number(s.values_a[flat]) + "," + format_number(s.values_b[flat]) + "\n";
  }
  return out;
}

json surface_json(const Surface& s) {
  json axes = json::array();
  for (const auto& ax : s.axes) axes.push_back({{"name", ax.name}, {"values", ax.values}});
  return {{"context", s.context}, {"axes", axes}, {"payoff_A", s.values_a}, {"payoff_B", s.values_b}};
}

json metadata(const RunConfig& cfg, const char* command, const GameSpec& game) {
  return {{"command", command},
          {"game", game_json(game)},
          {"seed", cfg.seed},
          {"quadrature", {{"nodes", cfg.quad_nodes}, {"nodes_3d", cfg.quad_nodes_3d}, {"self_check", cfg.self_check}}}};
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions o;
  o.tremble_dims = cfg.tremble_dims;
  o.response_dims = cfg.response_dims > 0 ? cfg.response_dims : std::min(cfg.tremble_dims, 2);
  o.one_side = cfg.one_side;
  o.search.grid_nodes = cfg.search_nodes;
  o.quad = cfg.quadrature();
  return o;
}

Profile profile_of(const RunConfig& cfg) {
  return {parse_strategy(cfg.strategy_a, 3), parse_strategy(cfg.strategy_b, 3)};
}

json verdict_json(const RobustnessVerdict& v) {
  json responses = json::array();
  for (const auto& r : v.responses) {
    responses.push_back({{"responder", player_name(r.responder)},
                         {"holds", r.holds},
                         {"distance", r.distance},
                         {"margin", r.margin},
                         {"best_response", params_json(r.best_response)},
                         {"best_payoff", r.best_value},
                         {"equilibrium_payoff", r.equilibrium_value}});
  }
  return {{"kappa", v.kappa}, {"holds", v.holds}, {"distance", v.distance}, {"margin", v.margin},
          {"responses", responses}};
}

}  // namespace

StrategyParams parse_strategy(const std::string& literal, int dims) {
  return strategy_from_tokens(split(literal, ','), dims);
}

StrategyDistribution parse_distribution(const std::string& literal, int default_dims) {
  const auto colon = literal.find(':');
  if (colon == std::string::npos) throw ConfigError("distribution must be pure:<s> or tremble:<s>,kappa=<k>");
  const std::string kind = literal.substr(0, colon);
  std::vector<std::string> strategy_tokens;
  double kappa = -1.0;
  int dims = default_dims;
  for (const auto& tok : split(literal.substr(colon + 1), ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      strategy_tokens.push_back(tok);
      continue;
    }
    const std::string key = tok.substr(0, eq);
    const std::string value = tok.substr(eq + 1);
    if (key == "kappa") {
      kappa = parse_double(value);
    } else if (key == "dims") {
      dims = static_cast<int>(parse_double(value));
    } else {
      throw ConfigError("unknown distribution key '" + key + "'");
    }
  }
  if (kind == "pure") {
    if (kappa >= 0.0) throw ConfigError("pure strategies take no kappa");
    return StrategyDistribution::pure(strategy_from_tokens(strategy_tokens, 3));
  }
  if (kind == "tremble") {
    if (kappa < 0.0) throw ConfigError("tremble needs kappa=<value> >= 0");
    return StrategyDistribution::trembled(TrembleSpec::make(strategy_from_tokens(strategy_tokens, dims), kappa));
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string run_surface(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg.game);
  const StrategyDistribution opponent = parse_distribution(cfg.opponent, cfg.dims);
  const Surface s = payoff_surface(game, cfg.vary, cfg.dims, opponent, cfg.nodes, cfg.quadrature());
  if (cfg.format == Format::Csv) return surface_csv(s);
  json j = metadata(cfg, "surface", game);
  j["vary"] = player_name(cfg.vary);
  j["dims"] = cfg.dims;
  j["opponent"] = cfg.opponent;
  j["nodes"] = cfg.nodes;
  j["surface"] = surface_json(s);
  return dump(j);
}

std::string run_thp(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg.game);
  const ScanOptions opts = scan_options(cfg);
  const auto verdicts = thp_scan(game, profile_of(cfg), cfg.kappas, opts);
  if (cfg.format == Format::Csv) {
    std::string out = "kappa,holds,distance,margin\n";
    for (const auto& v : verdicts) {
      out += format_number(v.kappa) + "," + (v.holds ? "true" : "false") + "," +
             format_number(v.distance) + "," + format_number(v.margin) + "\n";
    }
    return out;
  }
  json j = metadata(cfg, "thp", game);
  j["profile"] = {cfg.strategy_a, cfg.strategy_b};
  j["tremble_dims"] = opts.tremble_dims;
  j["response_dims"] = opts.response_dims;
  j["search_nodes"] = opts.search.grid_nodes;
  j["one_side"] = opts.one_side;
  j["single_crossing"] = single_crossing(verdicts);
  json records = json::array();
  for (const auto& v : verdicts) records.push_back(verdict_json(v));
  j["records"] = records;
  return dump(j);
}

std::string run_threshold(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg.game);
  const ScanOptions opts = scan_options(cfg);
  const ThresholdResult r = threshold_search(game, profile_of(cfg), cfg.kappa_lo, cfg.kappa_hi, cfg.tol, opts);
  if (cfg.format == Format::Csv) {
    return "kappa_star,lo,hi,tol,holds_at_lo,holds_at_hi,single_crossing\n" + format_number(r.kappa_star) +
           "," + format_number(r.lo) + "," + format_number(r.hi) + "," + format_number(r.tol) + "," +
           (r.holds_at_lo ? "true" : "false") + "," + (r.holds_at_hi ? "true" : "false") + "," +
           (r.single_crossing ? "true" : "false") + "\n";
  }
  json j = metadata(cfg, "threshold", game);
  j["profile"] = {cfg.strategy_a, cfg.strategy_b};
  j["tremble_dims"] = opts.tremble_dims;
  j["response_dims"] = opts.response_dims;
  j["kappa_star"] = r.kappa_star;
  j["bracket"] = {r.lo, r.hi};
  j["initial_bracket"] = {r.initial_lo, r.initial_hi};
  j["tol"] = r.tol;
  j["holds_at_lo"] = r.holds_at_lo;
  j["holds_at_hi"] = r.holds_at_hi;
  j["single_crossing"] = r.single_crossing;
  return dump(j);
}

std::string run_classical(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg.game);
  const Surface s = classical_surface(game, cfg.nodes);
  if (cfg.format == Format::Csv) return surface_csv(s);
  json j = metadata(cfg, "classical", game);
  j["epsilon"] = cfg.epsilon;
  json eqs = json::array();
  for (const auto& e : classical_equilibria(game)) {
    eqs.push_back({{"profile", std::string(move_name(e.a)) + move_name(e.b)},
                   {"kind", e.strict ? "strict" : "weak"},
                   {"thp", classical_thp_check(game, e.a, e.b, cfg.epsilon)}});
  }
  j["equilibria"] = eqs;
  j["surface"] = surface_json(s);
  return dump(j);
}

std::string run_payoff(const RunConfig& cfg) {
  const GameSpec game = resolve_game(cfg.game);
  const StrategyDistribution a = parse_distribution(cfg.dist_a, 2);
  const StrategyDistribution b = parse_distribution(cfg.dist_b, 2);
  const PayoffPair q = smeared_payoff(game, a, b, cfg.quadrature());
  json j = metadata(cfg, "payoff", game);
  j["a"] = cfg.dist_a;
  j["b"] = cfg.dist_b;
  j["quadrature_payoff"] = {{"payoff_A", q.a}, {"payoff_B", q.b}};
  std::string csv = "method,payoff_A,payoff_B,stderr_A,stderr_B\nquadrature," + format_number(q.a) + "," +
                    format_number(q.b) + ",0,0\n";
  if (cfg.mc_samples > 0) {
    const McEstimate mc = smeared_payoff_mc(game, a, b, cfg.mc_samples, cfg.seed);
    j["monte_carlo"] = {{"samples", cfg.mc_samples},
                        {"payoff_A", mc.payoff_a},
                        {"payoff_B", mc.payoff_b},
                        {"stderr_A", mc.stderr_a},
                        {"stderr_B", mc.stderr_b}};
    csv += "monte_carlo," + format_number(mc.payoff_a) + "," + format_number(mc.payoff_b) + "," +
           format_number(mc.stderr_a) + "," + format_number(mc.stderr_b) + "\n";
  }
  if (cfg.format == Format::Csv) return csv;
  return dump(j);
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

}  // namespace qthp::cli
