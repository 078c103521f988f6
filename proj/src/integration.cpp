#include "qthp/integration.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qthp/errors.hpp"

namespace qthp {

namespace {

constexpr double kWeightSumTol = 1e-12;

inline int mi(int i, int k, int a, int c) { return ((i * 2 + k) * 2 + a) * 2 + c; }

}  // namespace

StrategyDistribution StrategyDistribution::pure(const StrategyParams& params) {
  return StrategyDistribution(PureStrategy{params});
}

StrategyDistribution StrategyDistribution::trembled(const TrembleSpec& spec) {
  validate(spec);
  return StrategyDistribution(TrembledStrategy{spec});
}

StrategyDistribution StrategyDistribution::mixture(std::vector<MixtureEntry> entries) {
  if (entries.empty()) throw ConfigError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& e : entries) {
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw ConfigError("mixture weights must be finite and nonnegative");
    }
    if (const auto* t = std::get_if<TrembledStrategy>(&e.component)) validate(t->spec);
    total += e.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw ConfigError("mixture weights sum to " + std::to_string(total) + ", not 1");
  }
  return StrategyDistribution(std::move(entries));
}

StrategyDistribution::Kind StrategyDistribution::kind() const {
  switch (storage_.index()) {
    case 0: return Kind::Pure;
    case 1: return Kind::Trembled;
    default: return Kind::Mixture;
  }
}

const StrategyParams& StrategyDistribution::pure_params() const {
  return std::get<PureStrategy>(storage_).params;
}

const TrembleSpec& StrategyDistribution::tremble() const {
  return std::get<TrembledStrategy>(storage_).spec;
}

const std::vector<MixtureEntry>& StrategyDistribution::entries() const {
  return std::get<std::vector<MixtureEntry>>(storage_);
}

std::vector<MixtureEntry> StrategyDistribution::components() const {
  switch (kind()) {
    case Kind::Pure: return {MixtureEntry{1.0, std::get<PureStrategy>(storage_)}};
    case Kind::Trembled: return {MixtureEntry{1.0, std::get<TrembledStrategy>(storage_)}};
    case Kind::Mixture: break;
  }
  return entries();
}

QuadratureGrid::QuadratureGrid(int nodes_per_dim, int dims) : n_(nodes_per_dim), dims_(dims) {
  if (nodes_per_dim < 8) throw ConfigError("quadrature needs at least 8 nodes per dimension");
  if (dims < 1 || dims > 3) throw ConfigError("quadrature dims must be 1, 2 or 3");
}

std::size_t QuadratureGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dims_; ++i) s *= static_cast<std::size_t>(n_);
  return s;
}

double QuadratureGrid::weight() const { return std::pow(kTwoPi / n_, dims_); }

double QuadratureGrid::node(int axis, int k) const {
  const double step = kTwoPi * k / n_;
  return axis == 0 ? -kPi + step : step;
}

StrategyParams QuadratureGrid::point(std::size_t flat) const {
  double c[3] = {0.0, 0.0, 0.0};
  for (int axis = dims_ - 1; axis >= 0; --axis) {
    c[axis] = node(axis, static_cast<int>(flat % n_));
    flat /= n_;
  }
  return StrategyParams::make(c[0], c[1], c[2], dims_);
}

QuadratureGrid QuadratureOptions::grid_for(int dims) const {
  return QuadratureGrid(dims == 3 ? nodes_3d : nodes, dims);
}

QuadratureOptions QuadratureOptions::doubled() const {
  QuadratureOptions d = *this;
  d.nodes *= 2;
  d.nodes_3d *= 2;
  d.self_check = false;
  return d;
}

GateMoment gate_moment(const Unitary& u) {
  const Mat2& m = u.matrix();
  GateMoment g{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) g[mi(i, k, a, c)] = m(i, a) * std::conj(m(k, c));
  return g;
}

namespace {

// U(t, a + 2 pi, b) = -U(-t, a, b) and U(t, a, b + 2 pi) = U(-t, a, b), so on the
// a = 0 and b = 0 seams the integrand jumps between theta and -theta. Seam
// nodes take the mean of both one-sided limits, which keeps the periodic
// trapezoid rule consistent for off-axis centers.
bool on_seam(const StrategyParams& p) {
  return (p.dims() >= 2 && p.alpha() == 0.0) || (p.dims() == 3 && p.beta() == 0.0);
}

StrategyParams mirrored(const StrategyParams& p) {
  return StrategyParams::make(-p.theta(), p.alpha(), p.beta(), p.dims());
}

// Node list with normalized weights; seam nodes appear twice at half weight.
std::vector<std::pair<double, StrategyParams>> tremble_nodes(const TrembleSpec& spec,
                                                             const QuadratureGrid& grid) {
  validate(spec);
  if (grid.dims() != spec.dims) throw ConfigError("quadrature grid dims differ from tremble dims");
  std::vector<std::pair<double, StrategyParams>> out;
  out.reserve(grid.size());
  double mass = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const StrategyParams p = grid.point(n);
    const double f = torus_vm_density(p, spec);
    mass += f;
    if (on_seam(p)) {
      out.emplace_back(0.5 * f, p);
      out.emplace_back(0.5 * f, mirrored(p));
    } else {
      out.emplace_back(f, p);
    }
  }
  for (auto& node : out) node.first /= mass;
  return out;
}

}  // namespace

GateMoment tremble_moment(const TrembleSpec& spec, const QuadratureGrid& grid) {
  GateMoment acc{};
  for (const auto& [weight, p] : tremble_nodes(spec, grid)) {
    const GateMoment g = gate_moment(su2(p));
    for (int t = 0; t < 16; ++t) acc[t] += weight * g[t];
  }
  return acc;
}

namespace {

GateMoment component_moment(const MixtureComponent& c, const QuadratureOptions& opts) {
  if (const auto* p = std::get_if<PureStrategy>(&c)) return gate_moment(su2(p->params));
  const auto& spec = std::get<TrembledStrategy>(c).spec;
  return tremble_moment(spec, opts.grid_for(spec.dims));
}

}  // namespace

namespace {

GateMoment mixed_moment(const StrategyDistribution& dist, const QuadratureOptions& opts) {
  GateMoment acc{};
  for (const auto& e : dist.components()) {
    const GateMoment g = component_moment(e.component, opts);
    for (int t = 0; t < 16; ++t) acc[t] += e.weight * g[t];
  }
  return acc;
}

}  // namespace

GateMoment distribution_moment(const StrategyDistribution& dist, const QuadratureOptions& opts) {
  const GateMoment m = mixed_moment(dist, opts);
  if (opts.self_check && dist.kind() != StrategyDistribution::Kind::Pure) {
    const GateMoment fine = mixed_moment(dist, opts.doubled());
    double delta = 0.0;
    for (int t = 0; t < 16; ++t) delta = std::max(delta, std::abs(fine[t] - m[t]));
    if (delta > opts.self_check_tol) {
      throw GridTooCoarseError("quadrature self-check failed: doubling the grid moved the gate average by " +
                                   std::to_string(delta),
                               delta);
    }
  }
  return m;
}

QuantumState averaged_final_state(const GateMoment& ma, const GateMoment& mb) {
  const Mat4& rho = initial_state().rho;
  Mat4 out = Mat4::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          Complex s = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                  const Complex r = rho(2 * a + b, 2 * c + d);
                  if (r == Complex(0.0)) continue;
                  s += ma[mi(i, k, a, c)] * mb[mi(j, l, b, d)] * r;
                }
          out(2 * i + j, 2 * k + l) = s;
        }
  return QuantumState{out};
}

PayoffPair payoff_from_moments(const GameSpec& game, const GateMoment& a, const GateMoment& b) {
  return trace_payoffs(game, averaged_final_state(a, b));
}

ResponseEvaluator::ResponseEvaluator(const GameSpec& game, Player responder,
                                     const GateMoment& opponent)
    : responder_(responder) {
  // Tr(P rho_f) = sum_{ikac} M_resp[i,k,a,c] K[i,k,a,c], with the opponent
  // moment, rho_i and P folded into K.
  const Mat4& rho = initial_state().rho;
  for (int owner = 0; owner < 2; ++owner) {
    const Mat4 P = payoff_operator(game, owner == 0 ? Player::A : Player::B);
    GateMoment& kern = kernel_[owner];
    kern.fill(0.0);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a)
          for (int c = 0; c < 2; ++c) {
            Complex s = 0.0;
            for (int j = 0; j < 2; ++j)
              for (int l = 0; l < 2; ++l)
                for (int b = 0; b < 2; ++b)
                  for (int d = 0; d < 2; ++d) {
                    // Responder indices (i,k,a,c) sit in the slot of its qubit.
                    Complex p, r;
                    if (responder == Player::A) {
                      p = P(2 * k + l, 2 * i + j);
                      r = rho(2 * a + b, 2 * c + d);
                    } else {
                      p = P(2 * l + k, 2 * j + i);
                      r = rho(2 * b + a, 2 * d + c);
                    }
                    if (r == Complex(0.0)) continue;
                    s += p * opponent[mi(j, l, b, d)] * r;
                  }
            kern[mi(i, k, a, c)] = s;
          }
  }
}

PayoffPair ResponseEvaluator::payoff(const Unitary& u) const {
  const Mat2& m = u.matrix();
  Complex pa = 0.0, pb = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
          const Complex g = m(i, a) * std::conj(m(k, c));
          pa += g * kernel_[0][mi(i, k, a, c)];
          pb += g * kernel_[1][mi(i, k, a, c)];
        }
  return {pa.real(), pb.real()};
}

PayoffPair smeared_payoff(const GameSpec& game, const StrategyDistribution& a,
                          const StrategyDistribution& b, const QuadratureOptions& opts) {
  QuadratureOptions base = opts;
  base.self_check = false;
  const PayoffPair result =
      payoff_from_moments(game, distribution_moment(a, base), distribution_moment(b, base));
  if (opts.self_check) {
    const QuadratureOptions fine = opts.doubled();
    const PayoffPair check =
        payoff_from_moments(game, distribution_moment(a, fine), distribution_moment(b, fine));
    const double delta = std::max(std::abs(check.a - result.a), std::abs(check.b - result.b));
    if (delta > opts.self_check_tol) {
      throw GridTooCoarseError("quadrature self-check failed: doubling the grid moved the payoff by " +
                                   std::to_string(delta),
                               delta);
    }
  }
  return result;
}

namespace {

struct WeightedGate {
  double weight;
  Unitary gate;
};

std::vector<WeightedGate> expand_nodes(const StrategyDistribution& dist, const QuadratureOptions& opts) {
  std::vector<WeightedGate> out;
  for (const auto& e : dist.components()) {
    if (const auto* p = std::get_if<PureStrategy>(&e.component)) {
      out.push_back({e.weight, su2(p->params)});
      continue;
    }
    const auto& spec = std::get<TrembledStrategy>(e.component).spec;
    for (const auto& [weight, p] : tremble_nodes(spec, opts.grid_for(spec.dims))) {
      out.push_back({e.weight * weight, su2(p)});
    }
  }
  return out;
}

}  // namespace

PayoffPair smeared_payoff_direct(const GameSpec& game, const StrategyDistribution& a,
                                 const StrategyDistribution& b, const QuadratureOptions& opts) {
  const auto na = expand_nodes(a, opts);
  const auto nb = expand_nodes(b, opts);
  PayoffPair acc;
  for (const auto& x : na) {
    for (const auto& y : nb) {
      const PayoffPair p = expected_payoff(game, x.gate, y.gate);
      const double w = x.weight * y.weight;
      acc.a += w * p.a;
      acc.b += w * p.b;
    }
  }
  return acc;
}

namespace {

StrategyParams draw(Rng& rng, const StrategyDistribution& dist) {
  if (dist.kind() == StrategyDistribution::Kind::Pure) return dist.pure_params();
  if (dist.kind() == StrategyDistribution::Kind::Trembled) return sample_torus(rng, dist.tremble());
  const auto& entries = dist.entries();
  const double u = uniform_open01(rng);
  double cumulative = 0.0;
  const MixtureComponent* chosen = &entries.back().component;
  for (const auto& e : entries) {
    cumulative += e.weight;
    if (u < cumulative) {
      chosen = &e.component;
      break;
    }
  }
  if (const auto* p = std::get_if<PureStrategy>(chosen)) return p->params;
  return sample_torus(rng, std::get<TrembledStrategy>(*chosen).spec);
}

}  // namespace

McEstimate smeared_payoff_mc(const GameSpec& game, const StrategyDistribution& a,
                             const StrategyDistribution& b, std::int64_t n_samples,
                             std::uint64_t seed) {
  if (n_samples < 1000) throw ConfigError("Monte Carlo needs at least 1000 samples");
  Rng rng(seed);
  // Welford running mean / sum of squared deviations.
  double mean_a = 0.0, mean_b = 0.0, m2_a = 0.0, m2_b = 0.0;
  for (std::int64_t n = 1; n <= n_samples; ++n) {
    const StrategyParams pa = draw(rng, a);
    const StrategyParams pb = draw(rng, b);
    const PayoffPair p = expected_payoff(game, su2(pa), su2(pb));
    const double da = p.a - mean_a;
    const double db = p.b - mean_b;
    mean_a += da / n;
    mean_b += db / n;
    m2_a += da * (p.a - mean_a);
    m2_b += db * (p.b - mean_b);
  }
  const double n = static_cast<double>(n_samples);
  McEstimate out;
  out.payoff_a = mean_a;
  out.payoff_b = mean_b;
  out.stderr_a = std::sqrt(m2_a / (n - 1.0) / n);
  out.stderr_b = std::sqrt(m2_b / (n - 1.0) / n);
  return out;
}

PayoffPair discrete_mixture_payoff(const GameSpec& game, const StrategyDistribution& mix_a,
                                   const StrategyDistribution& mix_b, const QuadratureOptions& opts) {
  auto as_dist = [](const MixtureComponent& c) {
    if (const auto* p = std::get_if<PureStrategy>(&c)) return StrategyDistribution::pure(p->params);
    return StrategyDistribution::trembled(std::get<TrembledStrategy>(c).spec);
  };
  PayoffPair acc;
  for (const auto& ea : mix_a.components()) {
    for (const auto& eb : mix_b.components()) {
      const PayoffPair p = smeared_payoff(game, as_dist(ea.component), as_dist(eb.component), opts);
      acc.a += ea.weight * eb.weight * p.a;
      acc.b += ea.weight * eb.weight * p.b;
    }
  }
  return acc;
}

}  // namespace qthp
