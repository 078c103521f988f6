#include "qthp/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qthp/errors.hpp"

namespace qthp {

double wrap_theta(double theta) {
  if (!std::isfinite(theta)) throw ConfigError("non-finite angle");
  return std::remainder(theta, kTwoPi);
}

double wrap_phase(double angle) {
  if (!std::isfinite(angle)) throw ConfigError("non-finite angle");
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

StrategyParams StrategyParams::make(double theta, double alpha, double beta, int dims) {
  if (dims < 1 || dims > 3) {
    throw ConfigError("strategy dims must be 1, 2 or 3, got " + std::to_string(dims));
  }
  StrategyParams p;
  p.theta_ = wrap_theta(theta);
  p.alpha_ = wrap_phase(alpha);
  p.beta_ = wrap_phase(beta);
  p.dims_ = dims;
  if (dims < 2 && p.alpha_ != 0.0) throw ConfigError("alpha must be 0 when dims < 2");
  if (dims < 3 && p.beta_ != 0.0) throw ConfigError("beta must be 0 when dims < 3");
  return p;
}

StrategyParams StrategyParams::named(std::string_view name, int dims) {
  if (name == "C") return make(0.0, 0.0, 0.0, dims);
  if (name == "D") return make(kPi, 0.0, 0.0, dims);
  if (name == "Q") {
    if (dims < 2) throw ConfigError("strategy Q needs at least 2 active parameters");
    return make(0.0, kPi, 0.0, dims);
  }
  throw ConfigError("unknown strategy name '" + std::string(name) + "'");
}

StrategyParams StrategyParams::lifted(int dims) const {
  if (dims < dims_) throw ConfigError("cannot lower the dimension of a strategy");
  return make(theta_, alpha_, beta_, dims);
}

Unitary::Unitary(const Mat2& m) : m_(m) {
  const double defect = unitarity_defect();
  if (!(defect <= kValidationTol)) {
    throw NotUnitaryError("matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
}

double Unitary::unitarity_defect() const {
  const Mat2 d = m_.adjoint() * m_ - Mat2::Identity();
  return d.cwiseAbs().maxCoeff();
}

Unitary su2(const StrategyParams& p) {
  const double c = std::cos(0.5 * p.theta());
  const double s = std::sin(0.5 * p.theta());
  const Complex ea = std::polar(1.0, 0.5 * p.alpha());
  const Complex eb = std::polar(1.0, 0.5 * p.beta());
  Mat2 m;
  m << ea * c, eb * s,
       -std::conj(eb) * s, std::conj(ea) * c;
  return Unitary(m, Unitary::Trusted{});
}

bool QuantumState::is_valid() const {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kConstructionTol) return false;
  if (std::abs(rho.trace() - Complex(1.0)) > kConstructionTol) return false;
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -kPositivityTol;
}

Eigen::Vector4cd bell_state(Outcome o) {
  const double h = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (o) {
    case Outcome::CC: v(0) = h; v(3) = i * h; break;
    case Outcome::CD: v(1) = h; v(2) = -i * h; break;
    case Outcome::DC: v(2) = h; v(1) = -i * h; break;
    case Outcome::DD: v(3) = h; v(0) = i * h; break;
  }
  return v;
}

const std::array<Mat4, 4>& bell_projectors() {
  static const std::array<Mat4, 4> projectors = [] {
    std::array<Mat4, 4> out;
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector4cd v = bell_state(static_cast<Outcome>(k));
      out[k] = v * v.adjoint();
    }
    return out;
  }();
  return projectors;
}

QuantumState initial_state() { return QuantumState{bell_projectors()[0]}; }

namespace {

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

QuantumState final_state(const Unitary& a, const Unitary& b) {
  const Mat4 k = kron(a.matrix(), b.matrix());
  return QuantumState{k * initial_state().rho * k.adjoint()};
}

Mat4 payoff_operator(const GameSpec& game, Player player) {
  const Payoff2x2& t = game.table(player);
  const auto& pi = bell_projectors();
  return t[0][0] * pi[0] + t[0][1] * pi[1] + t[1][0] * pi[2] + t[1][1] * pi[3];
}

PayoffPair trace_payoffs(const GameSpec& game, const QuantumState& state) {
  // Tr(P rho) = sum_xy t_xy <psi_xy|rho|psi_xy>.
  std::array<double, 4> weight{};
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector4cd v = bell_state(static_cast<Outcome>(k));
    weight[k] = (v.adjoint() * state.rho * v)(0, 0).real();
  }
  auto contract = [&](const Payoff2x2& t) {
    return t[0][0] * weight[0] + t[0][1] * weight[1] + t[1][0] * weight[2] + t[1][1] * weight[3];
  };
  return {contract(game.a), contract(game.b)};
}

PayoffPair expected_payoff(const GameSpec& game, const Unitary& a, const Unitary& b) {
  return trace_payoffs(game, final_state(a, b));
}

double gate_distance(const Mat2& u, const Mat2& v) {
  // Each |u_k - e^{i phi} v_k|^2 = s_k - 2 r_k cos(phi - d_k). The minimax over
  // phi sits at a minimizer of one term or at a crossing of two terms.
  std::array<double, 4> s{}, r{}, d{};
  for (int k = 0; k < 4; ++k) {
    const Complex uk = u(k / 2, k % 2);
    const Complex vk = v(k / 2, k % 2);
    s[k] = std::norm(uk) + std::norm(vk);
    r[k] = std::abs(uk) * std::abs(vk);
    d[k] = (r[k] > 0.0) ? std::arg(uk) - std::arg(vk) : 0.0;
  }
  auto worst = [&](double phi) {
    double m = 0.0;
    for (int k = 0; k < 4; ++k) m = std::max(m, s[k] - 2.0 * r[k] * std::cos(phi - d[k]));
    return std::sqrt(std::max(m, 0.0));
  };

  std::vector<double> candidates{0.0};
  for (int k = 0; k < 4; ++k)
    if (r[k] > 0.0) candidates.push_back(d[k]);
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) {
      // A cos(phi) + B sin(phi) = C
      const double A = 2.0 * (r[j] * std::cos(d[j]) - r[k] * std::cos(d[k]));
      const double B = 2.0 * (r[j] * std::sin(d[j]) - r[k] * std::sin(d[k]));
      const double C = s[j] - s[k];
      const double R = std::hypot(A, B);
      if (R < 1e-300 || std::abs(C) > R) continue;
      const double base = std::atan2(B, A);
      const double spread = std::acos(std::clamp(C / R, -1.0, 1.0));
      candidates.push_back(base + spread);
      candidates.push_back(base - spread);
    }
  }
  double best = worst(candidates.front());
  for (double phi : candidates) best = std::min(best, worst(phi));
  return best;
}

}  // namespace qthp
