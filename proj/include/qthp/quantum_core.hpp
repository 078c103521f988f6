#pragma once

// Eisert-scheme 2x2 quantum games: strategy gates on a maximally entangled
// pair, Bell-basis payoff operators and trace-formula payoffs.

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "qthp/game_spec.hpp"

namespace qthp {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Tolerance ladder.
inline constexpr double kConstructionTol = 1e-12;
inline constexpr double kValidationTol = 1e-9;
inline constexpr double kPositivityTol = 1e-10;

/// Reduce an angle into [-pi, pi].
double wrap_theta(double theta);
/// Reduce an angle into [0, 2pi).
double wrap_phase(double angle);

/// A point (theta, alpha, beta) on the strategy torus. Only the first `dims`
/// coordinates are active; inactive ones are zero.
class StrategyParams {
 public:
  StrategyParams() = default;

  /// Canonicalizes the angles. Throws ConfigError when dims is outside
  /// {1,2,3} or an inactive coordinate is nonzero after reduction.
  static StrategyParams make(double theta, double alpha, double beta, int dims);

  /// C = U(0,0,0), D = U(pi,0,0), Q = U(0,pi,0). Q needs dims >= 2.
  static StrategyParams named(std::string_view name, int dims);

  double theta() const { return theta_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int dims() const { return dims_; }

  /// Coordinate by index 0..2.
  double coord(int i) const { return i == 0 ? theta_ : (i == 1 ? alpha_ : beta_); }

  /// Same point viewed in a larger (or equal) dimension.
  StrategyParams lifted(int dims) const;

  friend bool operator==(const StrategyParams&, const StrategyParams&) = default;

 private:
  double theta_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  int dims_ = 1;
};

/// A 2x2 unitary. Construction from a raw matrix checks U^dagger U = I to
/// the validation gate.
class Unitary {
 public:
  explicit Unitary(const Mat2& m);

  const Mat2& matrix() const { return m_; }

  /// Max absolute entry of U^dagger U - I.
  double unitarity_defect() const;

 private:
  struct Trusted {};
  Unitary(const Mat2& m, Trusted) : m_(m) {}
  friend Unitary su2(const StrategyParams& params);

  Mat2 m_;
};

/// U(theta, alpha, beta) =
///   [  e^{i alpha/2} cos(theta/2)   e^{i beta/2} sin(theta/2) ]
///   [ -e^{-i beta/2} sin(theta/2)   e^{-i alpha/2} cos(theta/2) ]
Unitary su2(const StrategyParams& params);

/// Two-qubit density matrix, basis order |00>,|01>,|10>,|11> (0 = C).
struct QuantumState {
  Mat4 rho;

  /// Hermitian, unit trace and PSD within the construction/positivity gates.
  bool is_valid() const;
};

enum class Outcome { CC = 0, CD = 1, DC = 2, DD = 3 };

/// |psi_CC> = (|00> + i|11>)/sqrt2, |psi_CD> = (|01> - i|10>)/sqrt2,
/// |psi_DC> = (|10> - i|01>)/sqrt2, |psi_DD> = (|11> + i|00>)/sqrt2.
Eigen::Vector4cd bell_state(Outcome o);

/// Projectors onto the four Bell states, ordered CC, CD, DC, DD.
const std::array<Mat4, 4>& bell_projectors();

/// rho_i = |psi_CC><psi_CC|.
QuantumState initial_state();

/// rho_f = (A (x) B) rho_i (A (x) B)^dagger.
QuantumState final_state(const Unitary& a, const Unitary& b);

/// P = sum_xy t_xy pi_xy, with t the player's payoff table.
Mat4 payoff_operator(const GameSpec& game, Player player);

/// Tr(P_A rho), Tr(P_B rho).
PayoffPair trace_payoffs(const GameSpec& game, const QuantumState& state);

/// Expected payoffs of the protocol with the given local gates.
PayoffPair expected_payoff(const GameSpec& game, const Unitary& a, const Unitary& b);

/// min over global phase phi of max_ij |U_ij - e^{i phi} V_ij|.
double gate_distance(const Mat2& u, const Mat2& v);

}  // namespace qthp
