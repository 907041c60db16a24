#pragma once

// Truncated Fock-space representation of the harmonic oscillator:
// physical parameters, state vectors, and dense operator matrices.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qho {

using complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Default tolerance on |norm^2 - 1| for a state to count as physical.
inline constexpr double default_norm_tolerance = 1e-10;

/// Thrown when operands live in Fock spaces of different truncation.
class dimension_mismatch : public std::invalid_argument {
 public:
  dimension_mismatch(std::size_t expected, std::size_t actual)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Physical constants hbar, M, omega. All strictly positive.
class OscillatorParams {
 public:
  OscillatorParams(double hbar, double mass, double omega) : hbar_(hbar), mass_(mass), omega_(omega) {
    if (!(hbar > 0.0) || !(mass > 0.0) || !(omega > 0.0) || !std::isfinite(hbar) || !std::isfinite(mass) ||
        !std::isfinite(omega)) {
      throw std::invalid_argument("oscillator parameters must be finite and strictly positive");
    }
    const double l = length_scale();
    if (!std::isfinite(l) || l == 0.0) {
      throw std::invalid_argument("oscillator length scale sqrt(hbar/(M omega)) is degenerate");
    }
  }

  /// hbar = M = omega = 1.
  static OscillatorParams natural() { return {1.0, 1.0, 1.0}; }

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double omega() const noexcept { return omega_; }

  /// sqrt(hbar / (M omega))
  double length_scale() const { return std::sqrt(hbar_ / (mass_ * omega_)); }
  /// sqrt(M hbar omega)
  double momentum_scale() const { return std::sqrt(mass_ * hbar_ * omega_); }
  /// hbar omega (n + 1/2)
  double level_energy(std::size_t n) const { return hbar_ * omega_ * (static_cast<double>(n) + 0.5); }

 private:
  double hbar_;
  double mass_;
  double omega_;
};

/// Fock-basis amplitudes C_0..C_nmax at a given time.
struct StateVector {
  ComplexVector coeffs;
  double time = 0.0;

  StateVector() = default;
  explicit StateVector(ComplexVector c, double t = 0.0) : coeffs(std::move(c)), time(t) {
    if (coeffs.size() == 0) throw std::invalid_argument("state vector needs at least one level");
  }

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(coeffs.size()); }
  std::size_t n_max() const noexcept { return dimension() - 1; }
  double norm_squared() const { return coeffs.squaredNorm(); }

  bool is_normalized(double tolerance = default_norm_tolerance) const {
    return std::abs(norm_squared() - 1.0) <= tolerance;
  }
};

/// Dense square matrix on the truncated basis 0..n_max.
struct Operator {
  ComplexMatrix matrix;

  Operator() = default;
  explicit Operator(ComplexMatrix m) : matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
      throw std::invalid_argument("operator matrix must be square and non-empty");
    }
  }

  static Operator identity(std::size_t n_max) {
    const auto d = static_cast<Eigen::Index>(n_max + 1);
    return Operator(ComplexMatrix::Identity(d, d));
  }

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t n_max() const noexcept { return dimension() - 1; }

  Operator adjoint() const { return Operator(matrix.adjoint()); }

  friend Operator operator*(const Operator& lhs, const Operator& rhs) {
    if (lhs.dimension() != rhs.dimension()) throw dimension_mismatch(lhs.dimension(), rhs.dimension());
    return Operator(lhs.matrix * rhs.matrix);
  }
  friend Operator operator+(const Operator& lhs, const Operator& rhs) {
    if (lhs.dimension() != rhs.dimension()) throw dimension_mismatch(lhs.dimension(), rhs.dimension());
    return Operator(lhs.matrix + rhs.matrix);
  }
  friend Operator operator-(const Operator& lhs, const Operator& rhs) {
    if (lhs.dimension() != rhs.dimension()) throw dimension_mismatch(lhs.dimension(), rhs.dimension());
    return Operator(lhs.matrix - rhs.matrix);
  }
  friend Operator operator*(complex s, const Operator& op) { return Operator(s * op.matrix); }

  /// op |state>, keeping the state's timestamp.
  StateVector apply(const StateVector& state) const {
    if (state.dimension() != dimension()) throw dimension_mismatch(dimension(), state.dimension());
    return StateVector(matrix * state.coeffs, state.time);
  }
};

inline Operator commutator(const Operator& lhs, const Operator& rhs) { return lhs * rhs - rhs * lhs; }

struct LadderPair {
  Operator a;
  Operator a_dagger;
};

/// a|n> = sqrt(n)|n-1>, a+ = conjugate transpose of a.
inline LadderPair make_ladder(std::size_t n_max) {
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Operator lowering(std::move(a));
  Operator raising = lowering.adjoint();
  return {std::move(lowering), std::move(raising)};
}

struct PositionMomentum {
  Operator x;
  Operator p;
};

/// x = sqrt(hbar/2M omega)(a+ + a),  p = i sqrt(M hbar omega/2)(a+ - a).
inline PositionMomentum make_xp(const OscillatorParams& params, std::size_t n_max) {
  const auto [a, ad] = make_ladder(n_max);
  const double x_scale = std::sqrt(params.hbar() / (2.0 * params.mass() * params.omega()));
  const double p_scale = std::sqrt(params.mass() * params.hbar() * params.omega() / 2.0);
  return {complex(x_scale, 0.0) * (ad + a), complex(0.0, p_scale) * (ad - a)};
}

/// diag(hbar omega (n + 1/2)), n = 0..n_max.
inline Operator make_hamiltonian(const OscillatorParams& params, std::size_t n_max) {
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) h(n, n) = params.level_energy(static_cast<std::size_t>(n));
  return Operator(std::move(h));
}

inline StateVector fock_state(std::size_t n, std::size_t n_max) {
  if (n > n_max) {
    throw std::out_of_range("fock level " + std::to_string(n) + " exceeds truncation n_max=" +
                            std::to_string(n_max));
  }
  ComplexVector c = ComplexVector::Zero(static_cast<Eigen::Index>(n_max + 1));
  c(static_cast<Eigen::Index>(n)) = 1.0;
  return StateVector(std::move(c), 0.0);
}

/// <state| op |state>
inline complex expectation(const Operator& op, const StateVector& state) {
  if (op.dimension() != state.dimension()) throw dimension_mismatch(op.dimension(), state.dimension());
  return state.coeffs.dot(op.matrix * state.coeffs);
}

/// <state| lhs rhs |state>, applying the factors in turn instead of forming the product matrix.
inline complex expectation_of_product(const Operator& lhs, const Operator& rhs, const StateVector& state) {
  if (lhs.dimension() != state.dimension()) throw dimension_mismatch(lhs.dimension(), state.dimension());
  if (rhs.dimension() != state.dimension()) throw dimension_mismatch(rhs.dimension(), state.dimension());
  return state.coeffs.dot(lhs.matrix * (rhs.matrix * state.coeffs));
}

inline bool is_hermitian(const Operator& op, double tolerance = 0.0) {
  return (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

}  // namespace qho
