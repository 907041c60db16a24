#pragma once

// Position-space picture: Hermite polynomials, oscillator eigenfunctions,
// the coherent wave packet as a Fock series and in closed form, and
// quadrature on spatial grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qho/coherent.hpp"
#include "qho/fock.hpp"
#include "qho/observables.hpp"

namespace qho {

/// Physicists' Hermite polynomial by H_{n+1} = 2x H_n - 2n H_{n-1}.
/// Overflows for large n*|x| (around n ~ 150 at moderate x); use eigenfunction() for normalized values.
inline double hermite(std::size_t n, double x) {
  double previous = 1.0;
  if (n == 0) return previous;
  double current = 2.0 * x;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = 2.0 * x * current - 2.0 * static_cast<double>(k) * previous;
    previous = current;
    current = next;
  }
  return current;
}

/// phi_0(x) .. phi_n_max(x) via the normalized recurrence
///   phi_{n+1} = sqrt(2/(n+1)) xi phi_n - sqrt(n/(n+1)) phi_{n-1},  xi = x / length_scale.
/// The Gaussian is folded into phi_0, so large n stays finite.
inline std::vector<double> eigenfunctions(std::size_t n_max, double x, const OscillatorParams& params) {
  const double xi = x / params.length_scale();
  const double prefactor = std::pow(params.mass() * params.omega() / (pi * params.hbar()), 0.25);
  std::vector<double> phi(n_max + 1);
  phi[0] = prefactor * std::exp(-0.5 * xi * xi);
  if (n_max >= 1) phi[1] = std::sqrt(2.0) * xi * phi[0];
  for (std::size_t n = 1; n < n_max; ++n) {
    const double nd = static_cast<double>(n);
    phi[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * xi * phi[n] - std::sqrt(nd / (nd + 1.0)) * phi[n - 1];
  }
  return phi;
}

inline double eigenfunction(std::size_t n, double x, const OscillatorParams& params) {
  return eigenfunctions(n, x, params)[n];
}

/// |sum_{k<=k_max} t^k H_k(x)/k! - e^{2xt - t^2}|.
/// Terms h_k = t^k H_k(x)/k! obey h_{k+1} = (2xt h_k - 2t^2 h_{k-1}) / (k+1).
inline double generating_sum_check(double x, double t, std::size_t k_max) {
  double previous = 1.0;
  double sum = previous;
  // Neumaier compensation; the partial sums can exceed the result by a few orders of magnitude.
  double compensation = 0.0;
  auto accumulate = [&](double term) {
    const double s = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
    sum = s;
  };
  if (k_max >= 1) {
    double current = 2.0 * x * t;
    accumulate(current);
    for (std::size_t k = 1; k < k_max; ++k) {
      const double next = (2.0 * x * t * current - 2.0 * t * t * previous) / static_cast<double>(k + 1);
      previous = current;
      current = next;
      accumulate(current);
    }
  }
  return std::abs((sum + compensation) - std::exp(2.0 * x * t - t * t));
}

struct WaveSample {
  double x = 0.0;
  complex value{};
};

/// Ordered quadrature nodes with positive weights.
class SpatialGrid {
 public:
  SpatialGrid(std::vector<double> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) throw std::invalid_argument("grid points and weights differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(weights_[i] > 0.0)) throw std::invalid_argument("grid weights must be positive");
      if (i > 0 && !(points_[i] > points_[i - 1])) throw std::invalid_argument("grid points must increase");
    }
  }

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

  /// Uniform trapezoid rule on [center - halfwidth, center + halfwidth].
  static SpatialGrid trapezoid(double center, double halfwidth, std::size_t count) {
    if (count < 2) throw std::invalid_argument("trapezoid grid needs at least two points");
    if (!(halfwidth > 0.0)) throw std::invalid_argument("grid halfwidth must be positive");
    const double step = 2.0 * halfwidth / static_cast<double>(count - 1);
    std::vector<double> points(count);
    std::vector<double> weights(count, step);
    for (std::size_t i = 0; i < count; ++i) points[i] = center - halfwidth + step * static_cast<double>(i);
    weights.front() = weights.back() = 0.5 * step;
    return {std::move(points), std::move(weights)};
  }

  /// Gauss-Hermite rule scaled to the oscillator length, with the e^{-xi^2}
  /// weight divided out so that sum w f(x) approximates the plain integral of f.
  /// Exact for |phi_m phi_n|-type integrands up to m + n <= 2 order - 1.
  static SpatialGrid gauss_hermite(std::size_t order, const OscillatorParams& params, double center = 0.0) {
    if (order == 0) throw std::invalid_argument("Gauss-Hermite order must be positive");
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix with off-diagonal sqrt(k/2).
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
      jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k) / 2.0);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    const double length = params.length_scale();
    std::vector<double> points(order);
    std::vector<double> weights(order);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xi = solver.eigenvalues()(k);
      const double v0 = solver.eigenvectors()(0, k);
      points[static_cast<std::size_t>(k)] = center + length * xi;
      weights[static_cast<std::size_t>(k)] = length * std::sqrt(pi) * v0 * v0 * std::exp(xi * xi);
    }
    return {std::move(points), std::move(weights)};
  }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Default plotting/quadrature grid: center +- halfwidth length scales, trapezoid weights.
inline constexpr double default_grid_halfwidth = 10.0;
inline constexpr std::size_t default_grid_points = 2001;

inline SpatialGrid default_grid(double center, const OscillatorParams& params,
                                double halfwidth_in_lengths = default_grid_halfwidth,
                                std::size_t count = default_grid_points) {
  return SpatialGrid::trapezoid(center, halfwidth_in_lengths * params.length_scale(), count);
}

/// sum_n C_n phi_n(x) for any Fock-basis state.
inline complex position_amplitude(const StateVector& state, double x, const OscillatorParams& params) {
  const std::vector<double> phi = eigenfunctions(state.n_max(), x, params);
  complex value{};
  for (std::size_t n = 0; n <= state.n_max(); ++n) value += state.coeffs(static_cast<Eigen::Index>(n)) * phi[n];
  return value;
}

/// Truncated Fock series sum_n C_n(chi, t) phi_n(x).
inline WaveSample psi_series(const CoherentLabel& label, double x, double t, const OscillatorParams& params,
                             std::size_t n_max) {
  return {x, position_amplitude(dynamical_coherent_state(label, t, params, n_max), x, params)};
}

enum class ClosedForm {
  complex_center,  ///< Gaussian with complex center chi(t) sqrt(2 hbar / M omega)
  mean_trajectory  ///< Gaussian centered at mean_x(t) with plane-wave factor e^{i mean_p x / hbar}
};

/// e^{z} from its real and imaginary parts.
inline complex exp_components(complex z) { return std::exp(z.real()) * unit_phase(z.imag()); }

/// The coherent wave packet in closed form.
inline WaveSample psi_closed(const CoherentLabel& label, double x, double t, const OscillatorParams& params,
                             ClosedForm form = ClosedForm::complex_center) {
  const double m_omega_over_hbar = params.mass() * params.omega() / params.hbar();
  const double prefactor = std::pow(m_omega_over_hbar / pi, 0.25);
  const double half_omega_t = 0.5 * params.omega() * t;

  if (form == ClosedForm::complex_center) {
    const complex chi_t = evolve_label(label, t, params).chi;
    const complex shifted = x - chi_t * std::sqrt(2.0 / m_omega_over_hbar);
    const complex exponent = -0.5 * label.mean_occupation() + complex(0.0, -half_omega_t) + 0.5 * chi_t * chi_t -
                             0.5 * m_omega_over_hbar * shifted * shifted;
    return {x, prefactor * exp_components(exponent)};
  }

  const ObservableRecord means = averages_closedform(label, t, params);
  const double dx = x - means.mean_x;
  const double phase = -(half_omega_t + means.mean_p * means.mean_x / (2.0 * params.hbar())) +
                       means.mean_p * x / params.hbar();
  return {x, prefactor * std::exp(-0.5 * m_omega_over_hbar * dx * dx) * unit_phase(phase)};
}

/// sum w |value|^2
inline double quadrature_norm(std::span<const WaveSample> samples, const SpatialGrid& grid) {
  if (samples.size() != grid.size()) throw std::invalid_argument("samples and grid differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weights()[i] * std::norm(samples[i].value);
  return sum;
}

/// Norm, mean and variance of the density |value|^2 on a grid.
struct PacketMoments {
  double norm = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

inline PacketMoments packet_moments(std::span<const WaveSample> samples, const SpatialGrid& grid) {
  if (samples.size() != grid.size()) throw std::invalid_argument("samples and grid differ in length");
  PacketMoments m;
  double first = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double density = grid.weights()[i] * std::norm(samples[i].value);
    m.norm += density;
    first += density * grid.points()[i];
  }
  if (m.norm == 0.0) return m;
  m.mean = first / m.norm;
  double second = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = grid.points()[i] - m.mean;
    second += grid.weights()[i] * std::norm(samples[i].value) * d * d;
  }
  m.variance = second / m.norm;
  return m;
}

/// Evaluate any x -> WaveSample function on every grid point.
template <class Wave>
std::vector<WaveSample> sample_on(const SpatialGrid& grid, Wave&& wave) {
  std::vector<WaveSample> out;
  out.reserve(grid.size());
  for (double x : grid.points()) out.push_back(wave(x));
  return out;
}

/// Series samples on a grid, computing the Fock coefficients once.
inline std::vector<WaveSample> psi_series_on(const SpatialGrid& grid, const CoherentLabel& label, double t,
                                             const OscillatorParams& params, std::size_t n_max) {
  const StateVector state = dynamical_coherent_state(label, t, params, n_max);
  return sample_on(grid, [&](double x) { return WaveSample{x, position_amplitude(state, x, params)}; });
}

}  // namespace qho
