#pragma once

// Stationary and dynamical coherent states of the oscillator, the
// evolution of their label, and truncation-error control.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include "qho/fock.hpp"

namespace qho {

/// The complex label chi of a coherent state.
struct CoherentLabel {
  complex chi{0.0, 0.0};

  CoherentLabel() = default;
  explicit CoherentLabel(complex c) : chi(c) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("coherent label must be finite");
    }
  }
  CoherentLabel(double re, double im) : CoherentLabel(complex(re, im)) {}

  double mean_occupation() const { return std::norm(chi); }
};

/// Default policy for automatic truncation.
inline constexpr double default_tail_tolerance = 1e-12;
inline constexpr std::size_t max_auto_n_max = 1024;

/// e^{i phase} built from cos/sin so no logarithm branch is ever involved.
inline complex unit_phase(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// C_n = chi^n / sqrt(n!) e^{-|chi|^2/2}, by the ratio recurrence C_{n+1} = C_n chi / sqrt(n+1).
inline StateVector coherent_coefficients(const CoherentLabel& label, std::size_t n_max) {
  ComplexVector c(static_cast<Eigen::Index>(n_max + 1));
  complex value = std::exp(-0.5 * label.mean_occupation());
  c(0) = value;
  for (std::size_t n = 0; n < n_max; ++n) {
    value *= label.chi / std::sqrt(static_cast<double>(n + 1));
    c(static_cast<Eigen::Index>(n + 1)) = value;
  }
  return StateVector(std::move(c), 0.0);
}

/// Poisson weight e^{-|chi|^2} |chi|^{2n} / n!, evaluated in log space.
inline double occupation_probability(const CoherentLabel& label, std::size_t n) {
  const double mean = label.mean_occupation();
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  return std::exp(-mean + nd * std::log(mean) - std::lgamma(nd + 1.0));
}

/// Poisson mass above n_max. Cutoffs past the mean sum the tail directly (positive terms, no
/// cancellation); cutoffs below the mean leave a tail of order one, taken as 1 - cdf.
inline double truncation_tail(const CoherentLabel& label, std::size_t n_max) {
  const double mean = label.mean_occupation();
  if (mean == 0.0) return 0.0;
  if (static_cast<double>(n_max + 1) <= mean) {
    double cdf = 0.0;
    for (std::size_t k = 0; k <= n_max; ++k) cdf += occupation_probability(label, k);
    return std::max(0.0, 1.0 - cdf);
  }
  std::size_t n = n_max + 1;
  double term = occupation_probability(label, n);
  double sum = 0.0;
  // Past the Poisson mode the terms decay geometrically; stop once they no longer register.
  while (true) {
    sum += term;
    ++n;
    term *= mean / static_cast<double>(n);
    if (static_cast<double>(n) > mean && (term <= sum * 1e-17 || term == 0.0)) break;
  }
  return sum;
}

/// Smallest n_max with truncation_tail < tolerance, capped at max_n_max.
inline std::size_t auto_n_max(const CoherentLabel& label, double tolerance = default_tail_tolerance,
                              std::size_t max_n_max = max_auto_n_max) {
  for (std::size_t n = 0; n < max_n_max; ++n) {
    if (truncation_tail(label, n) < tolerance) return n;
  }
  return max_n_max;
}

/// chi(t) = chi e^{-i omega t}
inline CoherentLabel evolve_label(const CoherentLabel& label, double t, const OscillatorParams& params) {
  return CoherentLabel(label.chi * unit_phase(-params.omega() * t));
}

/// Per-level phases e^{-i eps_n t / hbar}, n = 0..n_max.
inline ComplexVector energy_phases(double t, const OscillatorParams& params, std::size_t n_max) {
  ComplexVector phases(static_cast<Eigen::Index>(n_max + 1));
  for (std::size_t n = 0; n <= n_max; ++n) {
    phases(static_cast<Eigen::Index>(n)) = unit_phase(-params.level_energy(n) * t / params.hbar());
  }
  return phases;
}

/// C_n(chi) e^{-i eps_n t / hbar}: the exact Schroedinger solution seeded by a coherent state.
inline StateVector dynamical_coherent_state(const CoherentLabel& label, double t, const OscillatorParams& params,
                                            std::size_t n_max) {
  StateVector state = coherent_coefficients(label, n_max);
  state.coeffs = state.coeffs.cwiseProduct(energy_phases(t, params, n_max));
  state.time = t;
  return state;
}

/// || (a - chi(t)) |state> ||
inline double annihilation_residual(const StateVector& state, const CoherentLabel& evolved, const Operator& a) {
  if (a.dimension() != state.dimension()) throw dimension_mismatch(a.dimension(), state.dimension());
  return (a.matrix * state.coeffs - evolved.chi * state.coeffs).norm();
}

}  // namespace qho
