#pragma once

// Phase-symmetry transformations, exact Fock-basis propagation, and
// finite-difference checks that the means obey the classical oscillator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qho/coherent.hpp"
#include "qho/fock.hpp"
#include "qho/observables.hpp"

namespace qho {

/// Rotation angle alpha of a -> a e^{i alpha}.
struct PhaseAngle {
  double alpha = 0.0;

  PhaseAngle() = default;
  explicit PhaseAngle(double a) : alpha(a) {
    if (!std::isfinite(a)) throw std::invalid_argument("phase angle must be finite");
  }

  /// alpha reduced to [0, 2 pi), for reporting.
  double reduced() const {
    const double r = std::fmod(alpha, 2.0 * pi);
    return r < 0.0 ? r + 2.0 * pi : r;
  }
};

/// a e^{i alpha}. The raising operator transforms as the adjoint of the result.
inline Operator phase_transform_ladder(const Operator& a, PhaseAngle angle) {
  return unit_phase(angle.alpha) * a;
}

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Image of (x, p) under the phase rotation:
///   x' = -(p / M omega) sin alpha + x cos alpha,  p' = p cos alpha + M omega x sin alpha.
inline PhasePoint rotate_xp(double mean_x, double mean_p, PhaseAngle angle, const OscillatorParams& params) {
  const double m_omega = params.mass() * params.omega();
  const double c = std::cos(angle.alpha);
  const double s = std::sin(angle.alpha);
  return {-(mean_p / m_omega) * s + mean_x * c, mean_p * c + m_omega * mean_x * s};
}

/// p^2 / 2M + M omega^2 x^2 / 2
inline double classical_energy(double x, double p, const OscillatorParams& params) {
  return p * p / (2.0 * params.mass()) + 0.5 * params.mass() * params.omega() * params.omega() * x * x;
}

/// coeffs[n] -> coeffs[n] e^{-i n alpha}: the state-space action that sends <a> to e^{-i alpha}<a>.
inline StateVector transform_state_phase(const StateVector& state, PhaseAngle angle) {
  StateVector out = state;
  for (std::size_t n = 0; n < state.dimension(); ++n) {
    out.coeffs(static_cast<Eigen::Index>(n)) *= unit_phase(-static_cast<double>(n) * angle.alpha);
  }
  return out;
}

/// Exact evolution under the diagonal Hamiltonian: coeffs[n] -> coeffs[n] e^{-i eps_n t / hbar}.
inline StateVector propagate_fock(const StateVector& state, double t, const OscillatorParams& params) {
  StateVector out = state;
  out.coeffs = state.coeffs.cwiseProduct(energy_phases(t, params, state.n_max()));
  out.time = state.time + t;
  return out;
}

/// Uniformly sampled sequence of observable records.
class Trajectory {
 public:
  Trajectory(std::vector<ObservableRecord> records, double dt) : records_(std::move(records)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory step must be positive");
    for (std::size_t i = 1; i < records_.size(); ++i) {
      const double step = records_[i].time - records_[i - 1].time;
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(records_[i].time))) {
        throw std::invalid_argument("trajectory times must increase with uniform spacing dt");
      }
    }
  }

  const std::vector<ObservableRecord>& records() const noexcept { return records_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<ObservableRecord> records_;
  double dt_;
};

/// Where trajectory samples come from.
enum class AverageSource { closed_form, brute_force };

/// Coherent-state trajectory sampled at t_start + k dt, k = 0..count-1.
/// Brute-force samples propagate the Fock coefficients exactly at the given n_max.
inline Trajectory coherent_trajectory(const CoherentLabel& label, const OscillatorParams& params, double t_start,
                                      double dt, std::size_t count, AverageSource source = AverageSource::closed_form,
                                      std::size_t n_max = 0) {
  std::vector<ObservableRecord> records;
  records.reserve(count);
  const StateVector initial = coherent_coefficients(label, n_max);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t_start + dt * static_cast<double>(k);
    if (source == AverageSource::closed_form) {
      records.push_back(averages_closedform(label, t, params));
    } else {
      records.push_back(averages_bruteforce(propagate_fock(initial, t, params), params));
    }
  }
  return {std::move(records), dt};
}

struct EhrenfestResidual {
  double x = 0.0;  ///< worst of |D2 x + w^2 x| and w |D x - p / M|
  double p = 0.0;  ///< worst of |D2 p + w^2 p| and w |D p + M w^2 x|
};

/// Centered-difference residuals of the classical oscillator equations at interior samples.
/// Discretization error is O(dt^2) times the amplitude.
inline EhrenfestResidual ehrenfest_residual(const Trajectory& traj, const OscillatorParams& params) {
  const auto& r = traj.records();
  if (r.size() < 3) throw std::invalid_argument("ehrenfest residual needs at least 3 trajectory samples");
  const double dt = traj.dt();
  const double w = params.omega();
  const double w2 = w * w;
  const double m = params.mass();

  EhrenfestResidual out;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double d2x = (r[i + 1].mean_x - 2.0 * r[i].mean_x + r[i - 1].mean_x) / (dt * dt);
    const double d2p = (r[i + 1].mean_p - 2.0 * r[i].mean_p + r[i - 1].mean_p) / (dt * dt);
    const double dx = (r[i + 1].mean_x - r[i - 1].mean_x) / (2.0 * dt);
    const double dp = (r[i + 1].mean_p - r[i - 1].mean_p) / (2.0 * dt);
    out.x = std::max({out.x, std::abs(d2x + w2 * r[i].mean_x), w * std::abs(dx - r[i].mean_p / m)});
    out.p = std::max({out.p, std::abs(d2p + w2 * r[i].mean_p), w * std::abs(dp + m * w2 * r[i].mean_x)});
  }
  return out;
}

}  // namespace qho
