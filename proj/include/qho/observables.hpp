#pragma once

// First and second moments of the oscillator: closed forms for coherent
// states and brute-force Fock-space expectations for arbitrary states.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "qho/coherent.hpp"
#include "qho/fock.hpp"

namespace qho {

/// One time sample of every tracked average. <a+> and <a+^2> are the
/// conjugates of a_avg and a2_avg.
struct ObservableRecord {
  double time = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
  double n_avg = 0.0;
  complex a_avg{};
  complex a2_avg{};
  double uncertainty = 0.0;
  double energy = 0.0;

  complex a_dagger_avg() const { return std::conj(a_avg); }
  complex a_dagger2_avg() const { return std::conj(a2_avg); }
  double variance_x() const { return mean_x2 - mean_x * mean_x; }
  double variance_p() const { return mean_p2 - mean_p * mean_p; }
};

class normalization_error : public std::domain_error {
 public:
  explicit normalization_error(double norm_squared)
      : std::domain_error("state is not normalized: |psi|^2 = " + std::to_string(norm_squared)),
        norm_squared_(norm_squared) {}
  double norm_squared() const noexcept { return norm_squared_; }

 private:
  double norm_squared_;
};

class negative_variance_error : public std::domain_error {
 public:
  explicit negative_variance_error(double variance)
      : std::domain_error("variance is negative beyond rounding: " + std::to_string(variance)),
        variance_(variance) {}
  double variance() const noexcept { return variance_; }

 private:
  double variance_;
};

/// Variances in [-1e-12, 0) are rounding and clip to zero; anything lower is a bug.
inline constexpr double variance_clip_tolerance = 1e-12;

inline double clipped_variance(double variance) {
  if (variance >= 0.0) return variance;
  if (variance >= -variance_clip_tolerance) return 0.0;
  throw negative_variance_error(variance);
}

/// sqrt(Var x * Var p), with rounding-level negatives clipped.
inline double uncertainty_product(double var_x, double var_p) {
  return std::sqrt(clipped_variance(var_x) * clipped_variance(var_p));
}

/// How far the occupied support of a state sits below the truncation edge.
/// x^2 and p^2 couple n to n +- 2, so brute-force second moments are only
/// trusted when the margin is at least 2.
struct SupportMargin {
  std::size_t last_occupied = 0;
  std::size_t margin = 0;
  bool second_moments_trusted = false;
};

/// Levels whose weight stays at or below threshold count as empty.
inline SupportMargin support_margin(const StateVector& state, double threshold = default_tail_tolerance) {
  std::size_t last = 0;
  for (std::size_t n = 0; n < state.dimension(); ++n) {
    if (std::norm(state.coeffs(static_cast<Eigen::Index>(n))) > threshold) last = n;
  }
  const std::size_t margin = state.n_max() - last;
  return {last, margin, margin >= 2};
}

inline constexpr std::size_t second_moment_margin = 2;

/// Tail-rule cutoff plus two spare levels: every level above the tail-rule cutoff carries
/// weight below the tolerance, so the support margin holds by construction.
inline std::size_t auto_n_max_with_margin(const CoherentLabel& label, double tolerance = default_tail_tolerance) {
  return auto_n_max(label, tolerance) + second_moment_margin;
}

/// Every average by matrix expectation against operators built at the state's n_max.
inline ObservableRecord averages_bruteforce(const StateVector& state, const OscillatorParams& params,
                                            double norm_tolerance = default_norm_tolerance) {
  if (!state.is_normalized(norm_tolerance)) throw normalization_error(state.norm_squared());

  const std::size_t n_max = state.n_max();
  const auto [a, ad] = make_ladder(n_max);
  const auto [x, p] = make_xp(params, n_max);
  const Operator h = make_hamiltonian(params, n_max);

  ObservableRecord r;
  r.time = state.time;
  r.a_avg = expectation(a, state);
  r.a2_avg = expectation_of_product(a, a, state);
  r.n_avg = expectation_of_product(ad, a, state).real();
  r.mean_x = expectation(x, state).real();
  r.mean_p = expectation(p, state).real();
  r.mean_x2 = expectation_of_product(x, x, state).real();
  r.mean_p2 = expectation_of_product(p, p, state).real();
  r.energy = expectation(h, state).real();
  r.uncertainty = uncertainty_product(r.variance_x(), r.variance_p());
  return r;
}

/// Coherent-state averages evaluated from chi(t) alone.
inline ObservableRecord averages_closedform(const CoherentLabel& label, double t, const OscillatorParams& params) {
  const complex chi_t = evolve_label(label, t, params).chi;
  const complex chi_t_conj = std::conj(chi_t);
  const double occupation = label.mean_occupation();
  const double x_unit = params.hbar() / (2.0 * params.mass() * params.omega());
  const double p_unit = params.mass() * params.hbar() * params.omega() / 2.0;
  const complex squares = chi_t_conj * chi_t_conj + chi_t * chi_t;

  ObservableRecord r;
  r.time = t;
  r.a_avg = chi_t;
  r.a2_avg = chi_t * chi_t;
  r.n_avg = occupation;
  r.mean_x = std::sqrt(x_unit) * (chi_t_conj + chi_t).real();
  r.mean_p = (complex(0.0, std::sqrt(p_unit)) * (chi_t_conj - chi_t)).real();
  r.mean_x2 = x_unit * (squares.real() + 2.0 * occupation + 1.0);
  r.mean_p2 = -p_unit * (squares.real() - 2.0 * occupation - 1.0);
  r.uncertainty = params.hbar() / 2.0;
  r.energy = params.hbar() * params.omega() * (occupation + 0.5);
  return r;
}

/// I_n = hbar (n + 1/2) for the n-th level.
inline double uncertainty_fock(std::size_t n, const OscillatorParams& params) {
  return params.hbar() * (static_cast<double>(n) + 0.5);
}

}  // namespace qho
