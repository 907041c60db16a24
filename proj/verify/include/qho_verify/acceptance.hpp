#pragma once

// The acceptance suite: every closed-form claim about the oscillator in a
// dynamical coherent state, checked numerically at pinned tolerances.
// Used by the `acceptance` test binary and by `qho verify`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qho/qho.hpp"
#include "qho_verify/rk4_oracle.hpp"

namespace qho::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// A user-chosen label and cutoff whose truncation adequacy is checked alongside the fixed suite.
struct ConfiguredCase {
  CoherentLabel label;
  std::size_t n_max = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240917;
  std::optional<ConfiguredCase> configured;
};

namespace tolerance {
inline constexpr double minimal_uncertainty = 1e-9;
inline constexpr double fock_uncertainty = 1e-10;
inline constexpr double anomalous_averages = 1e-9;
inline constexpr double ehrenfest_residual = 1e-5;
inline constexpr double ehrenfest_dt = 1e-3;
inline constexpr double ehrenfest_ratio = 4.0;
inline constexpr double ehrenfest_ratio_slack = 0.2;
inline constexpr double energy_spread = 1e-10;
inline constexpr double energy_value = 1e-9;
inline constexpr double packet_agreement = 1e-8;
inline constexpr double packet_variance = 1e-8;
inline constexpr double generating_residual = 1e-12;
inline constexpr double eigenstate_residual = 1e-10;
inline constexpr double under_truncated_residual = 1e-2;
inline constexpr double phase_invariance = 1e-10;
inline constexpr double phase_rotation = 1e-12;
inline constexpr double classical_energy = 1e-12;
inline constexpr double rk4_coefficients = 1e-7;
inline constexpr double rk4_step = 1e-4;
}  // namespace tolerance

/// The label set shared by several criteria; all with |chi| <= 2.
inline std::vector<CoherentLabel> reference_labels() {
  return {CoherentLabel(0.0, 0.0), CoherentLabel(1.0, 0.0), CoherentLabel(0.0, 2.0), CoherentLabel(1.0, 1.0),
          CoherentLabel(-1.5, 0.5)};
}

/// 8 sample times spanning two periods, endpoints included.
inline std::vector<double> two_period_times(const OscillatorParams& params) {
  const double span = 4.0 * pi / params.omega();
  std::vector<double> times;
  for (int k = 0; k < 8; ++k) times.push_back(span * k / 7.0);
  return times;
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string label_text(const CoherentLabel& l) {
  std::ostringstream s;
  s << "chi=" << l.chi.real() << (l.chi.imag() < 0 ? "" : "+") << l.chi.imag() << "i";
  return s.str();
}

inline StateVector random_state(std::mt19937_64& rng, std::size_t n_max, std::size_t top) {
  std::normal_distribution<double> gauss;
  ComplexVector c = ComplexVector::Zero(static_cast<Eigen::Index>(n_max + 1));
  for (std::size_t n = 0; n <= top; ++n) c(static_cast<Eigen::Index>(n)) = complex(gauss(rng), gauss(rng));
  c.normalize();
  return StateVector(std::move(c));
}

}  // namespace detail

inline CriterionResult minimal_uncertainty() {
  const auto params = OscillatorParams::natural();
  double worst = 0.0;
  for (const auto& label : reference_labels()) {
    const std::size_t n_max = auto_n_max_with_margin(label);
    for (double t : two_period_times(params)) {
      const auto r = averages_bruteforce(dynamical_coherent_state(label, t, params, n_max), params);
      worst = std::max(worst, std::abs(r.uncertainty - params.hbar() / 2.0));
    }
  }
  return {1, "minimal uncertainty of coherent states", worst < tolerance::minimal_uncertainty,
          "max |I - hbar/2| = " + detail::sci(worst) + " (tol " + detail::sci(tolerance::minimal_uncertainty) + ")"};
}

inline CriterionResult fock_uncertainty() {
  const auto params = OscillatorParams::natural();
  double worst = 0.0;
  for (std::size_t n = 0; n <= 20; ++n) {
    const auto r = averages_bruteforce(fock_state(n, 40), params);
    worst = std::max(worst, std::abs(r.uncertainty - uncertainty_fock(n, params)));
  }
  return {2, "Fock-level uncertainty hbar(n+1/2)", worst < tolerance::fock_uncertainty,
          "max |I_n - hbar(n+1/2)| over n=0..20 = " + detail::sci(worst) + " (tol " +
              detail::sci(tolerance::fock_uncertainty) + ")"};
}

inline CriterionResult anomalous_averages() {
  const auto params = OscillatorParams::natural();
  double worst = 0.0;
  for (const auto& label : reference_labels()) {
    const std::size_t n_max = auto_n_max_with_margin(label);
    for (double t : two_period_times(params)) {
      const auto r = averages_bruteforce(dynamical_coherent_state(label, t, params, n_max), params);
      const complex chi_t = evolve_label(label, t, params).chi;
      worst = std::max({worst, std::abs(r.a_avg - chi_t), std::abs(r.a2_avg - chi_t * chi_t),
                        std::abs(r.n_avg - label.mean_occupation())});
    }
  }
  bool fock_exact = true;
  for (std::size_t n = 0; n <= 20; ++n) {
    const auto r = averages_bruteforce(fock_state(n, 40), params);
    fock_exact = fock_exact && r.a_avg == complex(0.0) && r.a2_avg == complex(0.0);
  }
  return {3, "anomalous averages <a>, <a^2>, <a+a>", worst < tolerance::anomalous_averages && fock_exact,
          "coherent max deviation = " + detail::sci(worst) + " (tol " + detail::sci(tolerance::anomalous_averages) +
              "); Fock <a>=<a^2>=0 exactly: " + (fock_exact ? "yes" : "no")};
}

inline CriterionResult mean_motion_ehrenfest() {
  const auto params = OscillatorParams::natural();
  const double period = 2.0 * pi / params.omega();
  const double dt = tolerance::ehrenfest_dt;
  const double lo = tolerance::ehrenfest_ratio * (1.0 - tolerance::ehrenfest_ratio_slack);
  const double hi = tolerance::ehrenfest_ratio * (1.0 + tolerance::ehrenfest_ratio_slack);

  double worst = 0.0;
  double worst_ratio_dev = 0.0;
  bool ratio_ok = true;
  std::string ratios;
  for (const auto& label : reference_labels()) {
    if (label.mean_occupation() == 0.0) continue;
    const auto count = static_cast<std::size_t>(std::llround(period / dt)) + 1;
    const auto coarse = ehrenfest_residual(coherent_trajectory(label, params, 0.0, dt, count), params);
    const auto fine = ehrenfest_residual(coherent_trajectory(label, params, 0.0, dt / 2, 2 * count - 1), params);
    const std::size_t n_max = auto_n_max_with_margin(label);
    const auto brute = ehrenfest_residual(
        coherent_trajectory(label, params, 0.0, dt, count, AverageSource::brute_force, n_max), params);
    worst = std::max({worst, coarse.x, coarse.p, brute.x, brute.p});
    for (double ratio : {coarse.x / fine.x, coarse.p / fine.p}) {
      ratio_ok = ratio_ok && ratio >= lo && ratio <= hi;
      worst_ratio_dev = std::max(worst_ratio_dev, std::abs(ratio - tolerance::ehrenfest_ratio));
    }
  }
  return {4, "mean motion obeys the classical oscillator (Ehrenfest)",
          worst < tolerance::ehrenfest_residual && ratio_ok,
          "max residual at dt=1e-3 = " + detail::sci(worst) + " (tol " + detail::sci(tolerance::ehrenfest_residual) +
              "); dt-halving ratio max |r-4| = " + detail::sci(worst_ratio_dev) + " (allowed 0.8)"};
}

inline CriterionResult energy_constancy() {
  const auto params = OscillatorParams::natural();
  const double period = 2.0 * pi / params.omega();
  double worst_spread = 0.0;
  double worst_value = 0.0;
  for (const auto& label : reference_labels()) {
    const std::size_t n_max = auto_n_max_with_margin(label);
    const double expected = params.hbar() * params.omega() * (label.mean_occupation() + 0.5);
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int k = 0; k < 100; ++k) {
      const double t = 2.0 * period * k / 99.0;
      const double e = averages_bruteforce(dynamical_coherent_state(label, t, params, n_max), params).energy;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      worst_value = std::max(worst_value, std::abs(e - expected));
    }
    worst_spread = std::max(worst_spread, hi - lo);
  }
  return {5, "constant mean energy hbar omega(|chi|^2+1/2)",
          worst_spread < tolerance::energy_spread && worst_value < tolerance::energy_value,
          "max spread over 100 samples = " + detail::sci(worst_spread) + " (tol " +
              detail::sci(tolerance::energy_spread) + "); max |E - hbar omega(|chi|^2+1/2)| = " +
              detail::sci(worst_value) + " (tol " + detail::sci(tolerance::energy_value) + ")"};
}

inline CriterionResult wave_packet() {
  const auto params = OscillatorParams::natural();
  const double target_variance = params.hbar() / (2.0 * params.mass() * params.omega());
  auto labels = reference_labels();
  labels.emplace_back(2.0, 0.0);
  labels.emplace_back(-std::sqrt(2.0), -std::sqrt(2.0));
  double worst_diff = 0.0;
  double worst_var = 0.0;
  for (const auto& label : labels) {
    for (double t : two_period_times(params)) {
      const double center = averages_closedform(label, t, params).mean_x;
      const auto grid = default_grid(center, params);
      const auto series = psi_series_on(grid, label, t, params, 64);
      const auto closed = sample_on(grid, [&](double x) { return psi_closed(label, x, t, params); });
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst_diff = std::max(worst_diff, std::abs(series[i].value - closed[i].value));
      }
      worst_var = std::max({worst_var, std::abs(packet_moments(series, grid).variance - target_variance),
                            std::abs(packet_moments(closed, grid).variance - target_variance)});
    }
  }
  return {6, "series = closed-form packet, width does not diffuse",
          worst_diff < tolerance::packet_agreement && worst_var < tolerance::packet_variance,
          "max |series - closed| = " + detail::sci(worst_diff) + " (tol " + detail::sci(tolerance::packet_agreement) +
              "); max |Var - hbar/2M omega| = " + detail::sci(worst_var) + " (tol " +
              detail::sci(tolerance::packet_variance) + ")"};
}

inline CriterionResult generating_function(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ut(-0.9, 0.9);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = ux(rng);
    const double t = ut(rng);
    worst = std::max(worst, generating_sum_check(x, t, 60));
  }
  return {7, "Hermite generating-function identity", worst < tolerance::generating_residual,
          "max residual over 20 random (x,t), k_max=60 = " + detail::sci(worst) + " (tol " +
              detail::sci(tolerance::generating_residual) + ")"};
}

inline CriterionResult annihilation_eigenstate() {
  const auto params = OscillatorParams::natural();
  const std::size_t n_max = 64;
  const auto a = make_ladder(n_max).a;
  auto labels = reference_labels();
  labels.emplace_back(2.0, 0.0);
  double worst = 0.0;
  for (const auto& label : labels) {
    for (double t : two_period_times(params)) {
      const auto state = dynamical_coherent_state(label, t, params, n_max);
      worst = std::max(worst, annihilation_residual(state, evolve_label(label, t, params), a));
    }
  }
  const CoherentLabel heavy(3.0, 0.0);
  const double under =
      annihilation_residual(coherent_coefficients(heavy, 12), heavy, make_ladder(12).a);
  return {8, "coherent state is an eigenstate of a with chi(t)",
          worst < tolerance::eigenstate_residual && under > tolerance::under_truncated_residual,
          "max residual at n_max=64 = " + detail::sci(worst) + " (tol " +
              detail::sci(tolerance::eigenstate_residual) + "); chi=3, n_max=12 residual = " + detail::sci(under) +
              " (must exceed " + detail::sci(tolerance::under_truncated_residual) + ")"};
}

/// Truncation adequacy of a user-chosen (chi, n_max): the tail beyond n_max must be below the
/// automatic-truncation tolerance.
inline CriterionResult configured_truncation(const ConfiguredCase& c) {
  const double tail = truncation_tail(c.label, c.n_max);
  const auto a = make_ladder(c.n_max).a;
  const double residual = annihilation_residual(coherent_coefficients(c.label, c.n_max), c.label, a);
  return {8, "truncation adequate at configured n_max", tail < default_tail_tolerance,
          detail::label_text(c.label) + ", n_max=" + std::to_string(c.n_max) + ": tail = " + detail::sci(tail) +
              " (tol " + detail::sci(default_tail_tolerance) + "), eigen-residual = " + detail::sci(residual)};
}

inline CriterionResult phase_symmetry(std::uint64_t seed) {
  const auto params = OscillatorParams::natural();
  const std::size_t n_max = 16;
  const auto [a, ad] = make_ladder(n_max);
  const Operator number = ad * a;
  const Operator h = make_hamiltonian(params, n_max);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> angle(-2.0 * pi, 2.0 * pi);
  std::uniform_int_distribution<std::size_t> top(0, n_max);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);

  double invariant = 0.0;
  double rotation = 0.0;
  double modulus = 0.0;
  double classical = 0.0;
  for (int i = 0; i < 100; ++i) {
    const StateVector s = detail::random_state(rng, n_max, top(rng));
    const PhaseAngle alpha(angle(rng));
    const StateVector r = transform_state_phase(s, alpha);
    invariant = std::max({invariant, std::abs(expectation(h, r) - expectation(h, s)),
                          std::abs(expectation(number, r) - expectation(number, s))});
    const complex before = expectation(a, s);
    const complex after = expectation(a, r);
    rotation = std::max(rotation, std::abs(after - unit_phase(-alpha.alpha) * before));
    modulus = std::max(modulus, std::abs(std::abs(after) - std::abs(before)));

    const double x = coord(rng);
    const double p = coord(rng);
    const PhasePoint q = rotate_xp(x, p, alpha, params);
    classical = std::max(classical, std::abs(classical_energy(q.x, q.p, params) - classical_energy(x, p, params)));
  }
  const bool ok = invariant < tolerance::phase_invariance && rotation < tolerance::phase_rotation &&
                  modulus < tolerance::phase_rotation && classical < tolerance::classical_energy;
  return {9, "phase symmetry of H, broken by <a>", ok,
          "<H>,<a+a> drift = " + detail::sci(invariant) + " (tol " + detail::sci(tolerance::phase_invariance) +
              "); <a> rotation error = " + detail::sci(rotation) + ", modulus drift = " + detail::sci(modulus) +
              " (tol " + detail::sci(tolerance::phase_rotation) + "); x-p rotation energy drift = " +
              detail::sci(classical) + " (tol " + detail::sci(tolerance::classical_energy) + ")"};
}

inline CriterionResult rk4_oracle_agreement() {
  const auto params = OscillatorParams::natural();
  const CoherentLabel label(1.0, 1.0);
  const std::size_t n_max = auto_n_max_with_margin(label);
  const StateVector initial = coherent_coefficients(label, n_max);
  const double period = 2.0 * pi / params.omega();
  const StateVector exact = propagate_fock(initial, period, params);
  const StateVector rk4 =
      rk4_propagate(initial, make_hamiltonian(params, n_max), params.hbar(), period, tolerance::rk4_step);
  const double err = (exact.coeffs - rk4.coeffs).cwiseAbs().maxCoeff();
  return {10, "independent RK4 integrator reproduces exact propagation", err < tolerance::rk4_coefficients,
          "max coefficient error over one period, step 1e-4 = " + detail::sci(err) + " (tol " +
              detail::sci(tolerance::rk4_coefficients) + ")"};
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {}) {
  std::vector<CriterionResult> results;
  auto guarded = [&](int id, const char* name, auto&& criterion) {
    try {
      results.push_back(criterion());
    } catch (const std::exception& e) {
      results.push_back({id, name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded(1, "minimal uncertainty of coherent states", [] { return minimal_uncertainty(); });
  guarded(2, "Fock-level uncertainty hbar(n+1/2)", [] { return fock_uncertainty(); });
  guarded(3, "anomalous averages <a>, <a^2>, <a+a>", [] { return anomalous_averages(); });
  guarded(4, "mean motion obeys the classical oscillator (Ehrenfest)", [] { return mean_motion_ehrenfest(); });
  guarded(5, "constant mean energy hbar omega(|chi|^2+1/2)", [] { return energy_constancy(); });
  guarded(6, "series = closed-form packet, width does not diffuse", [] { return wave_packet(); });
  guarded(7, "Hermite generating-function identity", [&] { return generating_function(options.seed); });
  guarded(8, "coherent state is an eigenstate of a with chi(t)", [] { return annihilation_eigenstate(); });
  if (options.configured) {
    guarded(8, "truncation adequate at configured n_max", [&] { return configured_truncation(*options.configured); });
  }
  guarded(9, "phase symmetry of H, broken by <a>", [&] { return phase_symmetry(options.seed); });
  guarded(10, "independent RK4 integrator reproduces exact propagation", [] { return rk4_oracle_agreement(); });
  return results;
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

/// One line per criterion: "[PASS] 3 name: detail".
inline std::string format_result(const CriterionResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail;
}

}  // namespace qho::verify
