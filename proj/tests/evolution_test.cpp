#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qho/evolution.hpp"
#include "qho_verify/rk4_oracle.hpp"

namespace {

using qho::complex;
using qho::CoherentLabel;
using qho::OscillatorParams;
using qho::PhaseAngle;

qho::StateVector random_state(std::mt19937_64& rng, std::size_t n_max) {
  std::normal_distribution<double> gauss;
  qho::ComplexVector c(static_cast<Eigen::Index>(n_max + 1));
  for (auto& v : c) v = complex(gauss(rng), gauss(rng));
  c.normalize();
  return qho::StateVector(c);
}

TEST(PhaseTransformLadder, IdentityAndHalfTurn) {
  const auto [a, ad] = qho::make_ladder(6);
  EXPECT_TRUE((qho::phase_transform_ladder(a, PhaseAngle(0.0)).matrix.array() == a.matrix.array()).all());
  const auto flipped = qho::phase_transform_ladder(a, PhaseAngle(qho::pi));
  EXPECT_LT((flipped.matrix + a.matrix).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PhaseTransformLadder, NumberOperatorInvariant) {
  const auto [a, ad] = qho::make_ladder(10);
  const auto rotated = qho::phase_transform_ladder(a, PhaseAngle(0.7));
  const auto number = ad * a;
  const auto rotated_number = rotated.adjoint() * rotated;
  EXPECT_LT((rotated_number.matrix - number.matrix).cwiseAbs().maxCoeff(), 1e-14);
  // The Hamiltonian built from the rotated pair is unchanged.
  EXPECT_LT((rotated * rotated.adjoint() - a * ad).matrix.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(RotateXP, IdentityAndQuarterTurn) {
  const auto params = OscillatorParams::natural();
  const auto same = qho::rotate_xp(0.3, -1.2, PhaseAngle(0.0), params);
  EXPECT_EQ(same.x, 0.3);
  EXPECT_EQ(same.p, -1.2);
  const auto quarter = qho::rotate_xp(1.0, 0.0, PhaseAngle(qho::pi / 2), params);
  EXPECT_NEAR(quarter.x, 0.0, 1e-16);
  EXPECT_NEAR(quarter.p, 1.0, 1e-16);
}

TEST(RotateXP, PreservesClassicalEnergy) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const OscillatorParams params(1.0, 1.7, 0.6);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double p = u(rng);
    const auto q = qho::rotate_xp(x, p, PhaseAngle(4.0 * u(rng)), params);
    EXPECT_NEAR(qho::classical_energy(q.x, q.p, params), qho::classical_energy(x, p, params), 1e-12);
  }
}

TEST(RotateXP, MatchesRotatedOperatorsInExpectation) {
  // x' and p' built from a' = a e^{i alpha} have expectations given by rotate_xp of <x>, <p>.
  const auto params = OscillatorParams(1.0, 2.0, 0.5);
  const std::size_t n_max = 24;
  const auto [a, ad] = qho::make_ladder(n_max);
  const PhaseAngle alpha(1.1);
  const auto ar = qho::phase_transform_ladder(a, alpha);
  const auto adr = ar.adjoint();
  const double xs = std::sqrt(params.hbar() / (2.0 * params.mass() * params.omega()));
  const double ps = std::sqrt(params.mass() * params.hbar() * params.omega() / 2.0);
  const auto xr = complex(xs) * (adr + ar);
  const auto pr = complex(0.0, ps) * (adr - ar);
  const auto [x, p] = qho::make_xp(params, n_max);
  const auto state = qho::coherent_coefficients(CoherentLabel(0.6, -0.9), n_max);
  const auto rotated = qho::rotate_xp(qho::expectation(x, state).real(), qho::expectation(p, state).real(), alpha,
                                      params);
  EXPECT_NEAR(qho::expectation(xr, state).real(), rotated.x, 1e-12);
  EXPECT_NEAR(qho::expectation(pr, state).real(), rotated.p, 1e-12);
}

TEST(TransformStatePhase, CoherentLabelRotates) {
  const CoherentLabel label(1.2, 0.4);
  const PhaseAngle alpha(0.9);
  const auto rotated = qho::transform_state_phase(qho::coherent_coefficients(label, 30), alpha);
  const auto expected = qho::coherent_coefficients(CoherentLabel(label.chi * qho::unit_phase(-alpha.alpha)), 30);
  EXPECT_LT((rotated.coeffs - expected.coeffs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TransformStatePhase, FockStateOnlyGetsGlobalPhase) {
  const auto s = qho::fock_state(4, 8);
  const auto r = qho::transform_state_phase(s, PhaseAngle(0.3));
  EXPECT_NEAR(std::abs(r.coeffs(4)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(r.coeffs.dot(s.coeffs)), 1.0, 1e-15);
}

TEST(TransformStatePhase, AverageSignature) {
  std::mt19937_64 rng(17);
  const std::size_t n_max = 14;
  const auto [a, ad] = qho::make_ladder(n_max);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_state(rng, n_max);
    const PhaseAngle alpha(0.37 * i - 2.0);
    const auto r = qho::transform_state_phase(s, alpha);
    EXPECT_NEAR(r.norm_squared(), s.norm_squared(), 1e-14);
    EXPECT_LT(std::abs(qho::expectation(a, r) - qho::unit_phase(-alpha.alpha) * qho::expectation(a, s)), 1e-12);
    EXPECT_NEAR(qho::expectation(ad * a, r).real(), qho::expectation(ad * a, s).real(), 1e-12);
  }
}

TEST(TransformStatePhase, HamiltonianInvariance) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  const OscillatorParams params(0.8, 1.2, 1.9);
  const std::size_t n_max = 12;
  const auto h = qho::make_hamiltonian(params, n_max);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(rng, n_max);
    const auto r = qho::transform_state_phase(s, PhaseAngle(angle(rng)));
    EXPECT_NEAR(qho::expectation(h, r).real(), qho::expectation(h, s).real(), 1e-10);
  }
}

TEST(TransformStatePhase, BrokenSymmetrySignature) {
  const auto params = OscillatorParams::natural();
  const std::size_t n_max = 30;
  const auto [a, ad] = qho::make_ladder(n_max);
  const auto h = qho::make_hamiltonian(params, n_max);
  for (double alpha : {0.5, 1.0, 3.0, 5.5}) {
    const auto coherent = qho::coherent_coefficients(CoherentLabel(1.0, 0.5), n_max);
    const auto rotated = qho::transform_state_phase(coherent, PhaseAngle(alpha));
    EXPECT_GT(std::abs(qho::expectation(a, rotated) - qho::expectation(a, coherent)), 0.1) << alpha;
    EXPECT_NEAR(qho::expectation(ad * a, rotated).real(), qho::expectation(ad * a, coherent).real(), 1e-12);
    EXPECT_NEAR(qho::expectation(h, rotated).real(), qho::expectation(h, coherent).real(), 1e-12);

    for (std::size_t n : {0u, 3u, 9u}) {
      const auto fock = qho::fock_state(n, n_max);
      const auto fr = qho::transform_state_phase(fock, PhaseAngle(alpha));
      EXPECT_EQ(qho::expectation(a, fr), complex(0.0));
      EXPECT_NEAR(qho::expectation(h, fr).real(), qho::expectation(h, fock).real(), 1e-14);
    }
  }
  // A full turn changes nothing.
  const auto coherent = qho::coherent_coefficients(CoherentLabel(1.0, 0.5), n_max);
  const auto turned = qho::transform_state_phase(coherent, PhaseAngle(2.0 * qho::pi));
  EXPECT_LT(std::abs(qho::expectation(a, turned) - qho::expectation(a, coherent)), 1e-12);
}

TEST(PhaseAngle, Reduction) {
  EXPECT_NEAR(PhaseAngle(7.0).reduced(), 7.0 - 2.0 * qho::pi, 1e-15);
  EXPECT_NEAR(PhaseAngle(-1.0).reduced(), 2.0 * qho::pi - 1.0, 1e-15);
  EXPECT_THROW(PhaseAngle{INFINITY}, std::invalid_argument);
}

TEST(PropagateFock, ZeroTimeAndModuli) {
  std::mt19937_64 rng(3);
  const auto params = OscillatorParams(1.0, 1.0, 2.0);
  const auto s = random_state(rng, 10);
  const auto same = qho::propagate_fock(s, 0.0, params);
  EXPECT_TRUE((same.coeffs.array() == s.coeffs.array()).all());
  const auto later = qho::propagate_fock(s, 3.7, params);
  EXPECT_LT((later.coeffs.cwiseAbs() - s.coeffs.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(later.time, 3.7);
}

TEST(PropagateFock, ReproducesDynamicalCoherentState) {
  const OscillatorParams params(1.0, 0.5, 1.3);
  const CoherentLabel label(-0.7, 1.4);
  const std::size_t n_max = 40;
  for (double t : {0.2, 1.0, 9.9}) {
    const auto propagated = qho::propagate_fock(qho::coherent_coefficients(label, n_max), t, params);
    const auto dcs = qho::dynamical_coherent_state(label, t, params, n_max);
    EXPECT_LT((propagated.coeffs - dcs.coeffs).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
}

TEST(PropagateFock, GroupLaw) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ut(-5.0, 5.0);
  const OscillatorParams params(1.0, 1.0, 0.9);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_state(rng, 20);
    const double t1 = ut(rng);
    const double t2 = ut(rng);
    const auto stepwise = qho::propagate_fock(qho::propagate_fock(s, t1, params), t2, params);
    const auto direct = qho::propagate_fock(s, t1 + t2, params);
    EXPECT_LT((stepwise.coeffs - direct.coeffs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PropagateFock, MatchesRk4Oracle) {
  const auto params = OscillatorParams::natural();
  const CoherentLabel label(1.0, 1.0);
  const std::size_t n_max = qho::auto_n_max(label) + 2;
  const auto initial = qho::coherent_coefficients(label, n_max);
  const double period = 2.0 * qho::pi;
  const auto exact = qho::propagate_fock(initial, period, params);
  const auto rk4 = qho::verify::rk4_propagate(initial, qho::make_hamiltonian(params, n_max), params.hbar(), period, 1e-4);
  EXPECT_LT((exact.coeffs - rk4.coeffs).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Trajectory, RequiresUniformIncreasingTimes) {
  std::vector<qho::ObservableRecord> records(3);
  records[0].time = 0.0;
  records[1].time = 0.1;
  records[2].time = 0.2;
  EXPECT_NO_THROW(qho::Trajectory(records, 0.1));
  records[2].time = 0.25;
  EXPECT_THROW(qho::Trajectory(records, 0.1), std::invalid_argument);
  EXPECT_THROW(qho::Trajectory(records, -0.1), std::invalid_argument);
}

TEST(Ehrenfest, ZeroTrajectoryHasZeroResidual) {
  const auto params = OscillatorParams::natural();
  std::vector<qho::ObservableRecord> records;
  for (int k = 0; k < 10; ++k) records.push_back(qho::averages_bruteforce(
                                                     qho::propagate_fock(qho::fock_state(2, 6), 0.1 * k, params), params));
  const auto r = qho::ehrenfest_residual(qho::Trajectory(records, 0.1), params);
  EXPECT_EQ(r.x, 0.0);
  EXPECT_EQ(r.p, 0.0);
}

TEST(Ehrenfest, TooShort) {
  const auto traj = qho::coherent_trajectory(CoherentLabel(1.0, 0.0), OscillatorParams::natural(), 0.0, 0.1, 2);
  EXPECT_THROW(qho::ehrenfest_residual(traj, OscillatorParams::natural()), std::invalid_argument);
}

// Finite-difference error oracle: for x(t) = A cos(w t + phi) the centered second difference
// has leading error (w^4 dt^2 / 12) A and the centered first difference (w^3 dt^2 / 6) A.
TEST(Ehrenfest, ResidualMatchesFiniteDifferenceErrorModel) {
  const auto params = OscillatorParams::natural();
  const CoherentLabel label(1.0, 0.0);
  const double dt = 1e-3;
  const auto count = static_cast<std::size_t>(std::llround(2.0 * qho::pi / dt)) + 1;
  const auto r = qho::ehrenfest_residual(qho::coherent_trajectory(label, params, 0.0, dt, count), params);
  const double amplitude = std::sqrt(2.0);
  const double model = amplitude * dt * dt / 6.0;  // first-difference term dominates
  EXPECT_LT(r.x, 1e-5);
  EXPECT_LT(r.p, 1e-5);
  EXPECT_NEAR(r.x, model, 0.05 * model);
  EXPECT_NEAR(r.p, model, 0.05 * model);
}

TEST(Ehrenfest, SecondOrderConvergence) {
  const OscillatorParams params(1.0, 2.0, 1.5);
  const CoherentLabel label(0.4, 1.1);
  const double period = 2.0 * qho::pi / params.omega();
  double previous = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const auto count = static_cast<std::size_t>(std::llround(period / dt)) + 1;
    const auto r = qho::ehrenfest_residual(qho::coherent_trajectory(label, params, 0.0, dt, count), params);
    if (previous > 0.0) {
      EXPECT_NEAR(previous / r.x, 4.0, 0.8) << dt;
    }
    previous = r.x;
  }
}

TEST(MeanMotion, ClassicalSolutionFromInitialMeans) {
  const OscillatorParams params(1.0, 1.3, 0.7);
  for (const complex chi : {complex(1.0, 0.0), complex(0.0, 2.0), complex(-1.5, 0.5)}) {
    const CoherentLabel label(chi);
    const std::size_t n_max = qho::auto_n_max(label, 1e-14) + 2;
    const auto start = qho::averages_closedform(label, 0.0, params);
    for (double t : {0.0, 0.4, 2.2, 8.1}) {
      const double w = params.omega();
      const double x = start.mean_x * std::cos(w * t) + start.mean_p / (params.mass() * w) * std::sin(w * t);
      const double p = start.mean_p * std::cos(w * t) - params.mass() * w * start.mean_x * std::sin(w * t);
      const auto closed = qho::averages_closedform(label, t, params);
      EXPECT_NEAR(closed.mean_x, x, 1e-10);
      EXPECT_NEAR(closed.mean_p, p, 1e-10);
      const auto brute = qho::averages_bruteforce(qho::dynamical_coherent_state(label, t, params, n_max), params);
      EXPECT_NEAR(brute.mean_x, x, 1e-10);
      EXPECT_NEAR(brute.mean_p, p, 1e-10);
    }
  }
}

}  // namespace
