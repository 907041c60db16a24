#pragma once

// Deliberately naive classical RK4 integration of i hbar dC/dt = H C with a
// dense matrix-vector product. It shares nothing with the exact diagonal
// propagator and exists only to cross-check it.

#include <cmath>
#include <cstddef>

#include "qho/fock.hpp"

namespace qho::verify {

inline StateVector rk4_propagate(const StateVector& initial, const Operator& hamiltonian, double hbar, double t,
                                 double max_step) {
  if (hamiltonian.dimension() != initial.dimension()) {
    throw dimension_mismatch(hamiltonian.dimension(), initial.dimension());
  }
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / max_step));
  const double h = steps == 0 ? 0.0 : t / static_cast<double>(steps);
  const complex factor(0.0, -1.0 / hbar);
  const ComplexMatrix& m = hamiltonian.matrix;

  auto rhs = [&](const ComplexVector& c) -> ComplexVector { return factor * (m * c); };

  ComplexVector c = initial.coeffs;
  for (std::size_t s = 0; s < steps; ++s) {
    const ComplexVector k1 = rhs(c);
    const ComplexVector k2 = rhs(c + 0.5 * h * k1);
    const ComplexVector k3 = rhs(c + 0.5 * h * k2);
    const ComplexVector k4 = rhs(c + h * k3);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return StateVector(std::move(c), initial.time + t);
}

}  // namespace qho::verify
