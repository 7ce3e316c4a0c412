#pragma once

#include <vector>

#include "rydmol/atomdata.hpp"

namespace rydmol {

// Radial wavefunction in the scaled coordinate x = sqrt(r). The stored array
// w satisfies u(r) = sqrt(x) * w(x) with int u^2 dr = 1; grid points are
// x_i = (i0 + i) * step so grids of different states align.
struct RadialWavefunction {
    double step = 0.0;
    long i0 = 0;                // index of the innermost grid point
    std::vector<double> w;      // w[i] at x = (i0 + i) * step
};

struct NumerovOptions {
    double step = 0.01;         // grid step in sqrt(a0)
};

// Integrates the Coulomb problem inward at the quantum-defect energy.
// The inner cutoff is alpha_core^(1/3) (with a small floor), the standard
// choice for model-free alkali Rydberg wavefunctions; it reduces to
// (almost) the origin in the hydrogen limit.
RadialWavefunction radial_wavefunction(const RydbergLevel& level,
                                       const QuantumDefectTable& defects,
                                       const NumerovOptions& opts = {});

// int u_a(r) r^k u_b(r) dr in atomic units over the common grid support.
double radial_integral(const RadialWavefunction& a, const RadialWavefunction& b,
                       int k);

// As radial_matrix_element but with explicit step control (convergence tests).
double radial_matrix_element(const RydbergLevel& a, const RydbergLevel& b,
                             const QuantumDefectTable& defects,
                             const NumerovOptions& opts);

} // namespace rydmol
