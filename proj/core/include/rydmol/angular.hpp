#pragma once

namespace rydmol {

// Angular-momentum coupling coefficients. All arguments are twice the
// (half-)integer quantum numbers so that half-integer spins stay exact.
// Values are exact Racah sums over double-precision factorials; fine for the
// small momenta (j <= ~10) used here.

double wigner_3j(int two_j1, int two_j2, int two_j3,
                 int two_m1, int two_m2, int two_m3);

double wigner_6j(int two_j1, int two_j2, int two_j3,
                 int two_j4, int two_j5, int two_j6);

// <j1 m1 j2 m2 | j3 m3>
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j3, int two_m3);

// Matrix element of the renormalized spherical harmonic C^k_p between rigid
// rotor states: <N' m' | C^k_p | N m> (integer momenta).
double rotor_ckp(int n_to, int m_to, int k, int p, int n_from, int m_from);

} // namespace rydmol
