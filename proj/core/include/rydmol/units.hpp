#pragma once

// Unit conventions used throughout the library:
//
//   frequency / energy   MHz, always the nu = omega/2pi value ("2pi x MHz")
//   distance             micrometers
//   time                 microseconds (1/MHz)
//   dipole moments       atomic units (e*a0) inside atomic-structure code;
//                        molecule-frame dipoles enter in Debye and are
//                        converted on parse
//   radial integrals     atomic units (a0)
//
// Dispersion coefficients combine the above: C3 in MHz*um^3, C6 in MHz*um^6
// internally; CSV/report columns state their own units (GHz*um^6 etc.).

namespace rydmol::units {

inline constexpr double pi = 3.14159265358979323846;

// CODATA-2018 SI values.
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double bohr_radius = 5.29177210903e-11;       // m
inline constexpr double planck_h = 6.62607015e-34;             // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;// F/m
inline constexpr double speed_of_light = 299792458.0;          // m/s

// 1 cm^-1 in MHz.
inline constexpr double mhz_per_inverse_cm = speed_of_light * 1e-4;

// Dipole-dipole coupling constant: (e*a0)^2 / (4 pi eps0 h), expressed in
// MHz * um^3. Two unit dipoles (1 e*a0 each) 1 um apart interact at this
// frequency scale.
inline constexpr double dd_mhz_um3 =
    (elementary_charge * bohr_radius) * (elementary_charge * bohr_radius) /
    (4.0 * pi * vacuum_permittivity * planck_h) * 1e18 /* m^-3 -> um^-3 */
    * 1e-6 /* Hz -> MHz */;

// 1 Debye in e*a0.
inline constexpr double ea0_per_debye =
    1e-21 / speed_of_light / (elementary_charge * bohr_radius);

} // namespace rydmol::units
