#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "rydmol/atomdata.hpp"
#include "rydmol/molecule.hpp"

namespace rydmol {

// Two-tone Rydberg drive parameters. All frequencies are nu = omega/2pi in
// MHz; Rabi frequencies are signed reals (complex phases enter only through
// the robustness toggles in the pair-interaction code).
struct DriveConfig {
    double omega_pi = 0.0;       // Rabi of the pi drive (r <-> r_pi)
    double omega_sigma = 0.0;    // Rabi of the sigma drive (r <-> r_sigma)
    double delta_pi = 0.0;       // detuning of the pi drive
    double delta_sigma = 0.0;    // detuning of the sigma drive
    double omega_mol = 0.0;      // molecular Rabi frequency
    Polarization mol_pol = Polarization::sigma; // molecule-resonant tone
    double w_mol = 0.0;          // molecular transition frequency
    double w_pi_atom = 0.0;      // atomic pi transition frequency
    double w_sigma_atom = 0.0;   // atomic sigma transition frequency

    double pi_drive_frequency() const { return w_pi_atom + delta_pi; }
    double sigma_drive_frequency() const { return w_sigma_atom + delta_sigma; }
};

// Checks the resonant-molecule constraint and RWA sanity bounds. Returns a
// warning string (empty if silent); throws on hard violations.
std::string check_drive_config(const DriveConfig& config);

// One eigenstate of the 3x3 microwave Hamiltonian, coefficients normalized to
// leading component 1: v = (1, a_pi, a_sigma).
struct DressedAtomState {
    double a_pi = 0.0;
    double a_sigma = 0.0;
    double energy = 0.0;     // quasi-energy (MHz)
    double alpha = 0.0;      // a_pi = alpha / sqrt(1 + 2 M^2) when solver-made
    double beta = 0.0;       // 1/alpha - alpha
    int dominant = 0;        // bare component this state is labeled by
    bool degenerate = false; // eigenvalue within 1e-9 of a neighbor

    double norm2() const { return 1.0 + a_pi * a_pi + a_sigma * a_sigma; }
};

// 3x3 drive Hamiltonian on (r, r_pi, r_sigma).
Eigen::Matrix3d three_level_hamiltonian(const DriveConfig& config);

// All three eigenpairs, labeled by dominant bare component (falls back to
// overlap ordering and sets the degenerate flag when eigenvalues collide).
std::array<DressedAtomState, 3> dressed_state(const DriveConfig& config);

// Signed dipolar self-interaction residual |a_pi|^2 mu_pi^2 -
// |a_sigma|^2 mu_sigma^2 / 2 evaluated on normalized coefficients
// (dipole^2 units, i.e. (e a0)^2).
double dipolar_residual(const DressedAtomState& state, double mu_pi, double mu_sigma);

struct ThreeLevelSolution {
    DriveConfig config;
    DressedAtomState state;
};

// Closed-form dressing solver. alpha > 0 parameterizes the dressed state,
// sign_branch = +/-1 selects a_sigma = sign * sqrt2 * M * a_pi. For a
// sigma-resonant molecule the unknowns are (omega_pi, delta_pi) given
// (omega_sigma, delta_sigma); for pi-resonant the roles swap. The three
// scalar eigenvector conditions of H v = E v give, for pol = sigma,
//   E = omega_sigma / a_sigma - delta_sigma,
//   omega_pi = (E - omega_sigma a_sigma) / a_pi,
//   delta_pi = omega_pi / a_pi - E,
// and the mirrored expressions for pol = pi.
ThreeLevelSolution solve_three_level(double alpha, int sign_branch,
                                     double omega_given, double m_ratio,
                                     double delta_fixed, Polarization pol);

// alpha > 0 from beta = 1/alpha - alpha.
double alpha_from_beta(double beta);

// Atom-molecule dispersion coefficient C3 (MHz * um^3, |+> molecular branch)
// for a nullifying dressed state; the |-> branch has the opposite sign.
// mu_m, mu_pi in e*a0.
double molecule_atom_c3(const DressedAtomState& state, double mu_m, double mu_pi,
                        double m_ratio, Polarization pol);

// Peak |C3| over beta (at beta = 0) for the same inputs.
double molecule_atom_c3_max(double mu_m, double mu_pi, double m_ratio,
                            Polarization pol);

// Six-level dressing (fine-structure partners included). Coefficient order:
// (r, r', r_pi, r_sigma, r_pi', r_sigma').
struct SixLevelConfig {
    DriveConfig config;
    FineStructureRatios ratios;
    Eigen::Matrix<double, 6, 1> coeffs; // leading component fixed to 1
    double energy = 0.0;
    double eigen_residual = 0.0;
    double nullification_residual = 0.0; // relative
};

Eigen::Matrix<double, 6, 6> six_level_hamiltonian(const DriveConfig& config,
                                                  const FineStructureRatios& ratios);

// Generalized dipolar nullification quantity: Q_pi^2 mu_pi^2 -
// Q_sigma^2 mu_sigma^2 / 2 on normalized coefficients.
double six_level_dipolar_residual(const Eigen::Matrix<double, 6, 1>& coeffs,
                                  const FineStructureRatios& ratios, double mu_pi,
                                  double mu_sigma);

// Numerically continues the three-level solution to full drive strength,
// scaling all four drive parameters along the ramp while only the detuning of
// the non-molecule-coupled tone stays free. Throws on non-convergence,
// reporting the last converged ramp fraction.
SixLevelConfig solve_six_level(const ThreeLevelSolution& target,
                               const FineStructureRatios& ratios, double mu_pi,
                               double mu_sigma, int ramp_steps = 50);

} // namespace rydmol
