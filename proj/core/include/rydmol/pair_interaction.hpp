#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rydmol/pair_basis.hpp"

namespace rydmol {

// Dispersion coefficients of one scenario. c3 refers to the atom-molecule
// interaction; the rest describe the dressed atom-atom interaction.
struct DispersionSet {
    double c3 = 0.0;  // MHz um^3
    double c6 = 0.0;  // MHz um^6
    double c9 = 0.0;  // MHz um^9
    double c12 = 0.0; // MHz um^12
    double p6 = 0.0;  // um^6
    double p12 = 0.0; // um^12
};

struct PerturbativeResult {
    double c6 = 0.0;           // MHz um^6
    double p6 = 0.0;           // um^6
    double first_order = 0.0;  // <aa|W|aa>, MHz um^3 (residual dipolar)
    int n_pair_states = 0;
};

// Second-order dispersion of the dressed pair:
//   C6 = sum_k |<k|W|aa>|^2 / (eps_aa - eps_k),  P6 = sum_k |...|^2 / (...)^2.
// Throws when a coupled intermediate state sits within
// guard_fraction * pair_cutoff of the dressed pair (near-degeneracy), naming
// the state.
PerturbativeResult perturbative_c6(const SingleAtomSystem& system,
                                   const PairBasis& basis,
                                   const PairGeometry& geometry,
                                   double pair_cutoff_mhz,
                                   double guard_fraction = 1e-6);

struct ExactScanPoint {
    double r_um = 0.0;
    double v_mhz = 0.0;    // tracked eigenstate energy minus the dressed-pair
                           // asymptote
    double overlap = 0.0;  // |<aa|psi(r)>|^2
    bool diabatic = false; // overlap tracking dropped below 0.5 at this step
};

// Diagonalizes diag(eps) + W/r^3 on a descending r grid, adiabatically
// tracking the |aa>-connected eigenstate by overlap with the previous step.
std::vector<ExactScanPoint> exact_scan_points(const SingleAtomSystem& system,
                                              const PairBasis& basis,
                                              const Eigen::MatrixXcd& w,
                                              const std::vector<double>& r_grid_desc);

struct FitOptions {
    double max_deficit = 0.05;  // perturbative fit window
    double min_v_mhz = 1e-5;    // 2pi x 10 Hz floor
};

struct DispersionFit {
    double c9 = 0.0;        // MHz um^9
    double c12 = 0.0;       // MHz um^12
    double p12 = 0.0;       // um^12
    double exponent9 = 0.0; // log-log slope of |V - C12/r^12| (expect -9)
    double exponent12 = 0.0;// log-log slope of |V - C9/r^9| (expect -12)
    double v_residual_rel = 0.0;
    int n_points = 0;
};

// Linear least squares of V(r) on {r^-9, r^-12} with C6 fixed, and of the
// overlap deficit on {r^-12} with P6 fixed. Throws on an ill-conditioned
// design matrix or too few points.
DispersionFit fit_dispersion(const std::vector<ExactScanPoint>& points,
                             double c6_fixed, double p6_fixed,
                             const FitOptions& opts = {});

// Evaluates C3 and C6 as functions of a (possibly perturbed) drive
// configuration, holding the basis recipe fixed. Used by the sensitivity
// Jacobians.
struct CoefficientEvaluator {
    const QuantumDefectTable* defects = nullptr;
    RydbergTriple triple;
    PairTruncation trunc;
    PairGeometry geometry;
    Polarization pol = Polarization::sigma;
    double mu_m_au = 0.0; // molecular dipole, e a0
    DrivePhases phases;
    DressedReference ref;

    SingleAtomSystem system(const DriveConfig& config) const;
    double c3(const DriveConfig& config) const; // MHz um^3
    PerturbativeResult c6(const DriveConfig& config) const;
};

enum class CoefficientKind { c3, c6 };

struct JacobianResult {
    Eigen::Vector4d j;        // v ⊙ dC/dv, v = (omega_pi, omega_sigma, delta_pi, delta_sigma)
    Eigen::Vector4d j_half;   // same with halved step (convergence check)
    double value = 0.0;       // C at the base configuration
};

// Central finite differences with relative step `rel_step` per component,
// step-halving convergence check (>10% disagreement throws).
JacobianResult sensitivity_jacobian(const CoefficientEvaluator& eval,
                                    const DriveConfig& config, CoefficientKind kind,
                                    double rel_step = 1e-5);

// |J6_i| * fractional_error / r^6, in MHz.
double excess_interaction(double j6_mhz_um6, double fractional_error, double r_um);

} // namespace rydmol
