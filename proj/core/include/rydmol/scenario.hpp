#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rydmol/hyperfine.hpp"
#include "rydmol/pair_interaction.hpp"
#include "rydmol/protocol.hpp"

namespace rydmol {

// Fully assembled scenario: species data, molecular encoding, Rydberg triple
// and the derived single-atom quantities every computation needs.
struct Scheme {
    QuantumDefectTable defects;
    MoleculeSpec molecule;
    QubitEncoding encoding;
    RydbergTriple triple;

    double mu_pi = 0.0;      // <r_pi|d_0|r>, e a0
    double mu_sigma = 0.0;   // <r_sigma|d_p|r>, e a0
    double m_ratio = 0.0;    // |mu_pi / mu_sigma|
    double mu_m_au = 0.0;    // molecular transition dipole, e a0
    double w_pi_atom = 0.0;  // MHz
    double w_sigma_atom = 0.0;
    FineStructureRatios ratios;

    double omega_sigma_rule = 0.1; // |Omega_mol-tone| = rule * w_mol
    int branch_sign = 1;
    double beta = 0.0;

    PairTruncation trunc;       // perturbative-default truncation
    PairTruncation exact_trunc; // truncation for exact diagonalization scans

    // scan grids
    double beta_min = -3.0, beta_max = 3.0;
    int beta_points = 61;
    double r_min_um = 3.0, r_max_um = 16.0;
    int r_points = 24;

    // protocol inputs
    double tau_a_us = 0.0;
    double r_am_um = 1.0;
    int sites = 6;
    double spacing_um = 4.0;
    int echo_classes = 2;
    double echo_time_us = 0.0; // 0 = use the cz time

    // derived from the pair scans when available
    std::optional<DispersionSet> dispersion;
};

// Builds the drive configuration at a given beta: closed-form three-level
// dressing with the molecule-resonant tone fixed by the scenario rule, then
// the six-level refinement of the non-molecular detuning.
struct SolveReport {
    ThreeLevelSolution three_level;
    SixLevelConfig six_level;
    double c3_mhz_um3 = 0.0;       // Eq.-form value at this beta (|+> branch)
    double dipolar_residual3 = 0.0;
    std::string rwa_warning;
};

SolveReport solve_scheme(const Scheme& scheme, double beta);

// Molecular Rabi frequency implied by the molecule-resonant tone:
// Omega_m = Omega_tone * mu_m / |mu_tone| (sign follows the tone Rabi).
double molecular_rabi(const Scheme& scheme, const DriveConfig& config);

CoefficientEvaluator make_evaluator(const Scheme& scheme);

// Reference amplitudes for dressed-state tracking inside the full basis.
DressedReference six_level_reference(const RydbergTriple& triple,
                                     const SixLevelConfig& six);

struct BetaScanPoint {
    double beta = 0.0;
    double c6 = 0.0;    // MHz um^6
    double p6 = 0.0;    // um^6
    double r_crit = 0.0;// um, P6/r^6 = 0.05
    double c3 = 0.0;    // MHz um^3
};

struct BetaScanResult {
    std::vector<BetaScanPoint> points;
    std::vector<double> crossings; // beta values with C6 = 0 (bisected)
    double max_abs_c6 = 0.0;
};

BetaScanResult beta_scan(const Scheme& scheme, double beta_min, double beta_max,
                         int n_points);

struct RadialScanResult {
    std::vector<ExactScanPoint> points;
    double c6_pert = 0.0; // perturbative values on the same truncation
    double p6_pert = 0.0;
    DispersionFit fit;
};

RadialScanResult radial_scan(const Scheme& scheme, const SolveReport& solved);

struct RobustnessReport {
    double c6_variation = 0.0;  // max relative variation across toggles
    double c9_variation = 0.0;
    double c12_variation = 0.0;
    int n_settings = 0;
};

// Re-evaluates the dispersion under drive-phase and azimuth toggles.
RobustnessReport phase_robustness(const Scheme& scheme, const SolveReport& solved,
                                  const std::vector<DrivePhases>& phase_settings,
                                  const std::vector<double>& phi_settings);

// ---- scenario files ----

struct ScenarioFile {
    Scheme scheme;
    std::string name;
    std::string data_dir;
    std::map<std::string, std::string> raw; // section.key -> value
};

// Plain-text scenario parser ([section] headers, key = value records).
// Throws std::runtime_error with file:line on malformed input.
ScenarioFile load_scenario(const std::string& path);

} // namespace rydmol
