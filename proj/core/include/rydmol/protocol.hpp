#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rydmol/pair_interaction.hpp"

namespace rydmol {

// Sites live in the plane theta = pi/2 relative to the quantization axis.
struct ArrayLayout {
    struct Site {
        double mol_x = 0.0, mol_y = 0.0;
        double atom_x = 0.0, atom_y = 0.0;
    };
    std::vector<Site> sites;

    static ArrayLayout chain(int n_sites, double spacing_um, double r_am_um);
    double r_am(int mol, int atom) const;
    double r_aa(int a, int b) const;
    double r_mm(int a, int b) const;
};

// Pairwise interaction strengths in MHz (nu units). v_am(i,j) is the
// magnitude |C3|/r^3 between molecule i and atom j; the sign enters through
// the molecular Z operator. v_aa and v_mm are symmetric with zero diagonal.
struct InteractionTable {
    Eigen::MatrixXd v_am;
    Eigen::MatrixXd v_aa;
    Eigen::MatrixXd v_mm;

    // c3_mm > 0 enables molecule-molecule couplings of the same 1/r^3 form
    // (built from the rotor dipole; off by default).
    static InteractionTable build(const ArrayLayout& layout, const DispersionSet& disp,
                                  double c3_mm_mhz_um3 = 0.0);
};

struct ErrorModel {
    double tau_a_us = 0.0; // Rydberg lifetime; superposition coherence lives 2 tau
    std::array<double, 4> drive_fractional_error{0, 0, 0, 0};
};

// Interaction time for a conditional pi phase between the +/- molecular
// branches: t = 1/(4 |V|) with V = C3 (1 - 3 cos^2 theta)/r^3 in MHz.
// Throws at the magic angle.
double cz_time_us(double c3_mhz_um3, double r_am_um, double theta = 0.5 * units::pi);

struct MeasurementResult {
    double p_g = 0.0;        // probability of reading |g>  (molecule |+>)
    double p_gp = 0.0;       // probability of reading |g'> (molecule |->)
    double fidelity = 0.0;   // readout fidelity: correct-assignment probability
                             // averaged over the +/- basis
    double purity_g = 0.0;   // post-measurement molecular purity given |g>
    double purity_gp = 0.0;
};

// Full measurement circuit H_Y -> excite -> Ising phase -> de-excite -> H_X
// -> projective atom readout, with optional coherence decay exp(-t/(2 tau)).
MeasurementResult simulate_measurement(std::complex<double> amp_plus,
                                       std::complex<double> amp_minus,
                                       const ErrorModel& error, double v_am_mhz,
                                       double t_us);

struct ParityResult {
    double p_even = 0.0;
    double p_odd = 0.0;
    Eigen::VectorXcd post_even;  // molecular state conditioned on even outcome
    Eigen::VectorXcd post_odd;
};

// Parity measurement: every molecule couples to one atom branch with equal
// |V|; the interaction runs for the conditional-pi time so each |-> molecule
// flips the outcome. The initial atom phase is chosen so that even parity
// maps deterministically to |g>. Throws when the |V| differ.
ParityResult simulate_parity(const std::vector<double>& v_am_mhz,
                             const Eigen::VectorXcd& molecule_state);

// Spin-echo pulse classes: class 1 idles; class 2 pulses at {T/2, T}; class
// k >= 3 pulses at odd multiples of T / 2^(k-1). Cross-class Ising couplings
// average to zero, same-class couplings survive.
struct PulseSchedule {
    int classes = 1;
    double total_time_us = 0.0;
    std::vector<std::vector<double>> pulse_times; // per class, ascending

    int total_pulses() const;
    // +/-1 sign profile of a class at time t (initial sign +1)
    int sign_of(int cls, double t) const;
};

PulseSchedule build_echo_schedule(int classes, double total_time_us);

struct ArraySimResult {
    Eigen::VectorXcd state;            // final state, single-site Z phases corrected
    std::vector<double> pair_fidelity; // per site vs isolated-pair ideal
    double norm_error = 0.0;
};

// Exact state-vector evolution of the diagonal Ising model with
// instantaneous pi pulses (pulses flip both members of every pair in the
// class). Site i uses spins (2i: molecule, 2i+1: atom); initial state is
// molecule (amp_plus, amp_minus) x atom (|g> + i|a>)/sqrt2 per site.
// Limit: 14 spins (7 sites).
ArraySimResult simulate_array(const InteractionTable& table,
                              const PulseSchedule& schedule,
                              const std::vector<int>& site_class,
                              const std::vector<std::complex<double>>& amp_plus,
                              const std::vector<std::complex<double>>& amp_minus);

struct AlternatingPlan {
    struct Round {
        std::vector<int> sites;
        double min_r_aa_um = 0.0;
        double v_aa_mhz = 0.0; // |V_aa| at that distance
    };
    std::vector<Round> rounds;
};

// Measurement rounds by site index modulo k, with the per-round minimum
// active atom-atom distance and residual interaction.
AlternatingPlan alternating_measurement_plan(const ArrayLayout& layout,
                                             const DispersionSet& disp, int k);

} // namespace rydmol
