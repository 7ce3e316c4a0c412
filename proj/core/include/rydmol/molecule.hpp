#pragma once

#include <string>
#include <vector>

namespace rydmol {

// Rigid-rotor + hyperfine description of a bialkali molecule in its
// electro-vibrational ground state.
struct MoleculeSpec {
    std::string name;
    double b0_mhz = 0.0;       // rotational constant
    double dipole_debye = 0.0; // body-frame dipole moment
    int two_i1 = 0;            // doubled nuclear spins
    int two_i2 = 0;
    // hyperfine constants (MHz)
    double eqq1 = 0.0;
    double eqq2 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

MoleculeSpec load_molecule(const std::string& path, const std::string& name);

struct RotorState {
    int n = 0;
    int mn = 0;
};

void validate(const RotorState& s);

enum class Polarization { pi, sigma };

// The microwave-dressed rotational qubit |+/-> = (|lower> +/- |upper>)/sqrt2.
struct QubitEncoding {
    RotorState lower;
    RotorState upper;
    Polarization pol = Polarization::sigma;
    double mu_m_debye = 0.0; // effective dipole magnitude
    double omega_m_mhz = 0.0; // rotational transition frequency
    // components of the upper dressed state when an auxiliary drive is on;
    // empty means the bare |upper> state
    std::vector<std::pair<RotorState, double>> upper_components;
};

// Builds the encoding for a dipole-coupled rotor pair (|dN| = 1, |dmN| <= 1).
QubitEncoding qubit_states(const MoleculeSpec& spec, const RotorState& lower,
                           const RotorState& upper);

// Applies a strong resonant auxiliary pi drive from the upper state to the
// next rotational manifold (N+1, same mN): the upper qubit state becomes the
// equal superposition and mu_m drops by sqrt2. omega_aux = 0 is the identity.
QubitEncoding auxiliary_pi_dressing(const MoleculeSpec& spec,
                                    const QubitEncoding& enc, double omega_aux_mhz);

} // namespace rydmol
