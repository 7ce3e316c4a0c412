#pragma once

#include <map>
#include <optional>
#include <string>

namespace rydmol {

// One fine-structure Rydberg basis state. J and mJ are stored doubled to keep
// half-integers exact.
struct RydbergLevel {
    int n = 0;
    int l = 0;
    int two_j = 0;
    int two_mj = 0;

    bool operator==(const RydbergLevel&) const = default;
    auto operator<=>(const RydbergLevel&) const = default;
};

// Throws std::domain_error when (n, L, J, mJ) violate the usual constraints.
void validate(const RydbergLevel& level);

std::string to_string(const RydbergLevel& level);

// Rydberg-Ritz coefficients for one (L, J) channel.
struct RitzCoefficients {
    double d0 = 0.0;
    double d2 = 0.0;
    double d4 = 0.0;
};

// Quantum defects plus species constants, loaded from the plain-text data
// file shipped under core/data (format documented there).
class QuantumDefectTable {
public:
    static QuantumDefectTable load(const std::string& path, const std::string& species);

    // Hydrogen-like table: all defects zero, Ry* = Ry_inf, no core.
    static QuantumDefectTable hydrogen();

    const std::string& species() const { return species_; }
    double rydberg_mhz() const { return rydberg_mhz_; }
    double core_polarizability() const { return core_polarizability_; }

    // delta(n, L, J); channels above the tabulated range give 0.
    double defect(int n, int l, int two_j) const;

    double effective_n(const RydbergLevel& level) const;

private:
    std::string species_;
    double rydberg_mhz_ = 0.0;          // species Rydberg constant, MHz
    double core_polarizability_ = 0.0;  // atomic units
    std::map<std::pair<int, int>, RitzCoefficients> channels_; // key (L, 2J)
};

// Level energy relative to the ionization threshold, in MHz:
// E = -Ry* / (n - delta)^2.
double level_energy(const RydbergLevel& level, const QuantumDefectTable& defects);

// Radial matrix element <a| r |b> in atomic units (Numerov integration of the
// Coulomb problem at the quantum-defect energies). Requires |L_a - L_b| = 1.
double radial_matrix_element(const RydbergLevel& a, const RydbergLevel& b,
                             const QuantumDefectTable& defects);

// Full transition dipole <b| d_p |a> in atomic units, p in {-1, 0, +1};
// selection-rule violations return 0.
double transition_dipole(const RydbergLevel& a, const RydbergLevel& b, int p,
                         const QuantumDefectTable& defects);

// Dimensionless dipole-moment ratios and energy offsets of the primed
// fine-structure partners used by the six-level dressing model. A partner is
// absent when the unprimed state is S1/2.
struct FineStructureRatios {
    // ratios of dipole elements into the primed states
    std::optional<double> f_pi, f_sigma;       // <x'|d|r> / <x|d|r>
    std::optional<double> g_pi, g_sigma;       // <x|d|r'> / <x|d|r>
    std::optional<double> g_pi_p, g_sigma_p;   // <x'|d|r'> / <x|d|r>
    // energy offsets (MHz): r' relative to r, x' relative to x
    std::optional<double> delta_r_p;
    std::optional<double> delta_pi_p;
    std::optional<double> delta_sigma_p;

    std::optional<RydbergLevel> r_p, r_pi_p, r_sigma_p;
};

FineStructureRatios fine_structure_ratios(const RydbergLevel& r,
                                          const RydbergLevel& r_pi,
                                          const RydbergLevel& r_sigma,
                                          const QuantumDefectTable& defects);

// Primed partner (same n, L, mJ; the other J), if it exists and can hold mJ.
std::optional<RydbergLevel> primed_partner(const RydbergLevel& level);

// Locates the data directory: $RYDMOL_DATA_DIR, else the in-source default.
std::string default_data_dir();

} // namespace rydmol
