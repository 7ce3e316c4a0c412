#include "rydmol/molecule.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rydmol/angular.hpp"

namespace rydmol {

MoleculeSpec load_molecule(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open molecule file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        std::string kind;
        if (!(is >> kind)) continue;
        if (kind != "molecule")
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown record kind: " + kind);
        MoleculeSpec spec;
        double eqq1_khz, eqq2_khz, c1_hz, c2_hz, c3_hz, c4_hz;
        if (!(is >> spec.name >> spec.b0_mhz >> spec.dipole_debye >> spec.two_i1 >>
              spec.two_i2 >> eqq1_khz >> eqq2_khz >> c1_hz >> c2_hz >> c3_hz >> c4_hz))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed molecule record");
        if (spec.name != name) continue;
        if (spec.b0_mhz <= 0) throw std::runtime_error("molecule B0 must be positive");
        spec.eqq1 = eqq1_khz * 1e-3;
        spec.eqq2 = eqq2_khz * 1e-3;
        spec.c1 = c1_hz * 1e-6;
        spec.c2 = c2_hz * 1e-6;
        spec.c3 = c3_hz * 1e-6;
        spec.c4 = c4_hz * 1e-6;
        return spec;
    }
    throw std::runtime_error("molecule " + name + " not found in " + path);
}

void validate(const RotorState& s) {
    if (s.n < 0 || std::abs(s.mn) > s.n)
        throw std::domain_error("RotorState: need N >= 0 and |mN| <= N");
}

QubitEncoding qubit_states(const MoleculeSpec& spec, const RotorState& lower,
                           const RotorState& upper) {
    validate(lower);
    validate(upper);
    const int dn = upper.n - lower.n;
    const int dm = upper.mn - lower.mn;
    if (std::abs(dn) != 1 || std::abs(dm) > 1)
        throw std::domain_error("qubit_states: rotor pair is not dipole-coupled");

    QubitEncoding enc;
    enc.lower = lower;
    enc.upper = upper;
    enc.pol = (dm == 0) ? Polarization::pi : Polarization::sigma;
    const double c1p = rotor_ckp(upper.n, upper.mn, 1, dm, lower.n, lower.mn);
    if (c1p == 0.0)
        throw std::domain_error("qubit_states: vanishing rotor transition moment");
    enc.mu_m_debye = spec.dipole_debye * std::abs(c1p);
    enc.omega_m_mhz =
        spec.b0_mhz * (upper.n * (upper.n + 1.0) - lower.n * (lower.n + 1.0));
    return enc;
}

QubitEncoding auxiliary_pi_dressing(const MoleculeSpec& spec,
                                    const QubitEncoding& enc, double omega_aux_mhz) {
    if (omega_aux_mhz == 0.0) return enc;
    if (!enc.upper_components.empty())
        throw std::domain_error("auxiliary_pi_dressing: encoding already dressed");

    RotorState target{enc.upper.n + 1, enc.upper.mn};
    validate(target);
    QubitEncoding out = enc;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    out.upper_components = {{enc.upper, inv_sqrt2}, {target, inv_sqrt2}};
    out.mu_m_debye = enc.mu_m_debye * inv_sqrt2;
    (void)spec;
    return out;
}

} // namespace rydmol
