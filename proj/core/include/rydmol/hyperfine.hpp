#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "rydmol/molecule.hpp"

namespace rydmol {

// Basis ordering for the hyperfine Hamiltonian: |N mN> x |mI1> x |mI2>, with
// N = 0..Nmax, mN = -N..N (outermost), then mI1, mI2 (innermost fastest).
struct HyperfineBasis {
    std::vector<std::array<int, 3>> states; // (N, mN, index of (mI1, mI2) pair)
    int two_i1 = 0, two_i2 = 0;
    int nuclear_dim() const { return (two_i1 + 1) * (two_i2 + 1); }
};

// Full hyperfine Hamiltonian H_Q + H_IN + H_t + H_sc on the rotor x nuclear
// basis, in MHz. Real symmetric; block-diagonal in mF = mN + mI1 + mI2.
Eigen::MatrixXd hyperfine_hamiltonian(const MoleculeSpec& spec, int nmax);

// Basis bookkeeping helper matching hyperfine_hamiltonian's ordering.
HyperfineBasis hyperfine_basis(const MoleculeSpec& spec, int nmax);

// Nuclear-spin Hamiltonian of one rotational manifold: H_hf projected onto a
// fixed |N, mN> (terms changing mN are dropped; the microwave dressing that
// justifies this enters through the caller-supplied light shifts).
Eigen::MatrixXd projected_nuclear_hamiltonian(const MoleculeSpec& spec,
                                              const RotorState& state);

struct OverlapPair {
    int lower_index = 0;   // eigenstate index in the lower manifold (ascending energy)
    int upper_index = 0;   // best-overlap eigenstate in the upper manifold
    double overlap = 0.0;  // squared overlap in the nuclear-spin basis
    bool stretched = false;
};

// For each lower-manifold hyperfine eigenstate, the largest squared nuclear
// overlap with an upper-manifold eigenstate, sorted descending by overlap.
// aux_gap_mhz > 0 adds the second-order dressed-manifold correction for an
// auxiliary drive of that Rabi frequency (upper encodings with two
// components); 0 means the infinite-shift projection.
std::vector<OverlapPair> nuclear_overlap_analysis(const MoleculeSpec& spec,
                                                  const QubitEncoding& enc,
                                                  double aux_gap_mhz = 0.0);

} // namespace rydmol
