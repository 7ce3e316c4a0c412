#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <vector>

#include "rydmol/atomdata.hpp"
#include "rydmol/dressing.hpp"
#include "rydmol/units.hpp"

namespace rydmol {

struct RydbergTriple {
    RydbergLevel r;
    RydbergLevel r_pi;
    RydbergLevel r_sigma;
    int sigma_p() const { return (r_sigma.two_mj - r.two_mj) / 2; }
};

// Truncation of the two-atom Hilbert space.
struct PairTruncation {
    int lmax = 3;
    int nmin = 0;
    int nmax = 0;
    double pair_cutoff_mhz = 16000.0;  // |eps_pair - eps_aa| window
    double single_cutoff_mhz = 0.0;    // optional cap on single |eps|; 0 = off
    int frame_bound = 2;               // |k_pi|, |k_sigma| <= bound
};

struct PairGeometry {
    double r_um = 1.0;
    double theta = 0.5 * units::pi; // polar angle of the interatomic axis
    double phi = 0.0;               // azimuth
};

struct DrivePhases {
    double chi_pi = 0.0;
    double chi_sigma = 0.0;
};

struct FloquetLevel {
    RydbergLevel level;
    int k_pi = 0;
    int k_sigma = 0;
    double eps_mhz = 0.0; // rotating-frame energy relative to |r>
};

// Reference amplitudes identifying the dressed |a> inside the full basis
// (typically the six-level solution). Empty means "track bare |r>".
struct DressedReference {
    std::vector<std::pair<RydbergLevel, double>> components;
};

// Single-atom rotating-frame system over the truncated level set. Photon
// offsets are assigned per basis state (bounded integers minimizing the
// rotating-frame energy); drive couplings that do not match the assigned
// frames are counter-rotating and dropped.
class SingleAtomSystem {
public:
    static SingleAtomSystem build(const QuantumDefectTable& defects,
                                  const RydbergTriple& triple,
                                  const DriveConfig& config,
                                  const PairTruncation& trunc,
                                  const DrivePhases& phases = {},
                                  const DressedReference& ref = {});

    const std::vector<FloquetLevel>& levels() const { return levels_; }
    int index_of_r() const { return index_of_r_; }
    int dressed_index() const { return dressed_index_; }
    bool all_real() const { return all_real_; }

    const Eigen::MatrixXcd& h0() const { return h0_; }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXcd& vectors() const { return vectors_; }
    double dressed_energy() const { return energies_(dressed_index_); }
    Eigen::VectorXcd dressed_vector() const { return vectors_.col(dressed_index_); }

    // dipole operators (e a0) on the bare Floquet basis, split by frame
    // change g = frame(bra) - frame(ket)
    struct Channel {
        std::array<int, 2> g;
        int p;
        Eigen::MatrixXd op;
    };
    const std::vector<Channel>& bare_channels() const { return channels_; }

    // static dressed moment of eigenstate `state` in the (g, p) channel:
    // <state| d_p^{(g)} |state>
    std::complex<double> dressed_moment(int state, std::array<int, 2> g, int p) const;

    std::string level_name(int idx) const;

private:
    std::vector<FloquetLevel> levels_;
    int index_of_r_ = -1;
    int dressed_index_ = -1;
    bool all_real_ = true;
    Eigen::MatrixXcd h0_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
    std::vector<Channel> channels_;
};

// Symmetrized two-atom basis over single-atom eigenstates, truncated by the
// pair-energy window around the dressed pair.
struct PairBasis {
    struct State {
        int i = 0, j = 0;   // eigenstate indices, i <= j
        double eps = 0.0;   // eta_i + eta_j
    };
    std::vector<State> states;
    int aa_index = -1;      // position of the dressed pair
    double eps_aa = 0.0;
};

PairBasis build_pair_basis(const SingleAtomSystem& system, const PairTruncation& trunc);

// Vdd channel coefficients c(p,q) at (theta, phi); V = sum c_pq d1_p d2_q / r^3.
std::array<std::array<std::complex<double>, 3>, 3> dd_channel_coefficients(
    double theta, double phi);

// Dipole-dipole coupling matrix W (MHz * um^3) on the symmetrized pair basis:
// V(r) = W / r_um^3. Couplings that change the total photon offsets are
// dropped (counter-rotating in the assigned frames).
Eigen::MatrixXcd dipole_dipole_operator(const SingleAtomSystem& system,
                                        const PairBasis& basis,
                                        const PairGeometry& geometry);

// Column <k|W|aa> over the pair basis (same units), plus the diagonal
// <aa|W|aa>. Much cheaper than the full matrix.
Eigen::VectorXcd dipole_dipole_column(const SingleAtomSystem& system,
                                      const PairBasis& basis,
                                      const PairGeometry& geometry);

// Pair rotating-frame Hamiltonian without interactions: diag(eps).
Eigen::VectorXd pair_h0_diagonal(const PairBasis& basis);

} // namespace rydmol
