#include "rydmol/hyperfine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

#include "rydmol/angular.hpp"

namespace rydmol {

namespace {

// spherical tensor components T^1_q of a spin-I vector operator
std::array<Eigen::MatrixXd, 3> spin_tensor(int two_i) {
    const int dim = two_i + 1;
    Eigen::MatrixXd iz = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd ip = Eigen::MatrixXd::Zero(dim, dim);
    const double i_val = 0.5 * two_i;
    for (int k = 0; k < dim; ++k) {
        const double m = -i_val + k;
        iz(k, k) = m;
        if (k + 1 < dim)
            ip(k + 1, k) = std::sqrt(i_val * (i_val + 1) - m * (m + 1));
    }
    Eigen::MatrixXd im = ip.transpose();
    // order: q = -1, 0, +1
    return {im / std::sqrt(2.0), iz, -ip / std::sqrt(2.0)};
}

// T^2_p(A, B) built from two commuting rank-1 sets
Eigen::MatrixXd rank2_product(const std::array<Eigen::MatrixXd, 3>& a,
                              const std::array<Eigen::MatrixXd, 3>& b, int p) {
    const int dim = static_cast<int>(a[0].rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (int q1 = -1; q1 <= 1; ++q1)
        for (int q2 = -1; q2 <= 1; ++q2) {
            if (q1 + q2 != p) continue;
            double cg = clebsch_gordan(2, 2 * q1, 2, 2 * q2, 4, 2 * p);
            if (cg == 0.0) continue;
            out += cg * a[q1 + 1] * b[q2 + 1];
        }
    return out;
}

struct RotorBasis {
    std::vector<std::pair<int, int>> nm; // (N, mN)
};

RotorBasis rotor_basis(int nmax) {
    RotorBasis rb;
    for (int n = 0; n <= nmax; ++n)
        for (int m = -n; m <= n; ++m) rb.nm.push_back({n, m});
    return rb;
}

// C^2_p on the rotor basis
Eigen::MatrixXd rotor_c2(const RotorBasis& rb, int p) {
    const int dim = static_cast<int>(rb.nm.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            auto [n_to, m_to] = rb.nm[a];
            auto [n_from, m_from] = rb.nm[b];
            out(a, b) = rotor_ckp(n_to, m_to, 2, p, n_from, m_from);
        }
    return out;
}

// N_z, N_+, N_- on the rotor basis
std::array<Eigen::MatrixXd, 3> rotor_n_tensor(const RotorBasis& rb) {
    const int dim = static_cast<int>(rb.nm.size());
    Eigen::MatrixXd nz = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd np = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            auto [n_to, m_to] = rb.nm[a];
            auto [n_from, m_from] = rb.nm[b];
            if (n_to != n_from) continue;
            if (m_to == m_from) nz(a, b) = m_from;
            if (m_to == m_from + 1)
                np(a, b) = std::sqrt(n_from * (n_from + 1.0) - m_from * (m_from + 1.0));
        }
    Eigen::MatrixXd nm = np.transpose();
    return {nm / std::sqrt(2.0), nz, -np / std::sqrt(2.0)};
}

Eigen::MatrixXd kron3(const Eigen::MatrixXd& rot, const Eigen::MatrixXd& n1,
                      const Eigen::MatrixXd& n2) {
    return Eigen::kroneckerProduct(rot, Eigen::kroneckerProduct(n1, n2).eval()).eval();
}

} // namespace

HyperfineBasis hyperfine_basis(const MoleculeSpec& spec, int nmax) {
    HyperfineBasis hb;
    hb.two_i1 = spec.two_i1;
    hb.two_i2 = spec.two_i2;
    auto rb = rotor_basis(nmax);
    for (auto [n, m] : rb.nm)
        for (int k = 0; k < hb.nuclear_dim(); ++k)
            hb.states.push_back({n, m, k});
    return hb;
}

Eigen::MatrixXd hyperfine_hamiltonian(const MoleculeSpec& spec, int nmax) {
    if (nmax < 0) throw std::domain_error("hyperfine_hamiltonian: Nmax >= 0 required");
    const auto rb = rotor_basis(nmax);
    const int rot_dim = static_cast<int>(rb.nm.size());
    const int d1 = spec.two_i1 + 1;
    const int d2 = spec.two_i2 + 1;
    const int dim = rot_dim * d1 * d2;

    const auto t1 = spin_tensor(spec.two_i1);
    const auto t2 = spin_tensor(spec.two_i2);
    const Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(d1, d1);
    const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(d2, d2);
    const Eigen::MatrixXd idr = Eigen::MatrixXd::Identity(rot_dim, rot_dim);
    const auto nt = rotor_n_tensor(rb);

    std::array<Eigen::MatrixXd, 5> c2; // p = -2..2
    for (int p = -2; p <= 2; ++p) c2[p + 2] = rotor_c2(rb, p);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

    // quadrupole couplings (skip spin-1/2 nuclei)
    auto add_quadrupole = [&](double eqq, const std::array<Eigen::MatrixXd, 3>& t,
                              bool first, int two_i) {
        if (eqq == 0.0 || two_i < 2) return;
        const double i_val = 0.5 * two_i;
        const double coef = eqq * std::sqrt(6.0) / (4.0 * i_val * (2.0 * i_val - 1.0));
        for (int p = -2; p <= 2; ++p) {
            Eigen::MatrixXd tii = rank2_product(t, t, -p);
            if (tii.cwiseAbs().maxCoeff() == 0.0) continue;
            const double sign = (p % 2 == 0) ? 1.0 : -1.0;
            if (first)
                h += coef * sign * kron3(c2[p + 2], tii, id2);
            else
                h += coef * sign * kron3(c2[p + 2], id1, tii);
        }
    };
    add_quadrupole(spec.eqq1, t1, true, spec.two_i1);
    add_quadrupole(spec.eqq2, t2, false, spec.two_i2);

    // spin-rotation c_i N.I_i (scalar product of rank-1 tensors)
    for (int q = -1; q <= 1; ++q) {
        const double sign = (q % 2 == 0) ? 1.0 : -1.0;
        if (spec.c1 != 0.0)
            h += spec.c1 * sign * kron3(nt[q + 1], t1[1 - q], id2);
        if (spec.c2 != 0.0)
            h += spec.c2 * sign * kron3(nt[q + 1], id1, t2[1 - q]);
    }

    // tensor spin-spin: -c3 sqrt6 T2(C) . T2(I1, I2)
    if (spec.c3 != 0.0) {
        for (int p = -2; p <= 2; ++p) {
            const double sign = (p % 2 == 0) ? 1.0 : -1.0;
            // T2_{-p}(I1, I2) acts on the nuclear pair space
            Eigen::MatrixXd t12 = Eigen::MatrixXd::Zero(d1 * d2, d1 * d2);
            for (int q1 = -1; q1 <= 1; ++q1)
                for (int q2 = -1; q2 <= 1; ++q2) {
                    if (q1 + q2 != -p) continue;
                    double cg = clebsch_gordan(2, 2 * q1, 2, 2 * q2, 4, -2 * p);
                    if (cg == 0.0) continue;
                    t12 += cg * Eigen::kroneckerProduct(t1[q1 + 1], t2[q2 + 1]).eval();
                }
            h += -spec.c3 * std::sqrt(6.0) * sign *
                 Eigen::kroneckerProduct(c2[p + 2], t12).eval();
        }
    }

    // scalar spin-spin: c4 I1.I2
    if (spec.c4 != 0.0) {
        for (int q = -1; q <= 1; ++q) {
            const double sign = (q % 2 == 0) ? 1.0 : -1.0;
            h += spec.c4 * sign *
                 kron3(idr, t1[q + 1], t2[1 - q]);
        }
    }

    // exact symmetry by construction check-and-mirror
    h = 0.5 * (h + h.transpose()).eval();
    return h;
}

Eigen::MatrixXd projected_nuclear_hamiltonian(const MoleculeSpec& spec,
                                              const RotorState& state) {
    validate(state);
    const int d1 = spec.two_i1 + 1;
    const int d2 = spec.two_i2 + 1;
    const auto t1 = spin_tensor(spec.two_i1);
    const auto t2 = spin_tensor(spec.two_i2);
    const Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(d1, d1);
    const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(d2, d2);

    const double c20 = rotor_ckp(state.n, state.mn, 2, 0, state.n, state.mn);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d1 * d2, d1 * d2);

    auto quad = [&](double eqq, const std::array<Eigen::MatrixXd, 3>& t, bool first,
                    int two_i) {
        if (eqq == 0.0 || two_i < 2) return;
        const double i_val = 0.5 * two_i;
        const double coef = eqq * std::sqrt(6.0) / (4.0 * i_val * (2.0 * i_val - 1.0));
        Eigen::MatrixXd tii = rank2_product(t, t, 0);
        if (first)
            h += coef * c20 * Eigen::kroneckerProduct(tii, id2).eval();
        else
            h += coef * c20 * Eigen::kroneckerProduct(id1, tii).eval();
    };
    quad(spec.eqq1, t1, true, spec.two_i1);
    quad(spec.eqq2, t2, false, spec.two_i2);

    // spin-rotation: only mN I_z survives the fixed-mN projection
    h += spec.c1 * state.mn * Eigen::kroneckerProduct(t1[1], id2).eval();
    h += spec.c2 * state.mn * Eigen::kroneckerProduct(id1, t2[1]).eval();

    // tensor spin-spin, p = 0 component
    if (spec.c3 != 0.0) {
        Eigen::MatrixXd t12 = Eigen::MatrixXd::Zero(d1 * d2, d1 * d2);
        for (int q1 = -1; q1 <= 1; ++q1) {
            int q2 = -q1;
            double cg = clebsch_gordan(2, 2 * q1, 2, 2 * q2, 4, 0);
            t12 += cg * Eigen::kroneckerProduct(t1[q1 + 1], t2[q2 + 1]).eval();
        }
        h += -spec.c3 * std::sqrt(6.0) * c20 * t12;
    }

    // scalar spin-spin
    if (spec.c4 != 0.0) {
        for (int q = -1; q <= 1; ++q) {
            const double sign = (q % 2 == 0) ? 1.0 : -1.0;
            h += spec.c4 * sign * Eigen::kroneckerProduct(t1[q + 1], t2[1 - q]).eval();
        }
    }

    h = 0.5 * (h + h.transpose()).eval();
    return h;
}

std::vector<OverlapPair> nuclear_overlap_analysis(const MoleculeSpec& spec,
                                                  const QubitEncoding& enc,
                                                  double aux_gap_mhz) {
    Eigen::MatrixXd h_low = projected_nuclear_hamiltonian(spec, enc.lower);

    Eigen::MatrixXd h_up;
    if (enc.upper_components.empty()) {
        h_up = projected_nuclear_hamiltonian(spec, enc.upper);
    } else {
        if (enc.upper_components.size() != 2)
            throw std::domain_error("nuclear_overlap_analysis: expected two dressed components");
        Eigen::MatrixXd ha =
            projected_nuclear_hamiltonian(spec, enc.upper_components[0].first);
        Eigen::MatrixXd hb =
            projected_nuclear_hamiltonian(spec, enc.upper_components[1].first);
        h_up = 0.5 * (ha + hb);
        if (aux_gap_mhz > 0.0) {
            Eigen::MatrixXd delta = 0.5 * (ha - hb);
            h_up += delta * delta / (2.0 * aux_gap_mhz);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_low(h_low);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_up(h_up);
    const auto& vl = es_low.eigenvectors();
    const auto& vu = es_up.eigenvectors();
    const int dim = static_cast<int>(h_low.rows());
    const int d2 = spec.two_i2 + 1;

    std::vector<OverlapPair> pairs;
    pairs.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        OverlapPair p;
        p.lower_index = i;
        for (int j = 0; j < dim; ++j) {
            double ov = vl.col(i).dot(vu.col(j));
            ov *= ov;
            if (ov > p.overlap) {
                p.overlap = ov;
                p.upper_index = j;
            }
        }
        // doubly-stretched nuclear states occupy the extreme (mI1, mI2) corners
        const int top = dim - 1;
        p.stretched = (vl.col(i)(0) * vl.col(i)(0) > 0.999) ||
                      (vl.col(i)(top) * vl.col(i)(top) > 0.999);
        // corner indices: (mI1=-I1, mI2=-I2) -> 0, (mI1=I1, mI2=I2) -> dim-1
        (void)d2;
        pairs.push_back(p);
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const OverlapPair& a, const OverlapPair& b) { return a.overlap > b.overlap; });
    return pairs;
}

} // namespace rydmol
