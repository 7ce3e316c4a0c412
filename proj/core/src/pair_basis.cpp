#include "rydmol/pair_basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rydmol {

namespace {

using cd = std::complex<double>;

std::vector<RydbergLevel> enumerate_levels(const PairTruncation& trunc) {
    std::vector<RydbergLevel> out;
    for (int n = trunc.nmin; n <= trunc.nmax; ++n)
        for (int l = 0; l <= std::min(trunc.lmax, n - 1); ++l)
            for (int two_j = std::abs(2 * l - 1); two_j <= 2 * l + 1; two_j += 2)
                for (int two_mj = -two_j; two_mj <= two_j; two_mj += 2)
                    out.push_back({n, l, two_j, two_mj});
    return out;
}

} // namespace

SingleAtomSystem SingleAtomSystem::build(const QuantumDefectTable& defects,
                                         const RydbergTriple& triple,
                                         const DriveConfig& config,
                                         const PairTruncation& trunc,
                                         const DrivePhases& phases,
                                         const DressedReference& ref) {
    if (trunc.nmin < 1 || trunc.nmax < trunc.nmin)
        throw std::domain_error("PairTruncation: bad n window");

    SingleAtomSystem sys;
    const double e_r = level_energy(triple.r, defects);
    const double w_pi = config.pi_drive_frequency();
    const double w_sigma = config.sigma_drive_frequency();
    const int bound = trunc.frame_bound;

    // enumerate levels and assign photon offsets
    for (const auto& lev : enumerate_levels(trunc)) {
        const double de = level_energy(lev, defects) - e_r;
        int best_kp = 0, best_ks = 0;
        double best = std::abs(de);
        for (int kp = -bound; kp <= bound; ++kp)
            for (int ks = -bound; ks <= bound; ++ks) {
                const double eps = de - kp * w_pi - ks * w_sigma;
                const double a = std::abs(eps);
                const bool better =
                    a < best - 1e-9 ||
                    (a < best + 1e-9 &&
                     std::make_tuple(std::abs(kp) + std::abs(ks), kp, ks) <
                         std::make_tuple(std::abs(best_kp) + std::abs(best_ks), best_kp,
                                         best_ks));
                if (better) {
                    best = a;
                    best_kp = kp;
                    best_ks = ks;
                }
            }
        FloquetLevel fl{lev, best_kp, best_ks, de - best_kp * w_pi - best_ks * w_sigma};
        if (trunc.single_cutoff_mhz > 0.0 &&
            std::abs(fl.eps_mhz) > trunc.single_cutoff_mhz && !(lev == triple.r))
            continue;
        sys.levels_.push_back(fl);
    }

    const int nlev = static_cast<int>(sys.levels_.size());
    for (int i = 0; i < nlev; ++i)
        if (sys.levels_[i].level == triple.r) sys.index_of_r_ = i;
    if (sys.index_of_r_ < 0)
        throw std::domain_error("SingleAtomSystem: |r> outside the truncation");

    // bare dipole matrices
    std::array<Eigen::MatrixXd, 3> dip;
    for (auto& m : dip) m = Eigen::MatrixXd::Zero(nlev, nlev);
    for (int i = 0; i < nlev; ++i)
        for (int j = 0; j < nlev; ++j) {
            if (i == j) continue;
            const auto& a = sys.levels_[i].level;
            const auto& b = sys.levels_[j].level;
            if (std::abs(a.l - b.l) != 1) continue;
            const int p2 = b.two_mj - a.two_mj;
            if (p2 != 0 && std::abs(p2) != 2) continue;
            dip[p2 / 2 + 1](j, i) = transition_dipole(a, b, p2 / 2, defects);
        }

    const int p_sigma = triple.sigma_p();
    auto find_index = [&](const RydbergLevel& lev) {
        for (int i = 0; i < nlev; ++i)
            if (sys.levels_[i].level == lev) return i;
        return -1;
    };
    const int i_rpi = find_index(triple.r_pi);
    const int i_rsi = find_index(triple.r_sigma);
    if (i_rpi < 0 || i_rsi < 0)
        throw std::domain_error("SingleAtomSystem: dressing partners outside truncation");
    const double mu_pi_ref = dip[1](i_rpi, sys.index_of_r_);
    const double mu_si_ref = dip[p_sigma + 1](i_rsi, sys.index_of_r_);
    if (mu_pi_ref == 0.0 || mu_si_ref == 0.0)
        throw std::domain_error("SingleAtomSystem: reference dipoles vanish");

    sys.all_real_ = (phases.chi_pi == 0.0 && phases.chi_sigma == 0.0);

    // The microwave drives act within the dressing manifold (the three
    // target states and their fine-structure partners); the remaining basis
    // states are undriven spectators entering only through the dipole-dipole
    // couplings. This is the six-level dressing model embedded in the
    // truncated pair space.
    std::vector<bool> dressing_member(nlev, false);
    {
        std::vector<RydbergLevel> members{triple.r, triple.r_pi, triple.r_sigma};
        for (const auto& base : {triple.r, triple.r_pi, triple.r_sigma})
            if (auto p = primed_partner(base)) members.push_back(*p);
        for (int i = 0; i < nlev; ++i)
            for (const auto& m : members)
                if (sys.levels_[i].level == m) dressing_member[i] = true;
    }

    // rotating-frame Hamiltonian: diagonal eps + frame-matched drive couplings
    sys.h0_ = Eigen::MatrixXcd::Zero(nlev, nlev);
    for (int i = 0; i < nlev; ++i) sys.h0_(i, i) = sys.levels_[i].eps_mhz;
    const cd ph_pi = std::polar(1.0, -phases.chi_pi);
    const cd ph_si = std::polar(1.0, -phases.chi_sigma);
    for (int i = 0; i < nlev; ++i)
        for (int j = 0; j < nlev; ++j) {
            if (i == j) continue;
            if (!dressing_member[i] || !dressing_member[j]) continue;
            const auto& fi = sys.levels_[i];
            const auto& fj = sys.levels_[j];
            const int dkp = fj.k_pi - fi.k_pi;
            const int dks = fj.k_sigma - fi.k_sigma;
            cd val = 0.0;
            if (dkp == 1 && dks == 0 &&
                fj.level.two_mj == fi.level.two_mj && dip[1](j, i) != 0.0)
                val = config.omega_pi * ph_pi * dip[1](j, i) / mu_pi_ref;
            else if (dkp == 0 && dks == 1 &&
                     fj.level.two_mj == fi.level.two_mj + 2 * p_sigma &&
                     dip[p_sigma + 1](j, i) != 0.0)
                val = config.omega_sigma * ph_si * dip[p_sigma + 1](j, i) / mu_si_ref;
            if (val != 0.0) {
                sys.h0_(j, i) += val;
                sys.h0_(i, j) += std::conj(val);
            }
        }

    // H0 conserves mtilde = mJ - k_sigma (the sigma tone raises both, the pi
    // tone neither); eigensolve per sector so exact cross-sector degeneracies
    // stay unmixed
    sys.energies_ = Eigen::VectorXd::Zero(nlev);
    sys.vectors_ = Eigen::MatrixXcd::Zero(nlev, nlev);
    {
        std::map<int, std::vector<int>> sectors; // two_mtilde -> level indices
        for (int i = 0; i < nlev; ++i)
            sectors[sys.levels_[i].level.two_mj - 2 * sys.levels_[i].k_sigma]
                .push_back(i);
        int col0 = 0;
        for (const auto& [mt, idx] : sectors) {
            const int nb = static_cast<int>(idx.size());
            Eigen::MatrixXcd hb(nb, nb);
            for (int a = 0; a < nb; ++a)
                for (int b = 0; b < nb; ++b) hb(a, b) = sys.h0_(idx[a], idx[b]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hb);
            for (int c = 0; c < nb; ++c) {
                sys.energies_(col0 + c) = es.eigenvalues()(c);
                for (int a = 0; a < nb; ++a)
                    sys.vectors_(idx[a], col0 + c) = es.eigenvectors()(a, c);
            }
            col0 += nb;
        }
    }

    // dressed-state selection: maximal overlap with the reference vector
    // (bare |r> when no reference is given)
    Eigen::VectorXd ref_vec = Eigen::VectorXd::Zero(nlev);
    if (ref.components.empty()) {
        ref_vec(sys.index_of_r_) = 1.0;
    } else {
        for (const auto& [lev, amp] : ref.components)
            for (int i = 0; i < nlev; ++i)
                if (sys.levels_[i].level == lev) ref_vec(i) = amp;
        const double n = ref_vec.norm();
        if (n == 0.0)
            throw std::domain_error("SingleAtomSystem: reference outside basis");
        ref_vec /= n;
    }
    int best_col = 0;
    double best_ov = -1.0;
    const Eigen::VectorXcd proj = sys.vectors_.adjoint() * ref_vec.cast<cd>();
    for (int c = 0; c < nlev; ++c) {
        const double ov = std::norm(proj(c));
        if (ov > best_ov) {
            best_ov = ov;
            best_col = c;
        }
    }
    sys.dressed_index_ = best_col;

    // channel-resolved dipole operators on the bare Floquet basis
    std::map<std::array<int, 3>, Eigen::MatrixXd> groups; // (g_pi, g_sigma, p)
    for (int p = -1; p <= 1; ++p)
        for (int i = 0; i < nlev; ++i)
            for (int j = 0; j < nlev; ++j) {
                const double v = dip[p + 1](j, i);
                if (v == 0.0) continue;
                std::array<int, 3> key{sys.levels_[j].k_pi - sys.levels_[i].k_pi,
                                       sys.levels_[j].k_sigma - sys.levels_[i].k_sigma,
                                       p};
                auto it = groups.find(key);
                if (it == groups.end())
                    it = groups.emplace(key, Eigen::MatrixXd::Zero(nlev, nlev)).first;
                it->second(j, i) = v;
            }
    for (auto& [key, mat] : groups) {
        Channel ch;
        ch.g = {key[0], key[1]};
        ch.p = key[2];
        ch.op = std::move(mat);
        sys.channels_.push_back(std::move(ch));
    }
    return sys;
}

std::complex<double> SingleAtomSystem::dressed_moment(int state, std::array<int, 2> g,
                                                      int p) const {
    for (const auto& ch : channels_)
        if (ch.g == g && ch.p == p) {
            const Eigen::VectorXcd v = vectors_.col(state);
            return v.dot(ch.op.cast<cd>() * v); // v^dagger X v
        }
    return 0.0;
}

std::string SingleAtomSystem::level_name(int eigen_idx) const {
    // dominant bare component of an eigenstate
    int best = 0;
    double bv = -1.0;
    for (int i = 0; i < static_cast<int>(levels_.size()); ++i) {
        const double a = std::abs(vectors_(i, eigen_idx));
        if (a > bv) {
            bv = a;
            best = i;
        }
    }
    const auto& fl = levels_[best];
    std::ostringstream os;
    os << to_string(fl.level) << " frame(" << fl.k_pi << "," << fl.k_sigma << ")";
    return os.str();
}

PairBasis build_pair_basis(const SingleAtomSystem& system, const PairTruncation& trunc) {
    PairBasis basis;
    const auto& eta = system.energies();
    const int n = static_cast<int>(eta.size());
    const int a = system.dressed_index();
    basis.eps_aa = 2.0 * eta(a);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double eps = eta(i) + eta(j);
            if (std::abs(eps - basis.eps_aa) > trunc.pair_cutoff_mhz &&
                !(i == a && j == a))
                continue;
            if (i == a && j == a) basis.aa_index = static_cast<int>(basis.states.size());
            basis.states.push_back({i, j, eps});
        }
    if (basis.states.empty()) throw std::runtime_error("build_pair_basis: empty basis");
    return basis;
}

std::array<std::array<std::complex<double>, 3>, 3> dd_channel_coefficients(double theta,
                                                                           double phi) {
    std::array<std::array<cd, 3>, 3> c{};
    const double st = std::sin(theta), ct = std::cos(theta);
    const double ang = 1.0 - 3.0 * ct * ct;
    const cd eip = std::polar(1.0, phi);
    const cd eim = std::polar(1.0, -phi);
    c[0 + 1][0 + 1] = ang;                                   // (0, 0)
    c[1 + 1][-1 + 1] = 0.5 * ang;                            // (+1, -1)
    c[-1 + 1][1 + 1] = 0.5 * ang;                            // (-1, +1)
    c[1 + 1][1 + 1] = -1.5 * st * st * eim * eim;            // (+1, +1)
    c[-1 + 1][-1 + 1] = -1.5 * st * st * eip * eip;          // (-1, -1)
    const cd sc = 3.0 / std::sqrt(2.0) * st * ct;
    c[0 + 1][1 + 1] = sc * eim;
    c[1 + 1][0 + 1] = sc * eim;
    c[0 + 1][-1 + 1] = -sc * eip;
    c[-1 + 1][0 + 1] = -sc * eip;
    return c;
}

namespace {

// <ab|W|cd> with the total-frame filter. Participating channels are
// transformed into the single-atom eigenbasis once, then channel pairs with
// opposite frame change are matched.
struct ChannelTable {
    std::vector<Eigen::MatrixXcd> ops; // eigenbasis channel operators
    struct Pairing {
        int op1, op2;
        cd coef;
    };
    std::vector<Pairing> pairings;

    ChannelTable(const SingleAtomSystem& sys,
                 const std::array<std::array<cd, 3>, 3>& coef) {
        const auto& ch = sys.bare_channels();
        const int n = static_cast<int>(ch.size());
        std::vector<int> eigen_idx(n, -1);
        auto need = [&](int k) {
            if (eigen_idx[k] < 0) {
                eigen_idx[k] = static_cast<int>(ops.size());
                ops.push_back(sys.vectors().adjoint() *
                              (ch[k].op.cast<cd>() * sys.vectors()));
            }
            return eigen_idx[k];
        };
        for (int k1 = 0; k1 < n; ++k1)
            for (int k2 = 0; k2 < n; ++k2) {
                if (ch[k2].g[0] != -ch[k1].g[0] || ch[k2].g[1] != -ch[k1].g[1]) continue;
                const cd cc = coef[ch[k1].p + 1][ch[k2].p + 1];
                if (cc == cd(0.0)) continue;
                pairings.push_back({need(k1), need(k2), cc});
            }
    }

    cd element(int a, int b, int c, int d) const {
        cd sum = 0.0;
        for (const auto& pr : pairings) {
            const cd v1 = ops[pr.op1](a, c);
            if (v1 == cd(0.0)) continue;
            sum += pr.coef * v1 * ops[pr.op2](b, d);
        }
        return sum;
    }
};

} // namespace

Eigen::MatrixXcd dipole_dipole_operator(const SingleAtomSystem& system,
                                        const PairBasis& basis,
                                        const PairGeometry& geometry) {
    const int np = static_cast<int>(basis.states.size());
    ChannelTable tab(system, dd_channel_coefficients(geometry.theta, geometry.phi));
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(np, np);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

#pragma omp parallel for schedule(dynamic, 16)
    for (int row = 0; row < np; ++row) {
        const auto& s1 = basis.states[row];
        const double n1 = (s1.i == s1.j) ? 1.0 : inv_sqrt2;
        for (int col = row; col < np; ++col) {
            const auto& s2 = basis.states[col];
            const double n2 = (s2.i == s2.j) ? 1.0 : inv_sqrt2;
            cd el = 0.0;
            // exchange sums (a,b) over perms of (s1.i, s1.j), (c,d) over s2
            el += tab.element(s1.i, s1.j, s2.i, s2.j);
            if (s2.i != s2.j) el += tab.element(s1.i, s1.j, s2.j, s2.i);
            if (s1.i != s1.j) {
                el += tab.element(s1.j, s1.i, s2.i, s2.j);
                if (s2.i != s2.j) el += tab.element(s1.j, s1.i, s2.j, s2.i);
            }
            el *= n1 * n2 * units::dd_mhz_um3;
            w(row, col) = el;
            w(col, row) = std::conj(el);
        }
    }
    // kill roundoff asymmetry
    w = 0.5 * (w + w.adjoint()).eval();
    return w;
}

Eigen::VectorXcd dipole_dipole_column(const SingleAtomSystem& system,
                                      const PairBasis& basis,
                                      const PairGeometry& geometry) {
    const int np = static_cast<int>(basis.states.size());
    const int a = system.dressed_index();
    const auto coef = dd_channel_coefficients(geometry.theta, geometry.phi);

    // matched per-channel columns <x|d_p^{(g)}|a> (eigenbasis, two matvecs)
    const auto& chs = system.bare_channels();
    const Eigen::VectorXcd a_col = system.vectors().col(a);
    std::vector<Eigen::VectorXcd> cols(chs.size());
    std::vector<bool> have(chs.size(), false);
    auto col_of = [&](size_t k) -> const Eigen::VectorXcd& {
        if (!have[k]) {
            Eigen::VectorXcd y(a_col.size());
            y.real() = chs[k].op * a_col.real();
            y.imag() = chs[k].op * a_col.imag();
            cols[k] = system.vectors().adjoint() * y;
            have[k] = true;
        }
        return cols[k];
    };
    struct ColPair {
        const Eigen::VectorXcd* v1;
        const Eigen::VectorXcd* v2;
        cd coef;
    };
    std::vector<ColPair> pairs;
    for (size_t k1 = 0; k1 < chs.size(); ++k1)
        for (size_t k2 = 0; k2 < chs.size(); ++k2) {
            if (chs[k2].g[0] != -chs[k1].g[0] || chs[k2].g[1] != -chs[k1].g[1]) continue;
            const cd cc = coef[chs[k1].p + 1][chs[k2].p + 1];
            if (cc == cd(0.0)) continue;
            pairs.push_back({&col_of(k1), &col_of(k2), cc});
        }

    auto t = [&](int x, int y) {
        cd sum = 0.0;
        for (const auto& pr : pairs) sum += pr.coef * (*pr.v1)(x) * (*pr.v2)(y);
        return sum;
    };

    Eigen::VectorXcd out(np);
    const double sqrt2 = std::sqrt(2.0);
    for (int k = 0; k < np; ++k) {
        const auto& s = basis.states[k];
        cd el = (s.i == s.j) ? t(s.i, s.i) : sqrt2 * t(s.i, s.j);
        out(k) = el * units::dd_mhz_um3;
    }
    return out;
}

Eigen::VectorXd pair_h0_diagonal(const PairBasis& basis) {
    Eigen::VectorXd d(basis.states.size());
    for (size_t k = 0; k < basis.states.size(); ++k) d(k) = basis.states[k].eps;
    return d;
}

} // namespace rydmol
