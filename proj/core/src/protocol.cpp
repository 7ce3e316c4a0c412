#include "rydmol/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydmol {

namespace {
using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};
constexpr double two_pi = 2.0 * units::pi;
} // namespace

ArrayLayout ArrayLayout::chain(int n_sites, double spacing_um, double r_am_um) {
    ArrayLayout out;
    for (int i = 0; i < n_sites; ++i) {
        Site s;
        s.mol_x = i * spacing_um;
        s.mol_y = 0.0;
        s.atom_x = i * spacing_um;
        s.atom_y = r_am_um;
        out.sites.push_back(s);
    }
    return out;
}

double ArrayLayout::r_am(int mol, int atom) const {
    const auto& m = sites.at(mol);
    const auto& a = sites.at(atom);
    return std::hypot(m.mol_x - a.atom_x, m.mol_y - a.atom_y);
}

double ArrayLayout::r_aa(int a, int b) const {
    const auto& s1 = sites.at(a);
    const auto& s2 = sites.at(b);
    return std::hypot(s1.atom_x - s2.atom_x, s1.atom_y - s2.atom_y);
}

double ArrayLayout::r_mm(int a, int b) const {
    const auto& s1 = sites.at(a);
    const auto& s2 = sites.at(b);
    return std::hypot(s1.mol_x - s2.mol_x, s1.mol_y - s2.mol_y);
}

InteractionTable InteractionTable::build(const ArrayLayout& layout,
                                         const DispersionSet& disp,
                                         double c3_mm_mhz_um3) {
    const int n = static_cast<int>(layout.sites.size());
    InteractionTable t;
    t.v_am = Eigen::MatrixXd::Zero(n, n);
    t.v_aa = Eigen::MatrixXd::Zero(n, n);
    t.v_mm = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r = layout.r_am(i, j);
            if (r <= 0.0) throw std::domain_error("InteractionTable: zero distance");
            t.v_am(i, j) = std::abs(disp.c3) / (r * r * r);
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double r = layout.r_aa(i, j);
            if (r <= 0.0) throw std::domain_error("InteractionTable: zero distance");
            const double v = disp.c6 / std::pow(r, 6.0) + disp.c9 / std::pow(r, 9.0) +
                             disp.c12 / std::pow(r, 12.0);
            t.v_aa(i, j) = t.v_aa(j, i) = v;
            if (c3_mm_mhz_um3 != 0.0) {
                const double rm = layout.r_mm(i, j);
                t.v_mm(i, j) = t.v_mm(j, i) = c3_mm_mhz_um3 / (rm * rm * rm);
            }
        }
    return t;
}

double cz_time_us(double c3_mhz_um3, double r_am_um, double theta) {
    const double ang = 1.0 - 3.0 * std::cos(theta) * std::cos(theta);
    const double v = c3_mhz_um3 * ang / (r_am_um * r_am_um * r_am_um);
    if (std::abs(v) < 1e-300)
        throw std::domain_error("cz_time: vanishing interaction (magic-angle geometry)");
    return 1.0 / (4.0 * std::abs(v));
}

MeasurementResult simulate_measurement(cd amp_plus, cd amp_minus,
                                       const ErrorModel& error, double v_am_mhz,
                                       double t_us) {
    const double norm = std::sqrt(std::norm(amp_plus) + std::norm(amp_minus));
    if (std::abs(norm - 1.0) > 1e-9)
        throw std::domain_error("simulate_measurement: |alpha|^2 + |beta|^2 must be 1");

    // basis: molecule {+,-} x atom {g, g', a}; rho is 6x6
    Eigen::Matrix<cd, 6, 6> rho = Eigen::Matrix<cd, 6, 6>::Zero();
    Eigen::Matrix<cd, 6, 1> psi = Eigen::Matrix<cd, 6, 1>::Zero();
    psi(0) = amp_plus;  // |+, g>
    psi(3) = amp_minus; // |-, g>
    rho = psi * psi.adjoint();

    auto atom_unitary = [](const Eigen::Matrix3cd& u) {
        Eigen::Matrix<cd, 6, 6> big = Eigen::Matrix<cd, 6, 6>::Zero();
        big.block<3, 3>(0, 0) = u;
        big.block<3, 3>(3, 3) = u;
        return big;
    };

    Eigen::Matrix3cd h_y;
    h_y << 1, I, 0, I, 1, 0, 0, 0, std::sqrt(2.0);
    h_y /= std::sqrt(2.0);
    Eigen::Matrix3cd swap_ga;
    swap_ga << 1, 0, 0, 0, 0, 1, 0, 1, 0; // g' <-> a
    Eigen::Matrix3cd h_x;
    h_x << 1, 1, 0, 1, -1, 0, 0, 0, std::sqrt(2.0);
    h_x /= std::sqrt(2.0);

    auto apply = [&](const Eigen::Matrix<cd, 6, 6>& u) { rho = u * rho * u.adjoint(); };

    apply(atom_unitary(h_y));
    apply(atom_unitary(swap_ga));

    // Ising phase on the |a> branch: molecule |+/-> sees -/+ pi/2 at the CZ
    // time; decay damps the g/a coherences.
    {
        Eigen::Matrix<cd, 6, 6> u = Eigen::Matrix<cd, 6, 6>::Identity();
        u(2, 2) = std::exp(-I * two_pi * v_am_mhz * t_us); // |+, a>
        u(5, 5) = std::exp(+I * two_pi * v_am_mhz * t_us); // |-, a>
        apply(u);
        if (error.tau_a_us > 0.0) {
            const double eta = std::exp(-t_us / (2.0 * error.tau_a_us));
            for (int m = 0; m < 6; ++m)
                for (int n = 0; n < 6; ++n) {
                    const bool m_a = (m % 3) == 2;
                    const bool n_a = (n % 3) == 2;
                    if (m_a != n_a) rho(m, n) *= eta;
                }
        }
    }

    apply(atom_unitary(swap_ga));
    apply(atom_unitary(h_x));

    MeasurementResult out;
    // project on atom |g> (columns 0, 3) and |g'> (columns 1, 4)
    Eigen::Matrix2cd mol_g, mol_gp;
    mol_g << rho(0, 0), rho(0, 3), rho(3, 0), rho(3, 3);
    mol_gp << rho(1, 1), rho(1, 4), rho(4, 1), rho(4, 4);
    out.p_g = mol_g.trace().real();
    out.p_gp = mol_gp.trace().real();
    if (out.p_g > 1e-15) {
        Eigen::Matrix2cd r = mol_g / mol_g.trace();
        out.purity_g = (r * r).trace().real();
    }
    if (out.p_gp > 1e-15) {
        Eigen::Matrix2cd r = mol_gp / mol_gp.trace();
        out.purity_gp = (r * r).trace().real();
    }
    // correct-assignment probability: |+> -> g, |-> -> g'
    out.fidelity = (mol_g(0, 0).real() + mol_gp(1, 1).real());
    return out;
}

ParityResult simulate_parity(const std::vector<double>& v_am_mhz,
                             const Eigen::VectorXcd& molecule_state) {
    const int n = static_cast<int>(v_am_mhz.size());
    if (n < 1) throw std::domain_error("simulate_parity: need at least one molecule");
    if (molecule_state.size() != (1 << n))
        throw std::invalid_argument("simulate_parity: state dimension mismatch");
    const double v0 = std::abs(v_am_mhz[0]);
    for (double v : v_am_mhz)
        if (std::abs(std::abs(v) - v0) > 1e-9 * v0)
            throw std::domain_error(
                "simulate_parity: parity phase undefined for unequal |V|");

    // conditional-pi time: each molecule contributes a +/- pi/2 branch phase
    const double t = 1.0 / (4.0 * v0);
    // a-branch phase for a configuration: prod_i exp(-i pi/2 * z_i)
    // with z = +1 for |+>. Initial atom phase c = i^n makes even parity -> g.
    const cd comp = std::pow(I, n);

    const int dim = 1 << n;
    Eigen::VectorXcd amp_g(dim), amp_gp(dim);
    for (int b = 0; b < dim; ++b) {
        int minus_count = 0;
        double zsum = 0.0;
        for (int i = 0; i < n; ++i) {
            const bool minus = (b >> i) & 1;
            minus_count += minus;
            zsum += minus ? -1.0 : 1.0;
        }
        (void)minus_count;
        const cd phase = std::exp(-I * two_pi * v0 * t * zsum); // = (-i)^zsum
        // atom: (|g> + comp * phase |g'>)/sqrt2 -> H_X
        amp_g(b) = molecule_state(b) * 0.5 * (1.0 + comp * phase);
        amp_gp(b) = molecule_state(b) * 0.5 * (1.0 - comp * phase);
    }

    ParityResult out;
    out.p_even = amp_g.squaredNorm();
    out.p_odd = amp_gp.squaredNorm();
    out.post_even = out.p_even > 1e-15 ? (amp_g / std::sqrt(out.p_even)).eval()
                                       : Eigen::VectorXcd::Zero(dim).eval();
    out.post_odd = out.p_odd > 1e-15 ? (amp_gp / std::sqrt(out.p_odd)).eval()
                                     : Eigen::VectorXcd::Zero(dim).eval();
    return out;
}

int PulseSchedule::total_pulses() const {
    int n = 0;
    for (const auto& c : pulse_times) n += static_cast<int>(c.size());
    return n;
}

int PulseSchedule::sign_of(int cls, double t) const {
    int s = 1;
    for (double tp : pulse_times.at(cls))
        if (tp <= t) s = -s;
    return s;
}

PulseSchedule build_echo_schedule(int classes, double total_time_us) {
    if (classes < 1) throw std::domain_error("build_echo_schedule: classes >= 1");
    PulseSchedule out;
    out.classes = classes;
    out.total_time_us = total_time_us;
    out.pulse_times.resize(classes);
    for (int k = 2; k <= classes; ++k) {
        auto& times = out.pulse_times[k - 1];
        const double dt = total_time_us / std::pow(2.0, k - 1);
        for (double t = dt; t < total_time_us - 1e-12 * total_time_us; t += 2.0 * dt)
            times.push_back(t);
        if (times.size() % 2 == 1) times.push_back(total_time_us); // restore basis
    }
    return out;
}

ArraySimResult simulate_array(const InteractionTable& table,
                              const PulseSchedule& schedule,
                              const std::vector<int>& site_class,
                              const std::vector<cd>& amp_plus,
                              const std::vector<cd>& amp_minus) {
    const int n_sites = static_cast<int>(site_class.size());
    if (n_sites < 1) throw std::domain_error("simulate_array: need sites");
    if (2 * n_sites > 14)
        throw std::domain_error("simulate_array: spin count over the 14-spin limit");
    if (table.v_am.rows() != n_sites)
        throw std::invalid_argument("simulate_array: table size mismatch");

    const int n_spins = 2 * n_sites;
    const long dim = 1L << n_spins;

    // z values: molecule bit (2i): 0 -> |+> (z=+1); atom bit (2i+1): 0 -> g
    auto zmol = [](long b, int i) { return ((b >> (2 * i)) & 1) ? -1.0 : 1.0; };
    auto pa = [](long b, int i) { return double((b >> (2 * i + 1)) & 1); };

    // diagonal energy of a configuration (MHz)
    auto energy = [&](long b) {
        double e = 0.0;
        for (int i = 0; i < n_sites; ++i)
            for (int j = 0; j < n_sites; ++j)
                e += table.v_am(i, j) * zmol(b, i) * pa(b, j);
        for (int i = 0; i < n_sites; ++i)
            for (int j = i + 1; j < n_sites; ++j) {
                e += table.v_aa(i, j) * pa(b, i) * pa(b, j);
                e += table.v_mm(i, j) * zmol(b, i) * zmol(b, j);
            }
        return e;
    };

    // initial product state
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(dim);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (long b = 0; b < dim; ++b) {
        cd amp = 1.0;
        for (int i = 0; i < n_sites; ++i) {
            amp *= ((b >> (2 * i)) & 1) ? amp_minus[i] : amp_plus[i];
            amp *= ((b >> (2 * i + 1)) & 1) ? (I * inv_sqrt2) : cd(inv_sqrt2);
        }
        state(b) = amp;
    }

    // event list: (time, classes pulsing)
    std::vector<std::pair<double, std::vector<int>>> events;
    {
        std::vector<double> all;
        for (const auto& c : schedule.pulse_times)
            for (double t : c) all.push_back(t);
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                  all.end());
        for (double t : all) {
            std::vector<int> cls;
            for (int c = 0; c < schedule.classes; ++c)
                for (double tp : schedule.pulse_times[c])
                    if (std::abs(tp - t) < 1e-12) cls.push_back(c);
            events.push_back({t, cls});
        }
    }

    auto evolve = [&](double dt) {
        if (dt <= 0.0) return;
        for (long b = 0; b < dim; ++b)
            state(b) *= std::exp(-I * two_pi * energy(b) * dt);
    };
    auto pulse_mask = [&](const std::vector<int>& classes) {
        long mask = 0;
        for (int i = 0; i < n_sites; ++i)
            if (std::find(classes.begin(), classes.end(), site_class[i]) != classes.end())
                mask |= (1L << (2 * i)) | (1L << (2 * i + 1));
        return mask;
    };

    double t_now = 0.0;
    for (const auto& [t, cls] : events) {
        evolve(t - t_now);
        t_now = t;
        const long mask = pulse_mask(cls);
        if (mask != 0) {
            Eigen::VectorXcd flipped(dim);
            for (long b = 0; b < dim; ++b) flipped(b ^ mask) = state(b);
            state.swap(flipped);
        }
    }
    evolve(schedule.total_time_us - t_now);

    // single-site Z corrections from cross-site couplings: phase
    // exp(-i 2pi h_s S_s z_s(0)) with S_s the sign-profile integral
    std::vector<double> s_class(schedule.classes, 0.0);
    for (int c = 0; c < schedule.classes; ++c) {
        double s = 0.0, t0 = 0.0;
        int sign = 1;
        for (double tp : schedule.pulse_times[c]) {
            s += sign * (tp - t0);
            t0 = tp;
            sign = -sign;
        }
        s += sign * (schedule.total_time_us - t0);
        s_class[c] = s;
    }
    std::vector<double> phase_mol(n_sites, 0.0), phase_atom(n_sites, 0.0);
    for (int i = 0; i < n_sites; ++i) {
        double h_mol = 0.0;
        for (int j = 0; j < n_sites; ++j)
            if (j != i) h_mol += 0.5 * table.v_am(i, j); // z_m coefficient
        double h_atom = 0.0; // za coefficients come with -1/2 from pa = (1-za)/2
        for (int j = 0; j < n_sites; ++j)
            if (j != i) h_atom += -0.25 * table.v_aa(i, j);
        phase_mol[i] = two_pi * h_mol * s_class[site_class[i]];
        phase_atom[i] = two_pi * h_atom * s_class[site_class[i]];
    }
    // intra-site single-Z parts belong to the isolated-pair ideal: the
    // am term contributes z_m * v_am(i,i)/2 and -z_a-free parts only
    for (long b = 0; b < dim; ++b) {
        double corr = 0.0;
        for (int i = 0; i < n_sites; ++i) {
            corr += phase_mol[i] * zmol(b, i);
            corr += phase_atom[i] * (1.0 - 2.0 * pa(b, i)); // za = 1 - 2 pa
        }
        state(b) *= std::exp(I * corr);
    }

    ArraySimResult out;
    out.norm_error = std::abs(state.squaredNorm() - 1.0);

    // isolated-pair ideals via a 1-site recursive call; fidelity from the
    // reduced density matrix
    out.pair_fidelity.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        InteractionTable single;
        single.v_am = Eigen::MatrixXd::Constant(1, 1, table.v_am(i, i));
        single.v_aa = Eigen::MatrixXd::Zero(1, 1);
        single.v_mm = Eigen::MatrixXd::Zero(1, 1);
        ArraySimResult ideal =
            simulate_array(single, schedule, {site_class[i]}, {amp_plus[i]},
                           {amp_minus[i]});
        // reduced density matrix of site i from the full state
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        const int shift = 2 * i;
        for (long b = 0; b < dim; ++b) {
            const int bi = static_cast<int>((b >> shift) & 3);
            for (int bj = 0; bj < 4; ++bj) {
                const long b2 = (b & ~(3L << shift)) | (static_cast<long>(bj) << shift);
                rho(bi, bj) += state(b) * std::conj(state(b2));
            }
        }
        out.pair_fidelity[i] =
            (ideal.state.adjoint() * rho * ideal.state)(0, 0).real();
    }
    return out;
}

AlternatingPlan alternating_measurement_plan(const ArrayLayout& layout,
                                             const DispersionSet& disp, int k) {
    if (k < 1) throw std::domain_error("alternating_measurement_plan: k >= 1");
    const int n = static_cast<int>(layout.sites.size());
    AlternatingPlan plan;
    for (int r = 0; r < k; ++r) {
        AlternatingPlan::Round round;
        for (int i = r; i < n; i += k) round.sites.push_back(i);
        double rmin = 0.0;
        for (size_t a = 0; a < round.sites.size(); ++a)
            for (size_t b = a + 1; b < round.sites.size(); ++b) {
                const double d = layout.r_aa(round.sites[a], round.sites[b]);
                if (rmin == 0.0 || d < rmin) rmin = d;
            }
        round.min_r_aa_um = rmin;
        if (rmin > 0.0)
            round.v_aa_mhz = std::abs(disp.c6 / std::pow(rmin, 6.0) +
                                      disp.c9 / std::pow(rmin, 9.0) +
                                      disp.c12 / std::pow(rmin, 12.0));
        plan.rounds.push_back(std::move(round));
    }
    return plan;
}

} // namespace rydmol
