#include "rydmol/dressing.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rydmol/units.hpp"

namespace rydmol {

std::string check_drive_config(const DriveConfig& config) {
    const double d_fixed = (config.mol_pol == Polarization::sigma)
                               ? config.w_mol - config.w_sigma_atom
                               : config.w_mol - config.w_pi_atom;
    const double d_actual = (config.mol_pol == Polarization::sigma)
                                ? config.delta_sigma
                                : config.delta_pi;
    if (config.w_mol > 0.0 && std::abs(d_actual - d_fixed) > 1e-6 * std::abs(config.w_mol))
        throw std::domain_error("DriveConfig: molecule-resonance constraint violated");

    std::ostringstream warn;
    auto rwa = [&](double omega, double w, const char* name) {
        if (w <= 0.0) return;
        const double frac = std::abs(omega) / w;
        if (frac > 0.15)
            throw std::domain_error(std::string("DriveConfig: ") + name +
                                    " exceeds 15% of its transition frequency");
        if (frac > 0.10)
            warn << name << " at " << frac * 100 << "% of its transition frequency; ";
    };
    rwa(config.omega_pi, config.w_pi_atom, "omega_pi");
    rwa(config.omega_sigma, config.w_sigma_atom, "omega_sigma");
    return warn.str();
}

Eigen::Matrix3d three_level_hamiltonian(const DriveConfig& config) {
    Eigen::Matrix3d h;
    h << 0.0, config.omega_pi, config.omega_sigma,
         config.omega_pi, -config.delta_pi, 0.0,
         config.omega_sigma, 0.0, -config.delta_sigma;
    return h;
}

std::array<DressedAtomState, 3> dressed_state(const DriveConfig& config) {
    const Eigen::Matrix3d h = three_level_hamiltonian(config);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();

    bool degenerate = false;
    for (int i = 0; i < 2; ++i)
        if (std::abs(vals(i + 1) - vals(i)) < 1e-9) degenerate = true;

    std::array<DressedAtomState, 3> out;
    std::array<bool, 3> used{false, false, false};
    for (int slot = 0; slot < 3; ++slot) {
        // label eigenvectors by dominant bare component; on degeneracy fall
        // back to assigning remaining columns by largest overlap
        int pick = -1;
        double best = -1.0;
        for (int c = 0; c < 3; ++c) {
            if (used[c]) continue;
            double ov = std::abs(vecs(slot, c));
            if (ov > best) {
                best = ov;
                pick = c;
            }
        }
        used[pick] = true;
        DressedAtomState s;
        Eigen::Vector3d v = vecs.col(pick);
        if (std::abs(v(slot)) > 1e-14) v /= v(slot);
        s.a_pi = v(1);
        s.a_sigma = v(2);
        s.energy = vals(pick);
        s.dominant = slot;
        s.degenerate = degenerate;
        out[slot] = s;
    }
    return out;
}

double dipolar_residual(const DressedAtomState& state, double mu_pi, double mu_sigma) {
    const double n2 = state.norm2();
    return (state.a_pi * state.a_pi * mu_pi * mu_pi -
            0.5 * state.a_sigma * state.a_sigma * mu_sigma * mu_sigma) /
           n2;
}

double alpha_from_beta(double beta) {
    return 0.5 * (std::sqrt(beta * beta + 4.0) - beta);
}

ThreeLevelSolution solve_three_level(double alpha, int sign_branch,
                                     double omega_given, double m_ratio,
                                     double delta_fixed, Polarization pol) {
    if (alpha == 0.0)
        throw std::domain_error("solve_three_level: alpha = 0 is the bare |r> state");
    if (m_ratio <= 0.0)
        throw std::domain_error("solve_three_level: M must be positive");
    if (sign_branch != 1 && sign_branch != -1)
        throw std::domain_error("solve_three_level: sign branch must be +/-1");

    const double a_pi = alpha / std::sqrt(1.0 + 2.0 * m_ratio * m_ratio);
    const double a_sigma = sign_branch * std::sqrt(2.0) * m_ratio * a_pi;
    if (a_pi == 0.0 || a_sigma == 0.0)
        throw std::domain_error("solve_three_level: degenerate coefficients");

    DriveConfig config;
    double energy = 0.0;
    if (pol == Polarization::sigma) {
        config.omega_sigma = omega_given;
        config.delta_sigma = delta_fixed;
        energy = omega_given / a_sigma - delta_fixed;
        config.omega_pi = (energy - omega_given * a_sigma) / a_pi;
        config.delta_pi = config.omega_pi / a_pi - energy;
    } else {
        config.omega_pi = omega_given;
        config.delta_pi = delta_fixed;
        energy = omega_given / a_pi - delta_fixed;
        config.omega_sigma = (energy - omega_given * a_pi) / a_sigma;
        config.delta_sigma = config.omega_sigma / a_sigma - energy;
    }
    config.mol_pol = pol;

    ThreeLevelSolution sol;
    sol.config = config;
    sol.state.a_pi = a_pi;
    sol.state.a_sigma = a_sigma;
    sol.state.energy = energy;
    sol.state.alpha = alpha;
    sol.state.beta = 1.0 / alpha - alpha;
    sol.state.dominant = 0;
    return sol;
}

double molecule_atom_c3(const DressedAtomState& state, double mu_m, double mu_pi,
                        double m_ratio, Polarization pol) {
    const double c_factor = (pol == Polarization::pi) ? 1.0 : std::sqrt(0.5);
    const double a_pi = state.a_pi;
    const double denom = 1.0 + a_pi * a_pi * (1.0 + 2.0 * m_ratio * m_ratio);
    return c_factor * mu_m * mu_pi * a_pi / denom * units::dd_mhz_um3;
}

double molecule_atom_c3_max(double mu_m, double mu_pi, double m_ratio,
                            Polarization pol) {
    const double c_factor = (pol == Polarization::pi) ? 1.0 : std::sqrt(0.5);
    return c_factor * mu_m * mu_pi /
           (2.0 * std::sqrt(1.0 + 2.0 * m_ratio * m_ratio)) * units::dd_mhz_um3;
}

Eigen::Matrix<double, 6, 6> six_level_hamiltonian(const DriveConfig& config,
                                                  const FineStructureRatios& ratios) {
    // basis order: (r, r', r_pi, r_sigma, r_pi', r_sigma')
    const double f_pi = ratios.f_pi.value_or(0.0);
    const double f_si = ratios.f_sigma.value_or(0.0);
    const double g_pi = ratios.g_pi.value_or(0.0);
    const double g_si = ratios.g_sigma.value_or(0.0);
    const double g_pi_p = ratios.g_pi_p.value_or(0.0);
    const double g_si_p = ratios.g_sigma_p.value_or(0.0);
    const double d_rp = ratios.delta_r_p.value_or(0.0);
    const double d_pip = ratios.delta_pi_p.value_or(0.0);
    const double d_sip = ratios.delta_sigma_p.value_or(0.0);

    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    h(0, 0) = 0.0;
    h(1, 1) = d_rp;
    h(2, 2) = -config.delta_pi;
    h(3, 3) = -config.delta_sigma;
    h(4, 4) = -config.delta_pi + d_pip;
    h(5, 5) = -config.delta_sigma + d_sip;

    auto set = [&](int i, int j, double v) { h(i, j) = v; h(j, i) = v; };
    set(0, 2, config.omega_pi);
    set(0, 3, config.omega_sigma);
    set(0, 4, f_pi * config.omega_pi);
    set(0, 5, f_si * config.omega_sigma);
    set(1, 2, g_pi * config.omega_pi);
    set(1, 3, g_si * config.omega_sigma);
    set(1, 4, g_pi_p * config.omega_pi);
    set(1, 5, g_si_p * config.omega_sigma);
    return h;
}

double six_level_dipolar_residual(const Eigen::Matrix<double, 6, 1>& c,
                                  const FineStructureRatios& ratios, double mu_pi,
                                  double mu_sigma) {
    const double f_pi = ratios.f_pi.value_or(0.0);
    const double f_si = ratios.f_sigma.value_or(0.0);
    const double g_pi = ratios.g_pi.value_or(0.0);
    const double g_si = ratios.g_sigma.value_or(0.0);
    const double g_pi_p = ratios.g_pi_p.value_or(0.0);
    const double g_si_p = ratios.g_sigma_p.value_or(0.0);
    // coefficient order (r, r', r_pi, r_sigma, r_pi', r_sigma')
    const double a = c(1), a_pi = c(2), a_si = c(3), a_pi_p = c(4), a_si_p = c(5);
    const double q_pi = a_pi + f_pi * a_pi_p + a * (g_pi * a_pi + g_pi_p * a_pi_p);
    const double q_si = a_si + f_si * a_si_p + a * (g_si * a_si + g_si_p * a_si_p);
    const double n2 = c.squaredNorm();
    return (q_pi * q_pi * mu_pi * mu_pi - 0.5 * q_si * q_si * mu_sigma * mu_sigma) /
           (n2 * n2);
}

namespace {

struct SixLevelResidual {
    const DriveConfig* base;
    const FineStructureRatios* ratios;
    double mu_pi, mu_sigma;
    double lambda;
    Polarization pol;
    double scale; // residual normalization

    // unknowns y = (a, a_pi, a_sigma, a_pi', a_sigma', E, delta_free)
    Eigen::Matrix<double, 7, 1> operator()(const Eigen::Matrix<double, 7, 1>& y) const {
        DriveConfig cfg = *base;
        cfg.omega_pi = lambda * base->omega_pi;
        cfg.omega_sigma = lambda * base->omega_sigma;
        if (pol == Polarization::sigma) {
            cfg.delta_sigma = lambda * base->delta_sigma;
            cfg.delta_pi = y(6);
        } else {
            cfg.delta_pi = lambda * base->delta_pi;
            cfg.delta_sigma = y(6);
        }
        Eigen::Matrix<double, 6, 1> v;
        v << 1.0, y(0), y(1), y(2), y(3), y(4);
        const auto h = six_level_hamiltonian(cfg, *ratios);
        Eigen::Matrix<double, 6, 1> r = h * v - y(5) * v;

        const double q = six_level_dipolar_residual(v, *ratios, mu_pi, mu_sigma);
        Eigen::Matrix<double, 7, 1> f;
        f.head<6>() = r / scale;
        f(6) = q * v.squaredNorm() * v.squaredNorm() / (mu_pi * mu_pi); // dimensionless
        return f;
    }
};

} // namespace

SixLevelConfig solve_six_level(const ThreeLevelSolution& target,
                               const FineStructureRatios& ratios, double mu_pi,
                               double mu_sigma, int ramp_steps) {
    if (ramp_steps < 1) throw std::domain_error("solve_six_level: ramp_steps >= 1");
    const Polarization pol = target.config.mol_pol;

    const double scale = std::max({std::abs(target.config.omega_pi),
                                   std::abs(target.config.omega_sigma),
                                   std::abs(target.config.delta_pi),
                                   std::abs(target.config.delta_sigma), 1.0});

    const double d3 = (pol == Polarization::sigma) ? target.config.delta_pi
                                                   : target.config.delta_sigma;

    auto newton = [&](Eigen::Matrix<double, 7, 1>& y, double lambda) {
        SixLevelResidual res{&target.config, &ratios, mu_pi, mu_sigma, lambda, pol,
                             scale};
        Eigen::Matrix<double, 7, 1> f = res(y);
        for (int it = 0; it < 100; ++it) {
            if (f.norm() < 1e-12) return true;
            Eigen::Matrix<double, 7, 7> jac;
            for (int k = 0; k < 7; ++k) {
                const double h = std::max(1e-9, 1e-7 * std::abs(y(k)));
                Eigen::Matrix<double, 7, 1> yp = y;
                yp(k) += h;
                jac.col(k) = (res(yp) - f) / h;
            }
            const Eigen::Matrix<double, 7, 1> dy = jac.fullPivLu().solve(-f);
            double t = 1.0;
            const double f0 = f.norm();
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls) {
                Eigen::Matrix<double, 7, 1> yt = y + t * dy;
                Eigen::Matrix<double, 7, 1> ft = res(yt);
                if (ft.norm() < f0) {
                    y = yt;
                    f = ft;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) return f.norm() < 1e-12;
        }
        return res(y).norm() < 1e-12;
    };

    // adaptive continuation in the overall drive strength, with linear
    // prediction from the two previous converged solutions
    const double dl0 = 1.0 / ramp_steps;
    double lambda = 0.0, dl = dl0;
    Eigen::Matrix<double, 7, 1> y, y_prev;
    double l_prev = 0.0;
    y << 0.0, target.state.a_pi, target.state.a_sigma, 0.0, 0.0, dl0 * target.state.energy,
        dl0 * d3;
    y_prev = y;
    bool have_prev = false;

    while (lambda < 1.0 - 1e-12) {
        const double l_next = std::min(1.0, lambda + dl);
        Eigen::Matrix<double, 7, 1> y_try = y;
        if (have_prev && l_next > lambda && lambda > l_prev) {
            y_try = y + (y - y_prev) * ((l_next - lambda) / (lambda - l_prev));
        } else {
            // eigenvector coefficients are scale-invariant in the weak-drive
            // limit; only the energy and the free detuning scale
            y_try(5) = y(5) * (l_next / dl0);
            y_try(6) = y(6) * (l_next / dl0);
        }

        if (newton(y_try, l_next)) {
            y_prev = y;
            l_prev = lambda;
            y = y_try;
            lambda = l_next;
            have_prev = true;
            dl = std::min(dl * 1.6, dl0 * 4.0);
        } else {
            dl *= 0.5;
            if (dl < 1e-5) {
                std::ostringstream os;
                os << "solve_six_level: no convergence at ramp fraction " << l_next
                   << " (last converged " << lambda << ")";
                throw std::runtime_error(os.str());
            }
        }
    }

    SixLevelConfig out;
    out.config = target.config;
    if (pol == Polarization::sigma)
        out.config.delta_pi = y(6);
    else
        out.config.delta_sigma = y(6);
    out.ratios = ratios;
    out.coeffs << 1.0, y(0), y(1), y(2), y(3), y(4);
    out.energy = y(5);
    const auto h = six_level_hamiltonian(out.config, ratios);
    out.eigen_residual =
        (h * out.coeffs - out.energy * out.coeffs).norm() / out.coeffs.norm() / scale;
    {
        // relative nullification: |Q_pi^2 mu_pi^2 - Q_sigma^2 mu_sigma^2/2|
        // over the sum of the two magnitudes
        const double f_pi = ratios.f_pi.value_or(0.0);
        const double f_si = ratios.f_sigma.value_or(0.0);
        const double g_pi = ratios.g_pi.value_or(0.0);
        const double g_si = ratios.g_sigma.value_or(0.0);
        const double g_pi_p = ratios.g_pi_p.value_or(0.0);
        const double g_si_p = ratios.g_sigma_p.value_or(0.0);
        const auto& c = out.coeffs;
        const double a = c(1), a_pi = c(2), a_si = c(3), a_pi_p = c(4), a_si_p = c(5);
        const double q_pi = a_pi + f_pi * a_pi_p + a * (g_pi * a_pi + g_pi_p * a_pi_p);
        const double q_si = a_si + f_si * a_si_p + a * (g_si * a_si + g_si_p * a_si_p);
        const double pos = q_pi * q_pi * mu_pi * mu_pi;
        const double neg = 0.5 * q_si * q_si * mu_sigma * mu_sigma;
        out.nullification_residual = std::abs(pos - neg) / std::max(pos + neg, 1e-300);
    }
    return out;
}

} // namespace rydmol
