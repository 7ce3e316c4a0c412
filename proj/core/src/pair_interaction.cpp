#include "rydmol/pair_interaction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rydmol {

PerturbativeResult perturbative_c6(const SingleAtomSystem& system,
                                   const PairBasis& basis,
                                   const PairGeometry& geometry,
                                   double pair_cutoff_mhz, double guard_fraction) {
    const Eigen::VectorXcd col = dipole_dipole_column(system, basis, geometry);
    const double guard = guard_fraction * pair_cutoff_mhz;
    const double scale = col.cwiseAbs().maxCoeff();

    PerturbativeResult out;
    out.n_pair_states = static_cast<int>(basis.states.size());
    for (int k = 0; k < col.size(); ++k) {
        if (k == basis.aa_index) {
            out.first_order = col(k).real();
            continue;
        }
        const double c2 = std::norm(col(k));
        if (c2 == 0.0) continue;
        const double gap = basis.eps_aa - basis.states[k].eps;
        if (std::abs(gap) < guard && std::sqrt(c2) > 1e-6 * scale) {
            std::ostringstream os;
            os << "perturbative_c6: near-degenerate intermediate pair state ("
               << system.level_name(basis.states[k].i) << ") x ("
               << system.level_name(basis.states[k].j) << "), gap = " << gap
               << " MHz";
            throw std::runtime_error(os.str());
        }
        out.c6 += c2 / gap;
        out.p6 += c2 / (gap * gap);
    }
    return out;
}

std::vector<ExactScanPoint> exact_scan_points(const SingleAtomSystem& system,
                                              const PairBasis& basis,
                                              const Eigen::MatrixXcd& w,
                                              const std::vector<double>& r_grid_desc) {
    (void)system;
    const int np = static_cast<int>(basis.states.size());
    for (size_t k = 1; k < r_grid_desc.size(); ++k)
        if (r_grid_desc[k] >= r_grid_desc[k - 1])
            throw std::invalid_argument("exact_scan: r grid must descend");

    const Eigen::VectorXd h0 = pair_h0_diagonal(basis);
    const bool real_case = w.imag().cwiseAbs().maxCoeff() < 1e-14;

    Eigen::VectorXd prev = Eigen::VectorXd::Zero(np); // real tracking vector
    Eigen::VectorXcd prev_c = Eigen::VectorXcd::Zero(np);
    prev(basis.aa_index) = 1.0;
    prev_c(basis.aa_index) = 1.0;

    std::vector<ExactScanPoint> out;
    out.reserve(r_grid_desc.size());
    bool flagged = false;

    for (double r : r_grid_desc) {
        const double inv_r3 = 1.0 / (r * r * r);
        ExactScanPoint pt;
        pt.r_um = r;

        if (real_case) {
            Eigen::MatrixXd h = w.real() * inv_r3;
            h.diagonal() += h0;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            // track by overlap with the previous step's vector
            int best = 0;
            double best_ov = -1.0;
            Eigen::VectorXd proj = es.eigenvectors().transpose() * prev;
            for (int k = 0; k < np; ++k) {
                const double ov = proj(k) * proj(k);
                if (ov > best_ov) {
                    best_ov = ov;
                    best = k;
                }
            }
            if (best_ov < 0.5) flagged = true;
            prev = es.eigenvectors().col(best);
            pt.v_mhz = es.eigenvalues()(best) - basis.eps_aa;
            const double amp = prev(basis.aa_index);
            pt.overlap = amp * amp;
        } else {
            Eigen::MatrixXcd h = w * inv_r3;
            h.diagonal() += h0.cast<std::complex<double>>();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            int best = 0;
            double best_ov = -1.0;
            Eigen::VectorXcd proj = es.eigenvectors().adjoint() * prev_c;
            for (int k = 0; k < np; ++k) {
                const double ov = std::norm(proj(k));
                if (ov > best_ov) {
                    best_ov = ov;
                    best = k;
                }
            }
            if (best_ov < 0.5) flagged = true;
            prev_c = es.eigenvectors().col(best);
            pt.v_mhz = es.eigenvalues()(best) - basis.eps_aa;
            pt.overlap = std::norm(prev_c(basis.aa_index));
        }
        pt.diabatic = flagged;
        out.push_back(pt);
    }
    return out;
}

DispersionFit fit_dispersion(const std::vector<ExactScanPoint>& points,
                             double c6_fixed, double p6_fixed,
                             const FitOptions& opts) {
    std::vector<const ExactScanPoint*> window;
    for (const auto& p : points) {
        const double deficit = 1.0 - p.overlap;
        if (deficit < opts.max_deficit && std::abs(p.v_mhz) > opts.min_v_mhz &&
            !p.diabatic)
            window.push_back(&p);
    }
    if (window.size() < 6)
        throw std::runtime_error("fit_dispersion: fewer than 6 points in the perturbative window");

    const int m = static_cast<int>(window.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd b(m);
    for (int k = 0; k < m; ++k) {
        const double r = window[k]->r_um;
        a(k, 0) = std::pow(r, -9.0);
        a(k, 1) = std::pow(r, -12.0);
        b(k) = window[k]->v_mhz - c6_fixed * std::pow(r, -6.0);
    }
    // column scaling for conditioning
    const double s0 = a.col(0).norm(), s1 = a.col(1).norm();
    if (s0 == 0.0 || s1 == 0.0)
        throw std::runtime_error("fit_dispersion: degenerate design matrix");
    Eigen::MatrixXd as = a;
    as.col(0) /= s0;
    as.col(1) /= s1;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(1) < 1e-12 * svd.singularValues()(0))
        throw std::runtime_error("fit_dispersion: ill-conditioned design matrix");
    Eigen::Vector2d x = svd.solve(b);
    x(0) /= s0;
    x(1) /= s1;

    DispersionFit fit;
    fit.c9 = x(0);
    fit.c12 = x(1);
    fit.n_points = m;

    // overlap deficit on {r^-12} with P6 fixed
    double num = 0.0, den = 0.0;
    for (int k = 0; k < m; ++k) {
        const double r = window[k]->r_um;
        const double deficit = 1.0 - window[k]->overlap;
        const double y = deficit - p6_fixed * std::pow(r, -6.0);
        const double xr = std::pow(r, -12.0);
        num += xr * y;
        den += xr * xr;
    }
    fit.p12 = (den > 0.0) ? num / den : 0.0;

    // log-log slope diagnostics on the cross-subtracted residuals
    auto slope = [&](auto value) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = 0; k < m; ++k) {
            const double v = value(*window[k]);
            if (std::abs(v) < 1e-12) continue;
            const double lx = std::log(window[k]->r_um);
            const double ly = std::log(std::abs(v));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        if (n < 3) return 0.0;
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    fit.exponent9 = slope([&](const ExactScanPoint& p) {
        return p.v_mhz - c6_fixed * std::pow(p.r_um, -6.0) -
               fit.c12 * std::pow(p.r_um, -12.0);
    });
    fit.exponent12 = slope([&](const ExactScanPoint& p) {
        return p.v_mhz - c6_fixed * std::pow(p.r_um, -6.0) -
               fit.c9 * std::pow(p.r_um, -9.0);
    });

    double resid2 = 0.0, norm2 = 0.0;
    for (int k = 0; k < m; ++k) {
        const double r = window[k]->r_um;
        const double model = c6_fixed * std::pow(r, -6.0) + fit.c9 * std::pow(r, -9.0) +
                             fit.c12 * std::pow(r, -12.0);
        resid2 += (window[k]->v_mhz - model) * (window[k]->v_mhz - model);
        norm2 += window[k]->v_mhz * window[k]->v_mhz;
    }
    fit.v_residual_rel = (norm2 > 0.0) ? std::sqrt(resid2 / norm2) : 0.0;
    return fit;
}

SingleAtomSystem CoefficientEvaluator::system(const DriveConfig& config) const {
    return SingleAtomSystem::build(*defects, triple, config, trunc, phases, ref);
}

double CoefficientEvaluator::c3(const DriveConfig& config) const {
    const SingleAtomSystem sys = system(config);
    const int a = sys.dressed_index();
    const int p_sigma = triple.sigma_p();
    std::complex<double> moment;
    double c_factor;
    if (pol == Polarization::sigma) {
        moment = sys.dressed_moment(a, {0, 1}, p_sigma);
        c_factor = -0.5;
    } else {
        moment = sys.dressed_moment(a, {1, 0}, 0);
        c_factor = 1.0;
    }
    return c_factor * mu_m_au * moment.real() * units::dd_mhz_um3;
}

PerturbativeResult CoefficientEvaluator::c6(const DriveConfig& config) const {
    const SingleAtomSystem sys = system(config);
    const PairBasis basis = build_pair_basis(sys, trunc);
    return perturbative_c6(sys, basis, geometry, trunc.pair_cutoff_mhz);
}

JacobianResult sensitivity_jacobian(const CoefficientEvaluator& eval,
                                    const DriveConfig& config, CoefficientKind kind,
                                    double rel_step) {
    auto value = [&](const DriveConfig& cfg) {
        return (kind == CoefficientKind::c3) ? eval.c3(cfg) : eval.c6(cfg).c6;
    };
    auto perturb = [&](int comp, double factor) {
        DriveConfig cfg = config;
        double* fields[4] = {&cfg.omega_pi, &cfg.omega_sigma, &cfg.delta_pi,
                             &cfg.delta_sigma};
        *fields[comp] *= (1.0 + factor);
        return cfg;
    };

    JacobianResult out;
    out.value = value(config);
    for (int comp = 0; comp < 4; ++comp) {
        const double vplus = value(perturb(comp, rel_step));
        const double vminus = value(perturb(comp, -rel_step));
        out.j(comp) = (vplus - vminus) / (2.0 * rel_step); // = v_i * dC/dv_i
        const double h2 = 0.5 * rel_step;
        const double vp2 = value(perturb(comp, h2));
        const double vm2 = value(perturb(comp, -h2));
        out.j_half(comp) = (vp2 - vm2) / (2.0 * h2);
        const double scale = std::max({std::abs(out.j(comp)), std::abs(out.j_half(comp)),
                                       1e-12 * std::abs(out.value)});
        if (scale > 0.0 && std::abs(out.j(comp) - out.j_half(comp)) > 0.1 * scale)
            throw std::runtime_error(
                "sensitivity_jacobian: finite difference failed the step-halving check");
    }
    return out;
}

double excess_interaction(double j6_mhz_um6, double fractional_error, double r_um) {
    if (r_um <= 0.0) throw std::domain_error("excess_interaction: r must be positive");
    return std::abs(j6_mhz_um6) * fractional_error / std::pow(r_um, 6.0);
}

} // namespace rydmol
