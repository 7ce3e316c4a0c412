#include "rydmol/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rydmol {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RydbergLevel parse_level(const std::string& text) {
    std::istringstream is(text);
    int n;
    std::string ltok, jtok, mtok;
    if (!(is >> n >> ltok >> jtok >> mtok))
        throw std::runtime_error("bad level spec: " + text);
    auto frac = [](const std::string& t) {
        auto s = t.find('/');
        if (s == std::string::npos) return 2 * std::stoi(t);
        return std::stoi(t.substr(0, s));
    };
    int l = -1;
    const std::string letters = "SPDFGHIK";
    if (ltok.size() == 1) {
        auto pos = letters.find(ltok[0]);
        if (pos != std::string::npos) l = static_cast<int>(pos);
    }
    if (l < 0) l = std::stoi(ltok);
    RydbergLevel lev{n, l, frac(jtok), frac(mtok)};
    validate(lev);
    return lev;
}

RotorState parse_rotor(const std::string& text) {
    std::istringstream is(text);
    RotorState s;
    if (!(is >> s.n >> s.mn)) throw std::runtime_error("bad rotor spec: " + text);
    validate(s);
    return s;
}

} // namespace

SolveReport solve_scheme(const Scheme& scheme, double beta) {
    const double alpha = alpha_from_beta(beta);
    const double w_mol = scheme.encoding.omega_m_mhz;

    double omega_given, delta_fixed;
    if (scheme.encoding.pol == Polarization::sigma) {
        omega_given = -scheme.omega_sigma_rule * w_mol;
        delta_fixed = w_mol - scheme.w_sigma_atom;
    } else {
        omega_given = -scheme.omega_sigma_rule * w_mol;
        delta_fixed = w_mol - scheme.w_pi_atom;
    }

    SolveReport report;
    report.three_level = solve_three_level(alpha, scheme.branch_sign, omega_given,
                                           scheme.m_ratio, delta_fixed,
                                           scheme.encoding.pol);
    auto& cfg = report.three_level.config;
    cfg.w_mol = w_mol;
    cfg.w_pi_atom = scheme.w_pi_atom;
    cfg.w_sigma_atom = scheme.w_sigma_atom;
    cfg.omega_mol = molecular_rabi(scheme, cfg);
    report.rwa_warning = check_drive_config(cfg);

    report.dipolar_residual3 =
        dipolar_residual(report.three_level.state, scheme.mu_pi, scheme.mu_sigma);
    report.c3_mhz_um3 =
        molecule_atom_c3(report.three_level.state, scheme.mu_m_au,
                         std::abs(scheme.mu_pi), scheme.m_ratio, scheme.encoding.pol);

    report.six_level = solve_six_level(report.three_level, scheme.ratios,
                                       scheme.mu_pi, scheme.mu_sigma);
    report.six_level.config.omega_mol = cfg.omega_mol;
    return report;
}

double molecular_rabi(const Scheme& scheme, const DriveConfig& config) {
    const double omega_tone = (scheme.encoding.pol == Polarization::sigma)
                                  ? config.omega_sigma
                                  : config.omega_pi;
    const double mu_tone = (scheme.encoding.pol == Polarization::sigma)
                               ? scheme.mu_sigma
                               : scheme.mu_pi;
    return omega_tone * scheme.mu_m_au / std::abs(mu_tone);
}

DressedReference six_level_reference(const RydbergTriple& triple,
                                     const SixLevelConfig& six) {
    DressedReference ref;
    ref.components.push_back({triple.r, six.coeffs(0)});
    if (six.ratios.r_p) ref.components.push_back({*six.ratios.r_p, six.coeffs(1)});
    ref.components.push_back({triple.r_pi, six.coeffs(2)});
    ref.components.push_back({triple.r_sigma, six.coeffs(3)});
    if (six.ratios.r_pi_p)
        ref.components.push_back({*six.ratios.r_pi_p, six.coeffs(4)});
    if (six.ratios.r_sigma_p)
        ref.components.push_back({*six.ratios.r_sigma_p, six.coeffs(5)});
    return ref;
}

CoefficientEvaluator make_evaluator(const Scheme& scheme) {
    CoefficientEvaluator ev;
    ev.defects = &scheme.defects;
    ev.triple = scheme.triple;
    ev.trunc = scheme.trunc;
    ev.geometry = PairGeometry{1.0, 0.5 * units::pi, 0.0};
    ev.pol = scheme.encoding.pol;
    ev.mu_m_au = scheme.mu_m_au;
    return ev;
}

BetaScanResult beta_scan(const Scheme& scheme, double beta_min, double beta_max,
                         int n_points) {
    if (n_points < 2) throw std::domain_error("beta_scan: need at least 2 points");
    CoefficientEvaluator ev = make_evaluator(scheme);

    auto eval_at = [&](double beta) {
        const SolveReport rep = solve_scheme(scheme, beta);
        CoefficientEvaluator ev_here = ev;
        ev_here.ref = six_level_reference(scheme.triple, rep.six_level);
        const PerturbativeResult pert = ev_here.c6(rep.six_level.config);
        BetaScanPoint pt;
        pt.beta = beta;
        pt.c6 = pert.c6;
        pt.p6 = pert.p6;
        pt.r_crit = (pert.p6 > 0.0) ? std::pow(pert.p6 / 0.05, 1.0 / 6.0) : 0.0;
        pt.c3 = ev_here.c3(rep.six_level.config);
        return pt;
    };

    // betas whose dressing solution violates the RWA bound (or fails to
    // converge) lie outside the design space and are dropped from the curve
    std::vector<char> valid(n_points, 0);
    std::vector<BetaScanPoint> pts(n_points);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_points; ++k) {
        const double beta = beta_min + (beta_max - beta_min) * k / (n_points - 1);
        try {
            pts[k] = eval_at(beta);
            valid[k] = 1;
        } catch (const std::exception&) {
            pts[k].beta = beta;
        }
    }
    BetaScanResult out;
    for (int k = 0; k < n_points; ++k)
        if (valid[k]) out.points.push_back(pts[k]);
    for (const auto& p : out.points)
        out.max_abs_c6 = std::max(out.max_abs_c6, std::abs(p.c6));

    // bisect every sign change until |C6| < 1e-6 * max|C6|; sign changes
    // caused by Floquet resonance poles diverge instead of converging and
    // are dropped
    const double tol = 1e-6 * out.max_abs_c6;
    const int n_valid = static_cast<int>(out.points.size());
    for (int k = 0; k + 1 < n_valid; ++k) {
        double lo = out.points[k].beta, hi = out.points[k + 1].beta;
        double flo = out.points[k].c6, fhi = out.points[k + 1].c6;
        if (flo == 0.0) {
            out.crossings.push_back(lo);
            continue;
        }
        if (flo * fhi >= 0.0) continue;
        double mid = 0.5 * (lo + hi), fmid = 0.0;
        bool converged = false;
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            mid = 0.5 * (lo + hi);
            bool ok = false;
            for (double nudge : {0.0, 0.03, -0.03, 0.11, -0.11}) {
                const double m = mid + nudge * (hi - lo) * 0.5;
                try {
                    fmid = eval_at(m).c6;
                    mid = m;
                    ok = true;
                    break;
                } catch (const std::exception&) {
                }
            }
            if (!ok) break; // resonant region, give up on this interval
            if (std::abs(fmid) < tol) {
                converged = true;
                break;
            }
            if (flo * fmid < 0.0) {
                hi = mid;
                fhi = fmid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        if (converged) out.crossings.push_back(mid);
    }
    return out;
}

RadialScanResult radial_scan(const Scheme& scheme, const SolveReport& solved) {
    const DriveConfig& config = solved.six_level.config;
    const DressedReference ref = six_level_reference(scheme.triple, solved.six_level);
    SingleAtomSystem sys = SingleAtomSystem::build(scheme.defects, scheme.triple,
                                                   config, scheme.exact_trunc, {}, ref);
    PairBasis basis = build_pair_basis(sys, scheme.exact_trunc);
    const PairGeometry geom{1.0, 0.5 * units::pi, 0.0};
    Eigen::MatrixXcd w = dipole_dipole_operator(sys, basis, geom);

    std::vector<double> grid(scheme.r_points);
    const double lmin = std::log(scheme.r_min_um), lmax = std::log(scheme.r_max_um);
    for (int k = 0; k < scheme.r_points; ++k)
        grid[k] = std::exp(lmax + (lmin - lmax) * k / (scheme.r_points - 1));

    RadialScanResult out;
    out.points = exact_scan_points(sys, basis, w, grid);
    const PerturbativeResult pert = perturbative_c6(
        sys, basis, geom, scheme.exact_trunc.pair_cutoff_mhz);
    out.c6_pert = pert.c6;
    out.p6_pert = pert.p6;
    out.fit = fit_dispersion(out.points, pert.c6, pert.p6);
    return out;
}

RobustnessReport phase_robustness(const Scheme& scheme, const SolveReport& solved,
                                  const std::vector<DrivePhases>& phase_settings,
                                  const std::vector<double>& phi_settings) {
    const DriveConfig& config = solved.six_level.config;
    const DressedReference ref = six_level_reference(scheme.triple, solved.six_level);
    RobustnessReport rep;
    std::vector<double> c6s, c9s, c12s;
    for (const auto& ph : phase_settings)
        for (double phi : phi_settings) {
            SingleAtomSystem sys = SingleAtomSystem::build(
                scheme.defects, scheme.triple, config, scheme.exact_trunc, ph, ref);
            PairBasis basis = build_pair_basis(sys, scheme.exact_trunc);
            const PairGeometry geom{1.0, 0.5 * units::pi, phi};
            const PerturbativeResult pert = perturbative_c6(
                sys, basis, geom, scheme.exact_trunc.pair_cutoff_mhz);
            c6s.push_back(pert.c6);

            Eigen::MatrixXcd w = dipole_dipole_operator(sys, basis, geom);
            std::vector<double> grid(12);
            const double lmin = std::log(scheme.r_min_um),
                         lmax = std::log(scheme.r_max_um);
            for (int k = 0; k < 12; ++k)
                grid[k] = std::exp(lmax + (lmin - lmax) * k / 11.0);
            auto pts = exact_scan_points(sys, basis, w, grid);
            auto fit = fit_dispersion(pts, pert.c6, pert.p6);
            c9s.push_back(fit.c9);
            c12s.push_back(fit.c12);
            ++rep.n_settings;
        }

    auto variation = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double scale = std::max(std::abs(lo), std::abs(hi));
        return (scale > 0.0) ? (hi - lo) / scale : 0.0;
    };
    rep.c6_variation = variation(c6s);
    rep.c9_variation = variation(c9s);
    rep.c12_variation = variation(c12s);
    return rep;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);

    std::map<std::string, std::string> raw;
    std::string line, section = "scenario";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": empty key or value");
        raw[section + "." + key] = val;
    }

    auto get = [&](const std::string& k) -> std::string {
        auto it = raw.find(k);
        if (it == raw.end())
            throw std::runtime_error(path + ": missing required key " + k);
        return it->second;
    };
    auto get_or = [&](const std::string& k, const std::string& dflt) {
        auto it = raw.find(k);
        return it == raw.end() ? dflt : it->second;
    };
    auto num = [&](const std::string& k, double dflt) {
        auto it = raw.find(k);
        if (it == raw.end()) return dflt;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": bad numeric value for " + k + ": " +
                                     it->second);
        }
    };

    ScenarioFile sf;
    sf.data_dir = get_or("scenario.data_dir", default_data_dir());
    sf.name = get_or("scenario.name", path);

    Scheme& s = sf.scheme;
    const std::string species = get("scenario.species");
    s.defects = QuantumDefectTable::load(sf.data_dir + "/quantum_defects.txt", species);
    s.molecule = load_molecule(sf.data_dir + "/molecules.txt", get("scenario.molecule"));
    s.encoding = qubit_states(s.molecule, parse_rotor(get("scenario.lower")),
                              parse_rotor(get("scenario.upper")));

    s.triple.r = parse_level(get("scenario.r"));
    s.triple.r_pi = parse_level(get("scenario.r_pi"));
    s.triple.r_sigma = parse_level(get("scenario.r_sigma"));

    s.mu_pi = transition_dipole(s.triple.r, s.triple.r_pi, 0, s.defects);
    s.mu_sigma =
        transition_dipole(s.triple.r, s.triple.r_sigma, s.triple.sigma_p(), s.defects);
    if (s.mu_pi == 0.0 || s.mu_sigma == 0.0)
        throw std::runtime_error(path + ": triple has a vanishing drive dipole");
    s.m_ratio = std::abs(s.mu_pi / s.mu_sigma);
    s.mu_m_au = s.encoding.mu_m_debye * units::ea0_per_debye;
    s.w_pi_atom =
        level_energy(s.triple.r_pi, s.defects) - level_energy(s.triple.r, s.defects);
    s.w_sigma_atom =
        level_energy(s.triple.r_sigma, s.defects) - level_energy(s.triple.r, s.defects);
    s.ratios = fine_structure_ratios(s.triple.r, s.triple.r_pi, s.triple.r_sigma,
                                     s.defects);

    s.omega_sigma_rule = num("scenario.omega_sigma_rule", 0.1);
    const std::string branch = get_or("scenario.branch", "+-");
    if (branch == "+-" || branch == "+1" || branch == "1")
        s.branch_sign = 1;
    else if (branch == "-+" || branch == "-1")
        s.branch_sign = -1;
    else
        throw std::runtime_error(path + ": branch must be one of +-, -+, +1, -1");
    s.beta = num("scenario.beta", 0.0);
    s.tau_a_us = num("scenario.tau_a_us", 0.0);

    s.trunc.lmax = static_cast<int>(num("truncation.lmax", 3));
    s.trunc.nmin = static_cast<int>(num("truncation.nmin", s.triple.r.n - 4));
    s.trunc.nmax = static_cast<int>(num("truncation.nmax", s.triple.r.n + 3));
    s.trunc.pair_cutoff_mhz = 1e3 * num("truncation.pair_cutoff_ghz", 16.0);
    s.trunc.single_cutoff_mhz = 1e3 * num("truncation.single_cutoff_ghz", 0.0);
    s.trunc.frame_bound = static_cast<int>(num("truncation.frame_bound", 2));

    s.exact_trunc = s.trunc;
    s.exact_trunc.lmax = static_cast<int>(num("exact.lmax", s.trunc.lmax));
    s.exact_trunc.nmin = static_cast<int>(num("exact.nmin", s.trunc.nmin));
    s.exact_trunc.nmax = static_cast<int>(num("exact.nmax", s.trunc.nmax));
    s.exact_trunc.pair_cutoff_mhz = 1e3 * num("exact.pair_cutoff_ghz", 4.0);
    s.exact_trunc.single_cutoff_mhz = 1e3 * num("exact.single_cutoff_ghz", 8.0);
    s.exact_trunc.frame_bound = static_cast<int>(num("exact.frame_bound", s.trunc.frame_bound));

    s.beta_min = num("beta_scan.min", -3.0);
    s.beta_max = num("beta_scan.max", 3.0);
    s.beta_points = static_cast<int>(num("beta_scan.points", 61));

    s.r_min_um = num("exact.r_min_um", 3.0);
    s.r_max_um = num("exact.r_max_um", 16.0);
    s.r_points = static_cast<int>(num("exact.r_points", 24));

    s.r_am_um = num("geometry.r_am_um", 1.0);
    s.sites = static_cast<int>(num("geometry.sites", 6));
    s.spacing_um = num("geometry.spacing_um", 4.0);
    s.echo_classes = static_cast<int>(num("schedule.classes", 2));
    s.echo_time_us = num("schedule.T_us", 0.0);
    if (raw.count("error.tau_a_us")) s.tau_a_us = num("error.tau_a_us", s.tau_a_us);

    if (raw.count("dispersion.c3_khz_um3")) {
        DispersionSet d;
        d.c3 = 1e-3 * num("dispersion.c3_khz_um3", 0.0);
        d.c6 = 1e3 * num("dispersion.c6_ghz_um6", 0.0);
        d.c9 = 1e3 * num("dispersion.c9_ghz_um9", 0.0);
        d.c12 = 1e3 * num("dispersion.c12_ghz_um12", 0.0);
        d.p6 = std::pow(num("dispersion.p6_um", 0.0), 6.0);
        d.p12 = std::pow(num("dispersion.p12_um", 0.0), 12.0);
        s.dispersion = d;
    }

    sf.raw = std::move(raw);
    return sf;
}

} // namespace rydmol
