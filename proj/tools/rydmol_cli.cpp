// Batch front-end: parses scenario files, dispatches the solvers and scans,
// and emits key = value reports plus CSV tables.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rydmol/scenario.hpp"

using namespace rydmol;

namespace {

// %.10g keeps reruns byte-identical and full precision readable
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

int exit_code_for(const std::exception& e, bool parse_stage) {
    std::cerr << "error: " << e.what() << "\n";
    return parse_stage ? 2 : 1;
}

DriveConfig solved_config(const ScenarioFile& sf, SolveReport* report_out = nullptr) {
    SolveReport rep = solve_scheme(sf.scheme, sf.scheme.beta);
    if (report_out) *report_out = rep;
    return rep.six_level.config;
}

DispersionSet dispersion_for(const ScenarioFile& sf, const SolveReport& rep) {
    if (sf.scheme.dispersion) {
        DispersionSet d = *sf.scheme.dispersion;
        if (d.c3 == 0.0) d.c3 = rep.c3_mhz_um3;
        return d;
    }
    RadialScanResult rs = radial_scan(sf.scheme, rep);
    DispersionSet d;
    d.c3 = rep.c3_mhz_um3;
    d.c6 = rs.c6_pert;
    d.c9 = rs.fit.c9;
    d.c12 = rs.fit.c12;
    d.p6 = rs.p6_pert;
    d.p12 = rs.fit.p12;
    return d;
}

int cmd_solve(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    SolveReport rep;
    solved_config(sf, &rep);
    const auto& c3l = rep.three_level.config;
    const auto& c6l = rep.six_level.config;
    auto& os = out.stream();
    os << "# drive parameters, 2pi x MHz\n";
    os << "omega_pi_mhz = " << fmt(c6l.omega_pi) << "\n";
    os << "delta_pi_mhz = " << fmt(c6l.delta_pi) << "\n";
    os << "omega_sigma_mhz = " << fmt(c6l.omega_sigma) << "\n";
    os << "delta_sigma_mhz = " << fmt(c6l.delta_sigma) << "\n";
    os << "omega_mol_khz = " << fmt(1e3 * c6l.omega_mol) << "\n";
    os << "delta_pi_three_level_mhz = " << fmt(c3l.delta_pi) << "\n";
    os << "delta_sigma_three_level_mhz = " << fmt(c3l.delta_sigma) << "\n";
    os << "beta = " << fmt(sf.scheme.beta) << "\n";
    os << "branch = " << (sf.scheme.branch_sign > 0 ? "+-" : "-+") << "\n";
    os << "c3_khz_um3 = " << fmt(1e3 * rep.c3_mhz_um3) << "\n";
    os << "m_ratio = " << fmt(sf.scheme.m_ratio) << "\n";
    os << "dipolar_residual_rel = "
       << fmt(std::abs(rep.dipolar_residual3) /
              (sf.scheme.mu_pi * sf.scheme.mu_pi))
       << "\n";
    os << "six_level_eigen_residual = " << fmt(rep.six_level.eigen_residual) << "\n";
    os << "six_level_nullification_residual = "
       << fmt(rep.six_level.nullification_residual) << "\n";
    if (!rep.rwa_warning.empty()) os << "rwa_warning = " << rep.rwa_warning << "\n";
    return 0;
}

int cmd_scan(const ScenarioFile& sf, const std::string& kind,
             const std::string& out_path) {
    Output out(out_path);
    auto& os = out.stream();
    if (kind == "beta") {
        BetaScanResult res =
            beta_scan(sf.scheme, sf.scheme.beta_min, sf.scheme.beta_max,
                      sf.scheme.beta_points);
        os << "beta,C6_GHz_um6,r_crit_um\n";
        for (const auto& p : res.points)
            os << fmt(p.beta) << "," << fmt(1e-3 * p.c6) << "," << fmt(p.r_crit)
               << "\n";
        for (double b : res.crossings) os << "# crossing beta = " << fmt(b) << "\n";
        return 0;
    }
    if (kind == "radial") {
        SolveReport rep;
        const DriveConfig cfg = solved_config(sf, &rep);
        RadialScanResult res = radial_scan(sf.scheme, rep);
        os << "r_um,V_kHz,overlap\n";
        for (const auto& p : res.points)
            os << fmt(p.r_um) << "," << fmt(1e3 * p.v_mhz) << "," << fmt(p.overlap)
               << "\n";
        return 0;
    }
    throw CLI::ValidationError("scan kind must be beta or radial");
}

int cmd_fit(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    SolveReport rep;
    const DriveConfig cfg = solved_config(sf, &rep);
    RadialScanResult res = radial_scan(sf.scheme, rep);
    auto& os = out.stream();
    os << "c6_pert_ghz_um6 = " << fmt(1e-3 * res.c6_pert) << "\n";
    os << "p6_um6 = " << fmt(res.p6_pert) << "\n";
    os << "p6_root_um = " << fmt(std::pow(std::max(res.p6_pert, 0.0), 1.0 / 6.0)) << "\n";
    os << "c9_ghz_um9 = " << fmt(1e-3 * res.fit.c9) << "\n";
    os << "c12_ghz_um12 = " << fmt(1e-3 * res.fit.c12) << "\n";
    os << "p12_um12 = " << fmt(res.fit.p12) << "\n";
    os << "p12_root_um = "
       << fmt(std::pow(std::max(res.fit.p12, 0.0), 1.0 / 12.0)) << "\n";
    os << "exponent9 = " << fmt(res.fit.exponent9) << "\n";
    os << "exponent12 = " << fmt(res.fit.exponent12) << "\n";
    os << "fit_points = " << res.fit.n_points << "\n";
    os << "v_residual_rel = " << fmt(res.fit.v_residual_rel) << "\n";
    return 0;
}

int cmd_jacobian(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    SolveReport rep;
    const DriveConfig cfg = solved_config(sf, &rep);
    CoefficientEvaluator ev = make_evaluator(sf.scheme);
    const JacobianResult j3 = sensitivity_jacobian(ev, cfg, CoefficientKind::c3);
    const JacobianResult j6 = sensitivity_jacobian(ev, cfg, CoefficientKind::c6);
    auto& os = out.stream();
    const char* names[4] = {"omega_pi", "omega_sigma", "delta_pi", "delta_sigma"};
    for (int k = 0; k < 4; ++k)
        os << "J3_" << names[k] << "_mhz_um3 = " << fmt(j3.j(k)) << "\n";
    for (int k = 0; k < 4; ++k)
        os << "J6_" << names[k] << "_ghz_um6 = " << fmt(1e-3 * j6.j(k)) << "\n";
    os << "c3_khz_um3 = " << fmt(1e3 * j3.value) << "\n";
    os << "c6_ghz_um6 = " << fmt(1e-3 * j6.value) << "\n";
    // excess interaction for 0.1% error in the leading component
    const double j6max = j6.j.cwiseAbs().maxCoeff();
    for (double r : {4.0, 6.0, 8.0, 12.0})
        os << "excess_khz_r" << fmt(r) << "um_0p1pct = "
           << fmt(1e3 * excess_interaction(j6max, 1e-3, r)) << "\n";
    return 0;
}

int cmd_protocol(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    SolveReport rep;
    const DriveConfig cfg = solved_config(sf, &rep);
    DispersionSet disp = dispersion_for(sf, rep);
    auto& os = out.stream();

    const double t = cz_time_us(disp.c3, sf.scheme.r_am_um);
    ErrorModel err;
    err.tau_a_us = sf.scheme.tau_a_us;
    const double v = std::abs(disp.c3) / std::pow(sf.scheme.r_am_um, 3.0);

    os << "c3_khz_um3 = " << fmt(1e3 * disp.c3) << "\n";
    os << "v_am_khz = " << fmt(1e3 * v) << "\n";
    os << "t_cz_us = " << fmt(t) << "\n";
    if (err.tau_a_us > 0.0)
        os << "lifetime_ratio_2tau_over_t = " << fmt(2.0 * err.tau_a_us / t) << "\n";

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto r0 = simulate_measurement(1.0, 0.0, err, v, t);
    auto r1 = simulate_measurement(inv_sqrt2, inv_sqrt2, err, v, t);
    os << "p_g_plus_input = " << fmt(r0.p_g) << "\n";
    os << "fidelity_plus_input = " << fmt(r0.fidelity) << "\n";
    os << "p_g_equal_superposition = " << fmt(r1.p_g) << "\n";
    os << "purity_equal_superposition = " << fmt(r1.purity_g) << "\n";
    os << "readout_fidelity = " << fmt(r1.fidelity) << "\n";

    // two-molecule parity check
    Eigen::VectorXcd even = Eigen::VectorXcd::Zero(4);
    even(0) = 1.0; // |++>
    auto par = simulate_parity({v, v}, even);
    os << "parity_even_prob_pp = " << fmt(par.p_even) << "\n";
    return 0;
}

int cmd_echo(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    SolveReport rep;
    const DriveConfig cfg = solved_config(sf, &rep);
    DispersionSet disp = dispersion_for(sf, rep);
    auto& os = out.stream();

    ArrayLayout layout =
        ArrayLayout::chain(sf.scheme.sites, sf.scheme.spacing_um, sf.scheme.r_am_um);
    InteractionTable table = InteractionTable::build(layout, disp);
    const double t_total = (sf.scheme.echo_time_us > 0.0)
                               ? sf.scheme.echo_time_us
                               : cz_time_us(disp.c3, sf.scheme.r_am_um);
    PulseSchedule sched = build_echo_schedule(sf.scheme.echo_classes, t_total);

    std::vector<int> site_class(sf.scheme.sites);
    for (int i = 0; i < sf.scheme.sites; ++i) site_class[i] = i % sf.scheme.echo_classes;
    const std::complex<double> a{1.0 / std::sqrt(2.0), 0.0};
    std::vector<std::complex<double>> plus(sf.scheme.sites, a),
        minus(sf.scheme.sites, a);
    ArraySimResult res = simulate_array(table, sched, site_class, plus, minus);

    os << "classes = " << sched.classes << "\n";
    os << "total_pulses = " << sched.total_pulses() << "\n";
    os << "T_us = " << fmt(t_total) << "\n";
    os << "norm_error = " << fmt(res.norm_error) << "\n";
    os << "site,class,pair_fidelity\n";
    for (int i = 0; i < sf.scheme.sites; ++i)
        os << i << "," << site_class[i] << "," << fmt(res.pair_fidelity[i]) << "\n";

    AlternatingPlan plan = alternating_measurement_plan(layout, disp, 2);
    for (size_t r = 0; r < plan.rounds.size(); ++r)
        os << "# round " << r << ": min_r_aa_um = " << fmt(plan.rounds[r].min_r_aa_um)
           << ", v_aa_khz = " << fmt(1e3 * plan.rounds[r].v_aa_mhz) << "\n";
    return 0;
}

int cmd_overlap(const ScenarioFile& sf, const std::string& out_path) {
    Output out(out_path);
    auto& os = out.stream();
    const auto& s = sf.scheme;
    QubitEncoding aux = auxiliary_pi_dressing(s.molecule, s.encoding, 1.0);
    os << "omega_aux_mhz,n_97,n_99,best_nonstretched\n";
    for (double omega_aux : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        auto pairs = nuclear_overlap_analysis(s.molecule, aux, omega_aux);
        int n97 = 0, n99 = 0;
        double best = 0.0;
        for (const auto& p : pairs) {
            if (p.stretched) continue;
            if (p.overlap >= 0.97) ++n97;
            if (p.overlap > 0.99) ++n99;
            best = std::max(best, p.overlap);
        }
        os << fmt(omega_aux) << "," << n97 << "," << n99 << "," << fmt(best) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"microwave-dressed Rydberg readout designer"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, kind = "beta";
    int threads = 0;
    long seed = 0;
    app.add_option("--threads", threads, "worker threads (0 = library default)");
    app.add_option("--seed", seed,
                   "reserved; all current computations are deterministic");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "scenario file")->required();
        sub->add_option("--out", out_path, "output path (default stdout)");
    };
    auto* solve = app.add_subcommand("solve", "drive parameters and residuals");
    add_common(solve);
    auto* scan = app.add_subcommand("scan", "beta or radial scan CSV");
    add_common(scan);
    scan->add_option("--kind", kind, "beta | radial");
    auto* fit = app.add_subcommand("fit", "dispersion coefficients from the exact scan");
    add_common(fit);
    auto* jac = app.add_subcommand("jacobian", "drive-parameter sensitivities");
    add_common(jac);
    auto* prot = app.add_subcommand("protocol", "measurement-circuit report");
    add_common(prot);
    auto* echo = app.add_subcommand("echo", "spin-echo array simulation");
    add_common(echo);
    auto* overlap = app.add_subcommand("overlap", "nuclear-spin overlap analysis");
    add_common(overlap);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    (void)seed;

    ScenarioFile sf;
    try {
        sf = load_scenario(scenario_path);
    } catch (const std::exception& e) {
        return exit_code_for(e, true);
    }

    try {
        if (solve->parsed()) return cmd_solve(sf, out_path);
        if (scan->parsed()) return cmd_scan(sf, kind, out_path);
        if (fit->parsed()) return cmd_fit(sf, out_path);
        if (jac->parsed()) return cmd_jacobian(sf, out_path);
        if (prot->parsed()) return cmd_protocol(sf, out_path);
        if (echo->parsed()) return cmd_echo(sf, out_path);
        if (overlap->parsed()) return cmd_overlap(sf, out_path);
    } catch (const std::exception& e) {
        return exit_code_for(e, false);
    }
    return 0;
}
