#include "rydmol/numerov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydmol {

namespace {

// w'' = G(x) w for the radial Coulomb problem in x = sqrt(r):
//   G(x) = (4 L(L+1) + 3/4)/x^2 - 8 E x^2 - 8
// with E in Hartree and V = -1/r.
struct ScaledEquation {
    double e_hartree;
    int l;
    double g(double x) const {
        double x2 = x * x;
        return (4.0 * l * (l + 1) + 0.75) / x2 - 8.0 * e_hartree * x2 - 8.0;
    }
};

} // namespace

RadialWavefunction radial_wavefunction(const RydbergLevel& level,
                                       const QuantumDefectTable& defects,
                                       const NumerovOptions& opts) {
    validate(level);
    const double h = opts.step;
    const double nu = defects.effective_n(level);
    const double e = -0.5 / (nu * nu); // Hartree

    const double r_outer = 2.0 * level.n * (level.n + 15.0);
    const double r_core = std::cbrt(std::max(defects.core_polarizability(), 0.0));
    const double r_inner = std::max(r_core, 1e-4);

    const long i_out = static_cast<long>(std::floor(std::sqrt(r_outer) / h));
    long i_in = static_cast<long>(std::ceil(std::sqrt(r_inner) / h));
    i_in = std::max<long>(i_in, 1);
    if (i_out - i_in < 16)
        throw std::domain_error("radial_wavefunction: grid degenerate");

    const ScaledEquation eq{e, level.l};
    const long npts = i_out - i_in + 1;
    std::vector<double> w(static_cast<size_t>(npts), 0.0);

    auto gi = [&](long i) { return eq.g((i_in + i) * h); };

    // inward integration; seeds in the outer forbidden region
    w[npts - 1] = 1e-15;
    w[npts - 2] = 1e-14;
    const double h2_12 = h * h / 12.0;
    double wmax = 0.0;
    for (long i = npts - 3; i >= 0; --i) {
        const double g0 = gi(i);
        const double g1 = gi(i + 1);
        const double g2 = gi(i + 2);
        w[i] = (2.0 * w[i + 1] * (1.0 + 5.0 * h2_12 * g1) -
                w[i + 2] * (1.0 - h2_12 * g2)) /
               (1.0 - h2_12 * g0);
        wmax = std::max(wmax, std::abs(w[i + 1]));
        // divergence guard deep inside the inner forbidden region
        if (std::abs(w[i]) > 1e8 * wmax && wmax > 0.0) {
            for (long j = i; j >= 0; --j) w[j] = 0.0;
            break;
        }
    }

    RadialWavefunction out;
    out.step = h;
    out.i0 = i_in;
    out.w = std::move(w);

    const double norm = radial_integral(out, out, 0);
    const double s = 1.0 / std::sqrt(norm);
    for (auto& v : out.w) v *= s;
    return out;
}

double radial_integral(const RadialWavefunction& a, const RadialWavefunction& b,
                       int k) {
    if (std::abs(a.step - b.step) > 1e-15)
        throw std::invalid_argument("radial_integral: mismatched grids");
    const double h = a.step;
    const long lo = std::max(a.i0, b.i0);
    const long hi = std::min(a.i0 + static_cast<long>(a.w.size()) - 1,
                             b.i0 + static_cast<long>(b.w.size()) - 1);
    if (hi <= lo) return 0.0;

    // integrand f(x) = 2 w_a w_b x^(2k+2); composite Simpson
    auto f = [&](long i) {
        const double x = i * h;
        double xp = 1.0;
        for (int q = 0; q < 2 * k + 2; ++q) xp *= x;
        return 2.0 * a.w[static_cast<size_t>(i - a.i0)] *
               b.w[static_cast<size_t>(i - b.i0)] * xp;
    };

    const long n = hi - lo; // number of intervals
    double sum = 0.0;
    long m = lo;
    if (n % 2 != 0) { // odd interval count: trapezoid on the first cell
        sum += 0.5 * h * (f(lo) + f(lo + 1));
        m = lo + 1;
    }
    double s_ends = f(m) + f(hi);
    double s_odd = 0.0, s_even = 0.0;
    for (long i = m + 1; i < hi; i += 2) s_odd += f(i);
    for (long i = m + 2; i < hi; i += 2) s_even += f(i);
    sum += h / 3.0 * (s_ends + 4.0 * s_odd + 2.0 * s_even);
    return sum;
}

double radial_matrix_element(const RydbergLevel& a, const RydbergLevel& b,
                             const QuantumDefectTable& defects,
                             const NumerovOptions& opts) {
    if (std::abs(a.l - b.l) != 1)
        throw std::domain_error("radial_matrix_element: |dL| must be 1");
    const auto wa = radial_wavefunction(a, defects, opts);
    const auto wb = radial_wavefunction(b, defects, opts);
    return radial_integral(wa, wb, 1);
}

} // namespace rydmol
