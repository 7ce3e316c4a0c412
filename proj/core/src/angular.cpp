#include "rydmol/angular.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace rydmol {

namespace {

// factorials up to 170! fit in double; momenta here never get close.
constexpr int kMaxFact = 171;

const std::array<double, kMaxFact>& factorials() {
    static const std::array<double, kMaxFact> table = [] {
        std::array<double, kMaxFact> f{};
        f[0] = 1.0;
        for (int i = 1; i < kMaxFact; ++i) f[i] = f[i - 1] * i;
        return f;
    }();
    return table;
}

inline double fact(int n) {
    if (n < 0 || n >= kMaxFact) throw std::domain_error("factorial out of range");
    return factorials()[n];
}

inline bool is_triangle(int two_a, int two_b, int two_c) {
    if ((two_a + two_b + two_c) % 2 != 0) return false;
    return two_c >= std::abs(two_a - two_b) && two_c <= two_a + two_b;
}

// sqrt of the triangle coefficient Delta(abc)
inline double triangle_coeff(int two_a, int two_b, int two_c) {
    return std::sqrt(fact((two_a + two_b - two_c) / 2) *
                     fact((two_a - two_b + two_c) / 2) *
                     fact((-two_a + two_b + two_c) / 2) /
                     fact((two_a + two_b + two_c) / 2 + 1));
}

} // namespace

double wigner_3j(int two_j1, int two_j2, int two_j3,
                 int two_m1, int two_m2, int two_m3) {
    if ((two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 ||
        (two_j3 + two_m3) % 2 != 0)
        throw std::domain_error("wigner_3j: j and m must both be integer or half-integer");
    if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 ||
        std::abs(two_m3) > two_j3)
        return 0.0;
    if (two_m1 + two_m2 + two_m3 != 0) return 0.0;
    if (!is_triangle(two_j1, two_j2, two_j3)) return 0.0;

    // Racah sum
    const int t1 = (two_j2 - two_m1 - two_j3) / 2;
    const int t2 = (two_j1 + two_m2 - two_j3) / 2;
    const int t3 = (two_j1 + two_j2 - two_j3) / 2;
    const int t4 = (two_j1 - two_m1) / 2;
    const int t5 = (two_j2 + two_m2) / 2;

    const int kmin = std::max({0, t1, t2});
    const int kmax = std::min({t3, t4, t5});
    if (kmin > kmax) return 0.0;

    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double term = 1.0 /
            (fact(k) * fact(k - t1) * fact(k - t2) *
             fact(t3 - k) * fact(t4 - k) * fact(t5 - k));
        sum += (k % 2 == 0) ? term : -term;
    }

    double norm = triangle_coeff(two_j1, two_j2, two_j3) *
        std::sqrt(fact((two_j1 + two_m1) / 2) * fact((two_j1 - two_m1) / 2) *
                  fact((two_j2 + two_m2) / 2) * fact((two_j2 - two_m2) / 2) *
                  fact((two_j3 + two_m3) / 2) * fact((two_j3 - two_m3) / 2));

    int phase_exp = (two_j1 - two_j2 - two_m3) / 2;
    double phase = (((phase_exp % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
    return phase * norm * sum;
}

double wigner_6j(int two_j1, int two_j2, int two_j3,
                 int two_j4, int two_j5, int two_j6) {
    if (!is_triangle(two_j1, two_j2, two_j3) || !is_triangle(two_j1, two_j5, two_j6) ||
        !is_triangle(two_j4, two_j2, two_j6) || !is_triangle(two_j4, two_j5, two_j3))
        return 0.0;

    const double d1 = triangle_coeff(two_j1, two_j2, two_j3);
    const double d2 = triangle_coeff(two_j1, two_j5, two_j6);
    const double d3 = triangle_coeff(two_j4, two_j2, two_j6);
    const double d4 = triangle_coeff(two_j4, two_j5, two_j3);

    const int a = (two_j1 + two_j2 + two_j3) / 2;
    const int b = (two_j1 + two_j5 + two_j6) / 2;
    const int c = (two_j4 + two_j2 + two_j6) / 2;
    const int d = (two_j4 + two_j5 + two_j3) / 2;
    const int e = (two_j1 + two_j2 + two_j4 + two_j5) / 2;
    const int f = (two_j2 + two_j3 + two_j5 + two_j6) / 2;
    const int g = (two_j3 + two_j1 + two_j6 + two_j4) / 2;

    const int kmin = std::max({a, b, c, d});
    const int kmax = std::min({e, f, g});
    if (kmin > kmax) return 0.0;

    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double term = fact(k + 1) /
            (fact(k - a) * fact(k - b) * fact(k - c) * fact(k - d) *
             fact(e - k) * fact(f - k) * fact(g - k));
        sum += (k % 2 == 0) ? term : -term;
    }
    return d1 * d2 * d3 * d4 * sum;
}

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j3, int two_m3) {
    if (two_m1 + two_m2 != two_m3) return 0.0;
    double tj = wigner_3j(two_j1, two_j2, two_j3, two_m1, two_m2, -two_m3);
    int phase_exp = (-two_j1 + two_j2 - two_m3) / 2;
    double phase = (((phase_exp % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
    return phase * std::sqrt(two_j3 + 1.0) * tj;
}

double rotor_ckp(int n_to, int m_to, int k, int p, int n_from, int m_from) {
    if (n_to < 0 || n_from < 0) throw std::domain_error("rotor_ckp: negative N");
    if (std::abs(m_to) > n_to || std::abs(m_from) > n_from) return 0.0;
    double tj_m = wigner_3j(2 * n_to, 2 * k, 2 * n_from, -2 * m_to, 2 * p, 2 * m_from);
    if (tj_m == 0.0) return 0.0;
    double tj_0 = wigner_3j(2 * n_to, 2 * k, 2 * n_from, 0, 0, 0);
    double phase = (m_to % 2 == 0) ? 1.0 : -1.0;
    return phase * std::sqrt((2.0 * n_to + 1) * (2.0 * n_from + 1)) * tj_m * tj_0;
}

} // namespace rydmol
