#include "rydmol/atomdata.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "rydmol/angular.hpp"
#include "rydmol/numerov.hpp"
#include "rydmol/units.hpp"

namespace rydmol {

namespace {

const char* l_letters = "SPDFGHIK";

int parse_l(const std::string& tok) {
    if (tok.size() == 1) {
        for (int i = 0; l_letters[i]; ++i)
            if (tok[0] == l_letters[i]) return i;
    }
    return std::stoi(tok);
}

int parse_two_j(const std::string& tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return 2 * std::stoi(tok);
    int num = std::stoi(tok.substr(0, slash));
    int den = std::stoi(tok.substr(slash + 1));
    if (den != 2) throw std::invalid_argument("bad J fraction: " + tok);
    return num;
}

} // namespace

void validate(const RydbergLevel& level) {
    if (level.n < 1) throw std::domain_error("RydbergLevel: n must be >= 1");
    if (level.l < 0 || level.l >= level.n)
        throw std::domain_error("RydbergLevel: need 0 <= L < n");
    const int two_l = 2 * level.l;
    if (level.two_j != two_l + 1 && level.two_j != std::abs(two_l - 1))
        throw std::domain_error("RydbergLevel: J must be L +/- 1/2");
    if (std::abs(level.two_mj) > level.two_j || (level.two_mj & 1) == 0)
        throw std::domain_error("RydbergLevel: invalid mJ");
}

std::string to_string(const RydbergLevel& level) {
    std::ostringstream os;
    char lc = level.l < 8 ? l_letters[level.l] : '?';
    os << level.n << lc << level.two_j << "/2"
       << " mJ=" << level.two_mj << "/2";
    return os.str();
}

QuantumDefectTable QuantumDefectTable::load(const std::string& path,
                                            const std::string& species) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open defect file: " + path);

    QuantumDefectTable table;
    table.species_ = species;
    bool found_species = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        std::string kind;
        if (!(is >> kind)) continue;
        try {
            if (kind == "species") {
                std::string name;
                double ry_cm, alpha;
                if (!(is >> name >> ry_cm >> alpha))
                    throw std::invalid_argument("species record needs name, Ry*, alpha_core");
                if (name == species) {
                    table.rydberg_mhz_ = ry_cm * units::mhz_per_inverse_cm;
                    table.core_polarizability_ = alpha;
                    found_species = true;
                }
            } else if (kind == "defect") {
                std::string name, ltok, jtok;
                double d0, d2, d4;
                if (!(is >> name >> ltok >> jtok >> d0 >> d2 >> d4))
                    throw std::invalid_argument("defect record needs species, L, J, d0, d2, d4");
                if (name == species) {
                    int l = parse_l(ltok);
                    int two_j = parse_two_j(jtok);
                    table.channels_[{l, two_j}] = RitzCoefficients{d0, d2, d4};
                }
            } else {
                throw std::invalid_argument("unknown record kind: " + kind);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!found_species)
        throw std::runtime_error("species " + species + " not found in " + path);
    return table;
}

QuantumDefectTable QuantumDefectTable::hydrogen() {
    QuantumDefectTable table;
    table.species_ = "H";
    table.rydberg_mhz_ = 109737.31568160 * units::mhz_per_inverse_cm;
    table.core_polarizability_ = 0.0;
    return table;
}

double QuantumDefectTable::defect(int n, int l, int two_j) const {
    auto it = channels_.find({l, two_j});
    if (it == channels_.end()) return 0.0;
    const auto& c = it->second;
    const double m = n - c.d0;
    return c.d0 + c.d2 / (m * m) + c.d4 / (m * m * m * m);
}

double QuantumDefectTable::effective_n(const RydbergLevel& level) const {
    return level.n - defect(level.n, level.l, level.two_j);
}

double level_energy(const RydbergLevel& level, const QuantumDefectTable& defects) {
    validate(level);
    const double nu = defects.effective_n(level);
    return -defects.rydberg_mhz() / (nu * nu);
}

namespace {

// Radial wavefunctions are pure functions of (species, n, L, J, step); the
// cache is read-consistent behind a mutex.
const RadialWavefunction& cached_wavefunction(const RydbergLevel& level,
                                              const QuantumDefectTable& defects,
                                              double step) {
    struct Key {
        std::string species;
        int n, l, two_j;
        long step_q;
        bool operator<(const Key& o) const {
            return std::tie(species, n, l, two_j, step_q) <
                   std::tie(o.species, o.n, o.l, o.two_j, o.step_q);
        }
    };
    static std::map<Key, RadialWavefunction> cache;
    static std::mutex mtx;

    Key key{defects.species(), level.n, level.l, level.two_j,
            static_cast<long>(std::llround(step * 1e9))};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end()) {
        NumerovOptions opts;
        opts.step = step;
        it = cache.emplace(key, radial_wavefunction(level, defects, opts)).first;
    }
    return it->second;
}

} // namespace

double radial_matrix_element(const RydbergLevel& a, const RydbergLevel& b,
                             const QuantumDefectTable& defects) {
    validate(a);
    validate(b);
    if (std::abs(a.l - b.l) != 1)
        throw std::domain_error("radial_matrix_element: |dL| must be 1");

    // the integral is mJ-independent; cache per unordered channel pair
    struct Key {
        std::string species;
        int n1, l1, j1, n2, l2, j2;
        bool operator<(const Key& o) const {
            return std::tie(species, n1, l1, j1, n2, l2, j2) <
                   std::tie(o.species, o.n1, o.l1, o.j1, o.n2, o.l2, o.j2);
        }
    };
    static std::map<Key, double> cache;
    static std::mutex mtx;

    auto ka = std::tuple(a.n, a.l, a.two_j);
    auto kb = std::tuple(b.n, b.l, b.two_j);
    const bool swap = kb < ka;
    const auto& lo = swap ? kb : ka;
    const auto& hi = swap ? ka : kb;
    Key key{defects.species(), std::get<0>(lo), std::get<1>(lo), std::get<2>(lo),
            std::get<0>(hi), std::get<1>(hi), std::get<2>(hi)};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double step = NumerovOptions{}.step;
    const auto& wa = cached_wavefunction(a, defects, step);
    const auto& wb = cached_wavefunction(b, defects, step);
    const double value = radial_integral(wa, wb, 1);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, value);
    return value;
}

double transition_dipole(const RydbergLevel& a, const RydbergLevel& b, int p,
                         const QuantumDefectTable& defects) {
    validate(a);
    validate(b);
    if (p < -1 || p > 1) throw std::domain_error("transition_dipole: p must be 0 or +/-1");
    if (std::abs(a.l - b.l) != 1) return 0.0;
    if (b.two_mj != a.two_mj + 2 * p) return 0.0;

    // <b|d_p|a> = R_ab * (-1)^(Jb-mb) 3j(Jb 1 Ja; -mb p ma) * <Jb||C1||Ja>
    const double tj = wigner_3j(b.two_j, 2, a.two_j, -b.two_mj, 2 * p, a.two_mj);
    if (tj == 0.0) return 0.0;

    const double sixj = wigner_6j(2 * b.l, b.two_j, 1, a.two_j, 2 * a.l, 2);
    if (sixj == 0.0) return 0.0;

    const double tj0 = wigner_3j(2 * b.l, 2, 2 * a.l, 0, 0, 0);

    // reduced <Lb||C1||La>
    int ph_l = b.l % 2;
    double red_l = (ph_l ? -1.0 : 1.0) *
                   std::sqrt((2.0 * b.l + 1) * (2.0 * a.l + 1)) * tj0;
    // spin spectator: <Lb S Jb||C1||La S Ja>
    int ph_j_exp = b.l + (a.two_j + 1) / 2 + 1; // Lb + S + Ja + 1 with S=1/2 folded in
    // (-1)^(Lb + 1/2 + Ja + 1): Ja is half-integer so pair it with S=1/2
    // exactly: exponent = Lb + 1 + (2Ja + 1)/2
    double ph_j = (ph_j_exp % 2 == 0) ? 1.0 : -1.0;
    double red_j = ph_j * std::sqrt((a.two_j + 1.0) * (b.two_j + 1.0)) * sixj * red_l;

    int ph_m_exp = (b.two_j - b.two_mj) / 2;
    double ph_m = (((ph_m_exp % 2) + 2) % 2 == 0) ? 1.0 : -1.0;

    const double radial = radial_matrix_element(a, b, defects);
    return radial * ph_m * tj * red_j;
}

std::optional<RydbergLevel> primed_partner(const RydbergLevel& level) {
    if (level.l == 0) return std::nullopt;
    const int two_l = 2 * level.l;
    RydbergLevel p = level;
    p.two_j = (level.two_j == two_l + 1) ? two_l - 1 : two_l + 1;
    if (std::abs(p.two_mj) > p.two_j) return std::nullopt;
    return p;
}

FineStructureRatios fine_structure_ratios(const RydbergLevel& r,
                                          const RydbergLevel& r_pi,
                                          const RydbergLevel& r_sigma,
                                          const QuantumDefectTable& defects) {
    validate(r);
    validate(r_pi);
    validate(r_sigma);
    const int p_sigma = (r_sigma.two_mj - r.two_mj) / 2;

    const double mu_pi = transition_dipole(r, r_pi, 0, defects);
    const double mu_sigma = transition_dipole(r, r_sigma, p_sigma, defects);
    if (mu_pi == 0.0 || mu_sigma == 0.0)
        throw std::domain_error("fine_structure_ratios: denominator dipole vanishes");

    FineStructureRatios out;
    out.r_p = primed_partner(r);
    out.r_pi_p = primed_partner(r_pi);
    out.r_sigma_p = primed_partner(r_sigma);

    if (out.r_pi_p) {
        out.f_pi = transition_dipole(r, *out.r_pi_p, 0, defects) / mu_pi;
        out.delta_pi_p = level_energy(*out.r_pi_p, defects) - level_energy(r_pi, defects);
    }
    if (out.r_sigma_p) {
        out.f_sigma = transition_dipole(r, *out.r_sigma_p, p_sigma, defects) / mu_sigma;
        out.delta_sigma_p =
            level_energy(*out.r_sigma_p, defects) - level_energy(r_sigma, defects);
    }
    if (out.r_p) {
        out.delta_r_p = level_energy(*out.r_p, defects) - level_energy(r, defects);
        out.g_pi = transition_dipole(*out.r_p, r_pi, 0, defects) / mu_pi;
        out.g_sigma = transition_dipole(*out.r_p, r_sigma, p_sigma, defects) / mu_sigma;
        if (out.r_pi_p)
            out.g_pi_p = transition_dipole(*out.r_p, *out.r_pi_p, 0, defects) / mu_pi;
        if (out.r_sigma_p)
            out.g_sigma_p =
                transition_dipole(*out.r_p, *out.r_sigma_p, p_sigma, defects) / mu_sigma;
    }
    return out;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("RYDMOL_DATA_DIR")) return env;
#ifdef RYDMOL_SOURCE_DATA_DIR
    return RYDMOL_SOURCE_DATA_DIR;
#else
    return "data";
#endif
}

} // namespace rydmol
