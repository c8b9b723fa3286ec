#include "hexscat/spectral.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hexscat {

void PotentialField::set(LatticeSite n, double q1, double q2) {
    if (l1_norm(n) > m_)
        throw std::invalid_argument("PotentialField::set: site " + to_string(n) +
                                    " outside l1 ball of radius " + std::to_string(m_));
    if (!std::isfinite(q1) || !std::isfinite(q2))
        throw std::invalid_argument("PotentialField::set: non-finite value at " + to_string(n));
    if (q1 == 0.0 && q2 == 0.0)
        e_.erase(n);
    else
        e_[n] = {q1, q2};
}

bool PotentialField::empty() const {
    for (const auto& [n, v] : e_)
        if (v.q1 != 0.0 || v.q2 != 0.0) return false;
    return true;
}

double PotentialField::max_abs() const {
    double m = 0.0;
    for (const auto& [n, v] : e_) m = std::max({m, std::abs(v.q1), std::abs(v.q2)});
    return m;
}

PotentialField parse_potential(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("potential parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("M") || !j["M"].is_number_integer())
        throw std::runtime_error("potential parse error: missing integer field \"M\"");
    const int m = j["M"].get<int>();
    if (m < 0) throw std::runtime_error("potential parse error: M must be >= 0");
    PotentialField q(m);
    if (j.contains("sites")) {
        if (!j["sites"].is_array())
            throw std::runtime_error("potential parse error: \"sites\" must be an array");
        int idx = 0;
        for (const auto& s : j["sites"]) {
            for (const char* key : {"n1", "n2", "q1", "q2"})
                if (!s.contains(key) || !s[key].is_number())
                    throw std::runtime_error("potential parse error: site #" + std::to_string(idx) +
                                             " missing numeric field \"" + key + "\"");
            const LatticeSite n{s["n1"].get<int>(), s["n2"].get<int>()};
            if (q.entries().count(n))
                throw std::runtime_error("potential parse error: duplicate site " + to_string(n));
            const double q1 = s["q1"].get<double>();
            const double q2 = s["q2"].get<double>();
            try {
                q.set(n, q1, q2);
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(std::string("potential parse error: ") + e.what());
            }
            ++idx;
        }
    }
    return q;
}

PotentialField load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open potential file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_potential(ss.str());
}

std::string potential_to_json(const PotentialField& q) {
    nlohmann::ordered_json j;
    j["M"] = q.M();
    j["sites"] = nlohmann::ordered_json::array();
    for (const auto& [n, v] : q.entries()) {
        nlohmann::ordered_json s;
        s["n1"] = n.n1;
        s["n2"] = n.n2;
        s["q1"] = v.q1;
        s["q2"] = v.q2;
        j["sites"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

void save_potential(const PotentialField& q, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write potential file: " + path);
    out << potential_to_json(q);
}

std::map<int, double> potential_row(const PotentialField& q, int p, int comp) {
    if (comp != 1 && comp != 2) throw std::invalid_argument("potential_row: comp must be 1 or 2");
    std::map<int, double> row;
    for (const auto& [n, v] : q.entries())
        if (n.n2 == p) row[n.n1] = (comp == 1) ? v.q1 : v.q2;
    return row;
}

PotentialField random_potential(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Explicit modulo keeps the draw deterministic across platforms.
    auto draw = [&rng]() { return static_cast<int>(rng() % 7) - 3; };
    PotentialField q(m);
    for (int n2 = m; n2 >= -m; --n2)
        for (int n1 = -(m - std::abs(n2)); n1 <= m - std::abs(n2); ++n1)
            q.set({n1, n2}, draw(), draw());
    return q;
}

PotentialField truncate_rows(const PotentialField& q, int keep_q1_above, int keep_q2_above) {
    PotentialField out(q.M());
    for (const auto& [n, v] : q.entries()) {
        const double q1 = n.n2 > keep_q1_above ? v.q1 : 0.0;
        const double q2 = n.n2 > keep_q2_above ? v.q2 : 0.0;
        if (q1 != 0.0 || q2 != 0.0) out.set(n, q1, q2);
    }
    return out;
}

LatticeField2 apply_h0(const LatticeField2& f) {
    LatticeField2 g;
    auto add1 = [&g](LatticeSite m, LatticeField2::C v) {
        if (v != 0.0) g.v[m].first += v;
    };
    auto add2 = [&g](LatticeSite m, LatticeField2::C v) {
        if (v != 0.0) g.v[m].second += v;
    };
    for (const auto& [n, pair] : f.v) {
        const auto& [f1, f2] = pair;
        // f2 feeds component 1 at n, n+(1,0), n+(0,1).
        add1(n, f2);
        add1({n.n1 + 1, n.n2}, f2);
        add1({n.n1, n.n2 + 1}, f2);
        // f1 feeds component 2 at n, n-(1,0), n-(0,1).
        add2(n, f1);
        add2({n.n1 - 1, n.n2}, f1);
        add2({n.n1, n.n2 - 1}, f1);
    }
    return g;
}

double p_of(double xi1, double xi2) {
    const double s = 3.0 + 2.0 * std::cos(xi1) + 2.0 * std::cos(xi2) + 2.0 * std::cos(xi1 - xi2);
    return std::sqrt(std::max(s, 0.0));
}

std::pair<double, double> grad_p(double xi1, double xi2) {
    const double p = p_of(xi1, xi2);
    if (p < 1e-12)
        throw std::domain_error("grad_p: undefined at a Dirac point");
    return {(-std::sin(xi1) - std::sin(xi1 - xi2)) / p, (-std::sin(xi2) + std::sin(xi1 - xi2)) / p};
}

SpecialSets special_sets() {
    const double c = 2.0 * std::numbers::pi / 3.0;
    SpecialSets s;
    s.dirac = {{{c, -c}, {-c, c}}};
    s.critical = {{{0.0, 0.0},
                   {0.0, -std::numbers::pi},
                   {-std::numbers::pi, 0.0},
                   {-std::numbers::pi, -std::numbers::pi}}};
    return s;
}

namespace {
double wrap_pi(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x + std::numbers::pi, two_pi);
    if (x < 0) x += two_pi;
    return x - std::numbers::pi;
}
}  // namespace

bool on_level_one(double xi1, double xi2, double tol) {
    if (std::abs(wrap_pi(xi1 - std::numbers::pi)) < tol) return true;
    if (std::abs(wrap_pi(xi2 - std::numbers::pi)) < tol) return true;
    if (std::abs(wrap_pi(xi2 - xi1 - std::numbers::pi)) < tol) return true;
    if (std::abs(wrap_pi(xi2 - xi1 + std::numbers::pi)) < tol) return true;
    return false;
}

}  // namespace hexscat
