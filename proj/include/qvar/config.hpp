#pragma once

// Flat "key = value" configuration files ('#' comments), with environment
// overrides under the QVAR_ prefix (QVAR_THETA overrides theta, and so on).

#include <cstdlib>
#include <istream>
#include <map>
#include <string>

#include "qvar/variance.hpp"

namespace qvar {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::map<std::string, std::string> parse_config_text(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value",
                              "syntax");
        std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config: empty key or value at line " + std::to_string(lineno),
                              "syntax");
        kv[key] = val;
    }
    return kv;
}

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "K",    "theta",  "X",     "eps",    "eps0",          "eps1",
        "eps2", "l",      "c_max", "seed",   "tol_two_route", "tail_target",
        "threads", "A",   "B",     "C"};
    return keys;
}

/// QVAR_<KEY> environment variables override file values.
inline void apply_env_overrides(std::map<std::string, std::string>& kv,
                                const std::string& prefix = "QVAR_") {
    for (const auto& key : config_keys()) {
        std::string env = prefix;
        for (char ch : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = std::getenv(env.c_str())) kv[key] = v;
    }
}

/// Rational with denominator dividing 2, returned as twice its value:
/// "3" -> 6, "1/2" -> 1, "-5/2" -> -5.
inline std::int64_t parse_twice_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return 2 * std::stoll(trim(s));
        std::int64_t num = std::stoll(trim(s.substr(0, slash)));
        std::int64_t den = std::stoll(trim(s.substr(slash + 1)));
        if (den == 2) return num;
        if (den == 1) return 2 * num;
        if (den == -2) return -num;
        if (den == -1) return -2 * num;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
    }
    throw ConfigError("config: '" + s + "' is not an integer or half-integer", "poly");
}

struct VarianceRunSpec {
    ExperimentConfig cfg;
    std::int64_t poly_a2 = 2, poly_b2 = 2, poly_c = 1;  // default x^2 + x + 1

    QuadraticPoly poly() const { return QuadraticPoly(poly_a2, poly_b2, poly_c); }
};

inline VarianceRunSpec variance_spec_from(const std::map<std::string, std::string>& kv) {
    VarianceRunSpec spec;
    auto want_double = [&](const std::string& key, double& slot) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            slot = std::stod(it->second);
        } catch (...) {
            throw ConfigError("config: bad numeric value for " + key, key);
        }
    };
    for (const auto& [key, val] : kv) {
        bool known = false;
        for (const auto& k : config_keys()) known |= (k == key);
        if (!known) throw ConfigError("config: unknown key '" + key + "'", key);
        (void)val;
    }
    want_double("K", spec.cfg.K);
    want_double("theta", spec.cfg.theta);
    want_double("X", spec.cfg.X);
    want_double("eps", spec.cfg.eps);
    want_double("eps0", spec.cfg.eps0);
    want_double("eps1", spec.cfg.eps1);
    want_double("eps2", spec.cfg.eps2);
    want_double("l", spec.cfg.l);
    want_double("tol_two_route", spec.cfg.tol_two_route);
    want_double("tail_target", spec.cfg.tail_target);
    if (auto it = kv.find("c_max"); it != kv.end()) spec.cfg.c_max = std::stoll(it->second);
    if (auto it = kv.find("seed"); it != kv.end())
        spec.cfg.seed = static_cast<std::uint64_t>(std::stoull(it->second));
    if (auto it = kv.find("threads"); it != kv.end()) spec.cfg.threads = std::stoi(it->second);
    if (auto it = kv.find("A"); it != kv.end()) spec.poly_a2 = parse_twice_rational(it->second);
    if (auto it = kv.find("B"); it != kv.end()) spec.poly_b2 = parse_twice_rational(it->second);
    if (auto it = kv.find("C"); it != kv.end()) {
        std::int64_t c2 = parse_twice_rational(it->second);
        if (c2 % 2 != 0) throw ConfigError("config: C must be an integer", "C");
        spec.poly_c = c2 / 2;
    }
    spec.cfg.validate();
    return spec;
}

}  // namespace qvar
