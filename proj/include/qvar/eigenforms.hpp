#pragma once

// Level-1 Hecke eigenforms at desk scale. The one-dimensional weights
// {12, 16, 18, 20, 22, 26} are generated internally from Delta and
// Eisenstein products with exact integer coefficients; other levels enter
// through CSV ingestion, gated by the same invariants (a(1) = 1, Deligne
// bound at primes, exact Hecke relations).

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "qvar/qexp.hpp"

namespace qvar {

struct EigenformData {
    std::int64_t level = 1;
    int weight = 12;
    std::vector<BigInt> a;  // a[0] unused, a[1..n_max]
    double omega = 0.0;     // harmonic weight; 0 = not yet calibrated

    std::size_t n_max() const { return a.empty() ? 0 : a.size() - 1; }

    /// lambda(n) = a(n) / n^{(k-1)/2}
    double lambda(std::int64_t n) const {
        if (n < 1 || static_cast<std::size_t>(n) > n_max())
            throw std::out_of_range("EigenformData::lambda: n outside coefficient range");
        double num = mpz_get_d(a[static_cast<std::size_t>(n)].get_mpz_t());
        return num / std::pow(static_cast<double>(n), 0.5 * (weight - 1));
    }
};

inline bool weight_supported(int k) {
    return k == 12 || k == 16 || k == 18 || k == 20 || k == 22 || k == 26;
}

/// dim S_k(SL_2(Z)) for integer k (0 unless k even and >= 12).
inline int dim_cusp_forms_level1(int k) {
    if (k < 12 || k % 2 != 0) return 0;
    int d = (k % 12 == 2) ? k / 12 - 1 : k / 12;
    return d < 0 ? 0 : d;
}

/// a(m)a(n) - sum_{d | (m,n)} d^{k-1} a(mn/d^2), in exact integers.
inline BigInt hecke_relation_residual(const EigenformData& f, std::int64_t m, std::int64_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("hecke_relation_residual: need m, n >= 1");
    if (std::gcd(m * n, f.level) != 1)
        throw std::domain_error("hecke_relation_residual: requires gcd(mn, level) = 1");
    if (static_cast<std::size_t>(m * n) > f.n_max())
        throw std::out_of_range("hecke_relation_residual: insufficient truncation (need mn <= n_max)");
    BigInt lhs = f.a[static_cast<std::size_t>(m)] * f.a[static_cast<std::size_t>(n)];
    std::int64_t g = std::gcd(m, n);
    for (std::int64_t d = 1; d <= g; ++d) {
        if (g % d) continue;
        BigInt dk;
        mpz_ui_pow_ui(dk.get_mpz_t(), static_cast<unsigned long>(d),
                      static_cast<unsigned long>(f.weight - 1));
        lhs -= dk * f.a[static_cast<std::size_t>(m / d * (n / d))];
    }
    return abs(lhs);
}

namespace detail {

inline bool deligne_ok(const EigenformData& f, std::int64_t p) {
    // |lambda(p)| <= 2  <=>  a(p)^2 <= 4 p^{k-1}, checked in exact integers
    BigInt lhs = f.a[static_cast<std::size_t>(p)] * f.a[static_cast<std::size_t>(p)];
    BigInt rhs;
    mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(f.weight - 1));
    rhs *= 4;
    return lhs <= rhs;
}

inline std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<bool> sieve(static_cast<std::size_t>(n) + 1, true);
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p <= n; ++p) {
        if (!sieve[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (std::int64_t q = p * p; q <= n; q += p) sieve[static_cast<std::size_t>(q)] = false;
    }
    return out;
}

}  // namespace detail

struct EigenformRejected : std::runtime_error {
    std::int64_t offending_n;
    EigenformRejected(const std::string& what, std::int64_t n)
        : std::runtime_error(what), offending_n(n) {}
};

/// All load-time invariants: normalization, Deligne at primes away from the
/// level, exact Hecke relations on the available range.
inline void validate_eigenform(const EigenformData& f) {
    if (f.n_max() < 1 || f.a[1] != 1)
        throw EigenformRejected("eigenform data: a(1) != 1", 1);
    for (std::int64_t p : detail::primes_up_to(static_cast<std::int64_t>(f.n_max()))) {
        if (f.level % p == 0) continue;
        if (!detail::deligne_ok(f, p))
            throw EigenformRejected("eigenform data: Deligne bound fails at p = " +
                                        std::to_string(p), p);
    }
    for (std::int64_t m = 2; m * m <= static_cast<std::int64_t>(f.n_max()); ++m)
        for (std::int64_t n = m; m * n <= static_cast<std::int64_t>(f.n_max()); ++n) {
            if (std::gcd(m * n, f.level) != 1) continue;
            if (hecke_relation_residual(f, m, n) != 0)
                throw EigenformRejected("eigenform data: Hecke relation fails at (m,n) = (" +
                                            std::to_string(m) + "," + std::to_string(n) + ")",
                                        m * n);
        }
}

/// The normalized eigenform for the one-dimensional level-1 weights.
inline EigenformData eigenform(int weight, std::size_t n_max) {
    if (!weight_supported(weight))
        throw std::invalid_argument("eigenform: weight " + std::to_string(weight) +
                                    " is not a one-dimensional level-1 space");
    if (n_max < 1) throw std::invalid_argument("eigenform: n_max must be >= 1");
    QExpansion series = delta_qexp(n_max);
    switch (weight) {
        case 12: break;
        case 16: series = series.mul(eisenstein4(n_max)); break;
        case 18: series = series.mul(eisenstein6(n_max)); break;
        case 20: series = series.mul(eisenstein4(n_max)).mul(eisenstein4(n_max)); break;
        case 22: series = series.mul(eisenstein4(n_max)).mul(eisenstein6(n_max)); break;
        case 26:
            series = series.mul(eisenstein4(n_max)).mul(eisenstein4(n_max)).mul(eisenstein6(n_max));
            break;
        default: break;
    }
    EigenformData f;
    f.level = 1;
    f.weight = weight;
    f.a = series.coefficients();
    return f;
}

// --- CSV ingestion ---------------------------------------------------------
//
// Format (also produced by save_eigenvalues):
//   level,weight,n_max
//   1,12,100
//   n,a_n
//   1,1
//   2,-24
//   ...

inline void save_eigenvalues(const EigenformData& f, std::ostream& os) {
    os << "level,weight,n_max\n"
       << f.level << "," << f.weight << "," << f.n_max() << "\n"
       << "n,a_n\n";
    for (std::size_t n = 1; n <= f.n_max(); ++n) os << n << "," << f.a[n].get_str() << "\n";
}

inline EigenformData load_eigenvalues(std::istream& is) {
    auto next_line = [&](std::string& line) {
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line) || line != "level,weight,n_max")
        throw EigenformRejected("eigenvalue CSV: missing level,weight,n_max header", 0);
    if (!next_line(line)) throw EigenformRejected("eigenvalue CSV: missing metadata row", 0);

    EigenformData f;
    std::size_t n_max = 0;
    {
        std::istringstream ss(line);
        char c1, c2;
        if (!(ss >> f.level >> c1 >> f.weight >> c2 >> n_max) || c1 != ',' || c2 != ',')
            throw EigenformRejected("eigenvalue CSV: malformed metadata row: " + line, 0);
    }
    if (f.level < 1 || f.weight < 4 || f.weight % 2 != 0 || n_max < 1)
        throw EigenformRejected("eigenvalue CSV: invalid level/weight/n_max", 0);
    if (!next_line(line) || line != "n,a_n")
        throw EigenformRejected("eigenvalue CSV: missing n,a_n header", 0);

    f.a.assign(n_max + 1, BigInt(0));
    std::int64_t expected = 1;
    while (next_line(line)) {
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw EigenformRejected("eigenvalue CSV: malformed row: " + line, expected);
        std::int64_t n = 0;
        try {
            n = std::stoll(line.substr(0, comma));
        } catch (...) {
            throw EigenformRejected("eigenvalue CSV: malformed index: " + line, expected);
        }
        if (n != expected)
            throw EigenformRejected("eigenvalue CSV: rows must cover n = 1.." +
                                        std::to_string(n_max) + " in order; saw n = " +
                                        std::to_string(n), n);
        std::string digits = line.substr(comma + 1);
        if (mpz_set_str(f.a[static_cast<std::size_t>(n)].get_mpz_t(), digits.c_str(), 10) != 0)
            throw EigenformRejected("eigenvalue CSV: bad integer '" + digits + "'", n);
        ++expected;
    }
    if (expected != static_cast<std::int64_t>(n_max) + 1)
        throw EigenformRejected("eigenvalue CSV: missing rows (stopped at n = " +
                                    std::to_string(expected - 1) + ")", expected);
    validate_eigenform(f);
    return f;
}

}  // namespace qvar
