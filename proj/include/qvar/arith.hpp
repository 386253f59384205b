#pragma once

// Exact modular arithmetic, multiplicative number theory, and root-of-unity
// tables shared by every exponential-sum kernel.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qvar {

using cplx = std::complex<double>;
using std::int64_t;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Least nonnegative residue of a mod c.
inline int64_t mod_reduce(int64_t a, int64_t c) {
    int64_t r = a % c;
    return r < 0 ? r + c : r;
}

/// a*b mod c through a 128-bit widening multiply; exact for all 64-bit inputs.
inline int64_t mul_mod(int64_t a, int64_t b, int64_t c) {
    return static_cast<int64_t>(static_cast<__int128>(a) * b % c);
}

/// a*b with overflow detection.
inline int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("checked_mul: 64-bit overflow");
    return r;
}

// A residue with its modulus attached; value always in [0, c).
struct Residue {
    int64_t value = 0;
    int64_t modulus = 1;

    Residue() = default;
    Residue(int64_t v, int64_t c) : modulus(c) {
        if (c < 1) throw std::invalid_argument("Residue: modulus must be >= 1");
        value = mod_reduce(v, c);
    }
    friend bool operator==(const Residue&, const Residue&) = default;
};

struct Factorization {
    int64_t n = 1;
    std::vector<std::pair<int64_t, int>> factors;  // primes strictly increasing
};

/// Trial division up to sqrt(n). Fine at desk scale; not a general sieve.
inline Factorization factorize(int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    Factorization f;
    f.n = n;
    for (int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.factors.emplace_back(p, e);
    }
    if (n > 1) f.factors.emplace_back(n, 1);
    return f;
}

/// tau(n), the number of divisors.
inline int64_t divisor_count(int64_t n) {
    int64_t t = 1;
    for (auto [p, e] : factorize(n).factors) t *= e + 1;
    return t;
}

/// Euler phi(n).
inline int64_t euler_phi(int64_t n) {
    int64_t r = n;
    for (auto [p, e] : factorize(n).factors) r -= r / p;
    return r;
}

/// Multiplicative inverse of a mod c; throws when gcd(a,c) > 1.
inline Residue mod_inverse(int64_t a, int64_t c) {
    if (c < 1) throw std::invalid_argument("mod_inverse: modulus must be >= 1");
    if (c == 1) return Residue(0, 1);
    int64_t r0 = c, r1 = mod_reduce(a, c), s0 = 0, s1 = 1;
    while (r1 != 0) {
        int64_t q = r0 / r1;
        r0 -= q * r1; std::swap(r0, r1);
        s0 -= q * s1; std::swap(s0, s1);
    }
    if (r0 != 1) throw std::domain_error("mod_inverse: value not invertible");
    return Residue(s0, c);
}

/// CRT lift: the residue mod c1*c2 matching a1 mod c1 and a2 mod c2,
/// written as a1*c2*d2 + a2*c1*d1 with c1*d1 = 1 (mod c2), c2*d2 = 1 (mod c1).
inline Residue crt_lift(const Residue& a1, const Residue& a2) {
    int64_t c1 = a1.modulus, c2 = a2.modulus;
    if (std::gcd(c1, c2) != 1)
        throw std::domain_error("crt_lift: moduli not coprime");
    int64_t c = checked_mul(c1, c2);
    int64_t d1 = mod_inverse(c1, c2).value;
    int64_t d2 = mod_inverse(c2, c1).value;
    int64_t v = mod_reduce(mul_mod(mul_mod(a1.value, c2, c), d2, c) +
                           mul_mod(mul_mod(a2.value, c1, c), d1, c), c);
    return Residue(v, c);
}

/// Jacobi symbol (n/c) for odd c >= 1; 0 iff gcd(n,c) > 1.
inline int jacobi_symbol(int64_t n, int64_t c) {
    if (c < 1 || c % 2 == 0)
        throw std::invalid_argument("jacobi_symbol: modulus must be odd and positive");
    n = mod_reduce(n, c);
    int result = 1;
    while (n != 0) {
        while (n % 2 == 0) {
            n /= 2;
            if (c % 8 == 3 || c % 8 == 5) result = -result;
        }
        std::swap(n, c);
        if (n % 4 == 3 && c % 4 == 3) result = -result;
        n %= c;
    }
    return c == 1 ? result : 0;
}

// Precomputed c-th roots of unity, one trig call per entry. Read-only after
// construction, so safe to share across threads.
class UnitRootTable {
  public:
    explicit UnitRootTable(int64_t c) : c_(c), w_(static_cast<size_t>(c)) {
        if (c < 1) throw std::invalid_argument("UnitRootTable: modulus must be >= 1");
        for (int64_t j = 0; j < c; ++j)
            w_[static_cast<size_t>(j)] =
                std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(c));
    }
    cplx at(int64_t j) const { return w_[static_cast<size_t>(mod_reduce(j, c_))]; }
    // j must already be in [0, c)
    cplx at_reduced(int64_t j) const { return w_[static_cast<size_t>(j)]; }
    int64_t modulus() const { return c_; }

  private:
    int64_t c_;
    std::vector<cplx> w_;
};

/// Process-wide table cache. Single-writer construction under a mutex,
/// concurrent reads afterwards through the shared_ptr.
inline std::shared_ptr<const UnitRootTable> unit_roots(int64_t c) {
    static std::mutex mu;
    static std::map<int64_t, std::shared_ptr<const UnitRootTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(c);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const UnitRootTable>(c);
    cache.emplace(c, table);
    return table;
}

/// e(numerator/c) = exp(2*pi*i*numerator/c), drawn from the per-modulus table.
inline cplx e_frac(int64_t numerator, int64_t c) {
    if (c < 1) throw std::invalid_argument("e_frac: modulus must be >= 1");
    return unit_roots(c)->at(numerator);
}

enum class GaussMethod { direct, closed_form };

/// Quadratic Gauss sum over a full residue system: sum_t e_c(n t^2).
inline cplx gauss_sum_direct(int64_t n, int64_t c) {
    if (c < 1) throw std::invalid_argument("gauss_sum: modulus must be >= 1");
    auto tab = unit_roots(c);
    cplx s = 0.0;
    for (int64_t t = 0; t < c; ++t) s += tab->at_reduced(mul_mod(mul_mod(t, t, c), mod_reduce(n, c), c));
    return s;
}

/// Closed form (n/c) eps_c sqrt(c) for odd c with gcd(n,c)=1;
/// eps_c = 1 for c = 1 (mod 4), i for c = 3 (mod 4). Even c is rejected.
inline cplx gauss_sum_closed(int64_t n, int64_t c) {
    if (c < 1 || c % 2 == 0)
        throw std::invalid_argument("gauss_sum closed form: modulus must be odd");
    if (std::gcd(mod_reduce(n, c), c) != 1)
        throw std::domain_error("gauss_sum closed form: gcd(n,c) > 1");
    cplx eps = (c % 4 == 1) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    return static_cast<double>(jacobi_symbol(n, c)) * eps * std::sqrt(static_cast<double>(c));
}

inline cplx gauss_sum(int64_t n, int64_t c, GaussMethod method) {
    return method == GaussMethod::direct ? gauss_sum_direct(n, c) : gauss_sum_closed(n, c);
}

/// Split c = c1*c2 where every prime of c2 divides m and gcd(c1, m) = 1.
inline std::pair<int64_t, int64_t> split_by_radical(int64_t c, int64_t m) {
    if (c < 1) throw std::invalid_argument("split_by_radical: c must be >= 1");
    int64_t c1 = c, c2 = 1;
    int64_t g = std::gcd(c1, m);
    while (g > 1) {
        while (c1 % g == 0) { c1 /= g; c2 *= g; }
        g = std::gcd(c1, g);
    }
    return {c1, c2};
}

}  // namespace qvar
