#pragma once

// Classical Kloosterman sums S(m,n;c) and the quadratic-polynomial-twisted
// double sums
//
//   S_c^{B,C}(gamma) = sum_{a,b mod c} S(|q(a)|,|q(b)|;c)
//                      * e_c(2*gamma*a*b + a(B+u) + b(B+v)),   q(t)=gamma*t^2+B*t+C,
//
// together with their multiplicative relation, Gauss-sum closed form,
// vanishing criterion and bound envelopes.

#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "qvar/arith.hpp"
#include "qvar/numeric.hpp"

namespace qvar {

namespace detail {

// units mod c with their inverses
struct UnitTable {
    std::vector<int64_t> unit, inverse;
    explicit UnitTable(int64_t c) {
        for (int64_t x = 0; x < c; ++x) {
            if (std::gcd(x, c) != 1 && c != 1) continue;
            unit.push_back(x);
            inverse.push_back(c == 1 ? 0 : mod_inverse(x, c).value);
        }
    }
};

}  // namespace detail

/// S(m,n;c) = sum over x coprime to c of e((m x + n xbar)/c). Always real;
/// the accumulated imaginary part is asserted below 1e-9*c as a bug detector.
inline double kloosterman_sum(int64_t m, int64_t n, int64_t c) {
    if (c < 1) throw std::invalid_argument("kloosterman_sum: c must be >= 1");
    auto tab = unit_roots(c);
    detail::UnitTable units(c);
    int64_t mr = mod_reduce(m, c), nr = mod_reduce(n, c);
    std::vector<cplx> terms;
    terms.reserve(units.unit.size());
    for (std::size_t i = 0; i < units.unit.size(); ++i) {
        int64_t idx = mod_reduce(mul_mod(mr, units.unit[i], c) + mul_mod(nr, units.inverse[i], c), c);
        terms.push_back(tab->at_reduced(idx));
    }
    cplx s = pairwise_sum(terms);
    if (std::abs(s.imag()) >= 1e-9 * static_cast<double>(c))
        throw std::runtime_error("kloosterman_sum: imaginary residual exceeds 1e-9*c");
    return s.real();
}

/// Weil envelope sqrt(gcd(m,n,c)) * sqrt(c) * tau(c).
inline double weil_envelope(int64_t m, int64_t n, int64_t c) {
    if (c < 1) throw std::invalid_argument("weil_envelope: c must be >= 1");
    int64_t g = std::gcd(std::gcd(std::llabs(m), std::llabs(n)), c);
    if (g == 0) g = c;  // m = n = 0
    return std::sqrt(static_cast<double>(g)) * std::sqrt(static_cast<double>(c)) *
           static_cast<double>(divisor_count(c));
}

/// S(m,n;c) for all 1 <= m <= m_max, 1 <= n <= n_max in one units scan,
/// row-major by m. Reality asserted per entry.
inline std::vector<double> kloosterman_row(int64_t c, int64_t m_max, int64_t n_max) {
    auto tab = unit_roots(c);
    detail::UnitTable units(c);
    std::vector<cplx> acc(static_cast<size_t>(m_max * n_max), cplx(0.0));
    for (std::size_t i = 0; i < units.unit.size(); ++i) {
        int64_t x = units.unit[i], xi = units.inverse[i];
        int64_t mx = 0;
        for (int64_t m = 1; m <= m_max; ++m) {
            mx += x; if (mx >= c) mx -= c;
            int64_t idx = mx;
            cplx* row = acc.data() + static_cast<size_t>((m - 1) * n_max);
            for (int64_t n = 1; n <= n_max; ++n) {
                idx += xi; if (idx >= c) idx -= c;
                row[n - 1] += tab->at_reduced(idx);
            }
        }
    }
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (std::abs(acc[i].imag()) >= 1e-9 * static_cast<double>(c))
            throw std::runtime_error("kloosterman_row: imaginary residual exceeds 1e-9*c");
        out[i] = acc[i].real();
    }
    return out;
}

// Parameters (gamma, B, C, u, v, c) of the twisted sum; raw values kept
// alongside their reductions mod c.
struct TwistedSumParams {
    int64_t gamma = 1, B = 0, C = 0, u = 0, v = 0, c = 1;
    int64_t gamma_mod = 0, B_mod = 0, C_mod = 0, u_mod = 0, v_mod = 0;

    TwistedSumParams() { reduce(); }
    TwistedSumParams(int64_t gamma_, int64_t B_, int64_t C_, int64_t u_, int64_t v_, int64_t c_)
        : gamma(gamma_), B(B_), C(C_), u(u_), v(v_), c(c_) {
        if (c < 1) throw std::invalid_argument("TwistedSumParams: c must be >= 1");
        reduce();
    }
    void reduce() {
        gamma_mod = mod_reduce(gamma, c);
        B_mod = mod_reduce(B, c);
        C_mod = mod_reduce(C, c);
        u_mod = mod_reduce(u, c);
        v_mod = mod_reduce(v, c);
    }
};

namespace detail {

// |q(a)| as an exact integer for a in [0, c)
inline std::vector<int64_t> abs_poly_values(const TwistedSumParams& p) {
    std::vector<int64_t> q(static_cast<size_t>(p.c));
    for (int64_t a = 0; a < p.c; ++a) {
        int64_t val = checked_mul(p.gamma, checked_mul(a, a)) + checked_mul(p.B, a) + p.C;
        q[static_cast<size_t>(a)] = std::llabs(val);
    }
    return q;
}

// Kloosterman values S(q[a] mod c, q[b] mod c; c) keyed by residue class of
// the polynomial values, so repeated classes are computed once.
struct KloostermanCache {
    std::vector<int> cls;              // a -> class index
    std::vector<cplx> table;           // class-pair -> S value (real, kept complex for the assert)
    std::size_t nclasses = 0;

    KloostermanCache(const std::vector<int64_t>& qvals, int64_t c, const UnitTable& units,
                     const UnitRootTable& roots) {
        std::vector<int64_t> distinct;
        std::map<int64_t, int> index;
        cls.resize(qvals.size());
        for (std::size_t a = 0; a < qvals.size(); ++a) {
            int64_t r = mod_reduce(qvals[a], c);
            auto [it, fresh] = index.emplace(r, static_cast<int>(distinct.size()));
            if (fresh) distinct.push_back(r);
            cls[a] = it->second;
        }
        nclasses = distinct.size();
        table.assign(nclasses * nclasses, cplx(0.0));
        for (std::size_t i = 0; i < units.unit.size(); ++i) {
            int64_t x = units.unit[i], xi = units.inverse[i];
            for (std::size_t ma = 0; ma < nclasses; ++ma) {
                int64_t mx = mul_mod(distinct[ma], x, c);
                for (std::size_t nb = 0; nb < nclasses; ++nb) {
                    int64_t idx = mx + mul_mod(distinct[nb], xi, c);
                    if (idx >= c) idx -= c;
                    table[ma * nclasses + nb] += roots.at_reduced(idx);
                }
            }
        }
        for (auto& s : table)
            if (std::abs(s.imag()) >= 1e-9 * static_cast<double>(c))
                throw std::runtime_error("twisted sum: Kloosterman imaginary residual exceeds 1e-9*c");
    }
    cplx at(std::size_t a, std::size_t b) const {
        return table[static_cast<std::size_t>(cls[a]) * nclasses + cls[b]];
    }
};

}  // namespace detail

/// Definitional evaluation of S_c^{B,C}(gamma); Kloosterman values cached by
/// residue-class pairs of the polynomial values.
inline cplx twisted_sum_direct(const TwistedSumParams& p) {
    int64_t c = p.c;
    auto roots = unit_roots(c);
    detail::UnitTable units(c);
    auto qvals = detail::abs_poly_values(p);
    detail::KloostermanCache kl(qvals, c, units, *roots);

    int64_t bu = mod_reduce(p.B_mod + p.u_mod, c);
    int64_t bv = mod_reduce(p.B_mod + p.v_mod, c);
    int64_t two_gamma = mod_reduce(2 * p.gamma_mod, c);
    std::vector<cplx> rows(static_cast<size_t>(c));
    for (int64_t a = 0; a < c; ++a) {
        cplx row = 0.0;
        int64_t base = mul_mod(a, bu, c);
        int64_t step = mul_mod(two_gamma, a, c);  // phase advances by step + bv per b
        int64_t idx = base;
        for (int64_t b = 0; b < c; ++b) {
            row += kl.at(static_cast<size_t>(a), static_cast<size_t>(b)) * roots->at_reduced(idx);
            idx += step + bv;
            if (idx >= c) idx -= c;
            if (idx >= c) idx -= c;
        }
        rows[static_cast<size_t>(a)] = row;
    }
    return pairwise_sum(rows);
}

/// Closed form for gcd(4*gamma,c)=1 (forces c odd): the a-sum collapses to a
/// quadratic Gauss sum and the b-sum to c*[v = xbar*u mod c], leaving one
/// scan over units x.
inline cplx twisted_sum_gauss(const TwistedSumParams& p) {
    int64_t c = p.c;
    if (std::gcd(mod_reduce(4 * p.gamma, c), c) != 1 || c % 2 == 0)
        throw std::domain_error("twisted_sum_gauss: requires gcd(4*gamma, c) = 1");
    auto roots = unit_roots(c);
    detail::UnitTable units(c);
    int64_t i4g = c == 1 ? 0 : mod_inverse(4 * p.gamma_mod, c).value;
    int64_t i2g = c == 1 ? 0 : mod_inverse(2 * p.gamma_mod, c).value;
    int64_t bu = mod_reduce(p.B_mod + p.u_mod, c);
    // e_c exponent: (C - i4g*B^2) x + (C - i4g*(B+u)^2) xbar - i2g*B*(B+u)
    int64_t cx = mod_reduce(p.C_mod - mul_mod(i4g, mul_mod(p.B_mod, p.B_mod, c), c), c);
    int64_t cxi = mod_reduce(p.C_mod - mul_mod(i4g, mul_mod(bu, bu, c), c), c);
    int64_t c0 = mod_reduce(-mul_mod(i2g, mul_mod(p.B_mod, bu, c), c), c);
    std::vector<cplx> terms;
    for (std::size_t i = 0; i < units.unit.size(); ++i) {
        int64_t x = units.unit[i], xi = units.inverse[i];
        if (mod_reduce(p.v_mod - mul_mod(xi, p.u_mod, c), c) != 0) continue;  // b-sum vanishes
        int64_t idx = mod_reduce(mul_mod(cx, x, c) + mul_mod(cxi, xi, c) + c0, c);
        terms.push_back(static_cast<double>(jacobi_symbol(x, c)) * roots->at_reduced(idx) *
                        static_cast<double>(c));
    }
    cplx eps = (c % 4 == 1) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    cplx front = eps * std::sqrt(static_cast<double>(c)) *
                 static_cast<double>(jacobi_symbol(p.gamma_mod, c));
    return front * pairwise_sum(terms);
}

/// |S_{c1 c2} - S_{c1}^{B,C d2}(gamma c2) * S_{c2}^{B,C d1}(gamma c1)| with
/// u,v carried unchanged into both factors.
inline double twisted_multiplicativity_residual(const TwistedSumParams& p, int64_t c1, int64_t c2) {
    if (c1 < 1 || c2 < 1 || checked_mul(c1, c2) != p.c)
        throw std::invalid_argument("twisted multiplicativity: need c = c1*c2");
    if (std::gcd(c1, c2) != 1)
        throw std::domain_error("twisted multiplicativity: split must be coprime");
    int64_t d1 = mod_inverse(c1, c2).value;  // c1 d1 = 1 (mod c2)
    int64_t d2 = mod_inverse(c2, c1).value;  // c2 d2 = 1 (mod c1)
    cplx lhs = twisted_sum_direct(p);
    cplx f1 = twisted_sum_direct(TwistedSumParams(checked_mul(p.gamma, c2), p.B,
                                                  checked_mul(p.C, d2), p.u, p.v, c1));
    cplx f2 = twisted_sum_direct(TwistedSumParams(checked_mul(p.gamma, c1), p.B,
                                                  checked_mul(p.C, d1), p.u, p.v, c2));
    return std::abs(lhs - f1 * f2);
}

enum class VanishClass { vanishes_proven, vanishes_numeric, nonzero };

struct VanishingWitness {
    VanishClass cls;
    double magnitude;  // |S_c^{B,C}(gamma)|
    double scale;      // 1e-6 * c^2
};

/// Prop-2.34 classification: the sum provably vanishes when gcd(4c,gamma)=1
/// and (v,c) does not divide u; anything else is classified numerically.
inline VanishingWitness vanishing_witness(const TwistedSumParams& p) {
    double mag = std::abs(twisted_sum_direct(p));
    double scale = 1e-6 * static_cast<double>(p.c) * static_cast<double>(p.c);
    int64_t gv = std::gcd(p.v_mod, p.c);
    if (gv == 0) gv = p.c;
    bool criterion = std::gcd(4 * p.c, std::llabs(p.gamma)) == 1 && (p.u_mod % gv != 0);
    if (criterion) {
        if (mag >= scale)
            throw std::logic_error("vanishing_witness: Prop 2.34 case failed to vanish numerically");
        return {VanishClass::vanishes_proven, mag, scale};
    }
    return {mag < scale ? VanishClass::vanishes_numeric : VanishClass::nonzero, mag, scale};
}

struct BoundReport {
    double observed = 0.0;   // |S|
    double reference = 1.0;  // envelope without implied constant
    double ratio = 0.0;
    TwistedSumParams params;
    int64_t c1 = 1, c2 = 1;
    bool vanishing_branch = false;  // (v,c1) does not divide u
};

namespace detail {

inline BoundReport bound_report_impl(const TwistedSumParams& p, int64_t radical_m, double eps0) {
    auto [c1, c2] = split_by_radical(p.c, radical_m);
    BoundReport r;
    r.params = p;
    r.c1 = c1;
    r.c2 = c2;
    int64_t gv = std::gcd(mod_reduce(p.v, c1), c1);
    if (gv == 0) gv = c1;
    r.vanishing_branch = (mod_reduce(p.u, c1) % gv != 0);
    r.observed = std::abs(twisted_sum_direct(p));
    r.reference = static_cast<double>(gv) * std::pow(static_cast<double>(c1), 1.5) *
                  std::pow(static_cast<double>(c2), 2.5 + eps0);
    r.ratio = r.observed / r.reference;
    return r;
}

}  // namespace detail

/// Empirical measurement against the Lemma-2.26 envelope
/// gcd(v,c1) * c1^{3/2} * c2^{5/2+eps0} with c = c1*c2 split on the radical
/// of 4*gamma and eps0 = 0.01 fixed.
inline BoundReport bound_report(const TwistedSumParams& p) {
    return detail::bound_report_impl(p, std::llabs(checked_mul(4, p.gamma)), 0.01);
}

// --- half-integer coefficients -------------------------------------------
//
// Integer-valued q with gamma = A2/2, B = B2/2 (A2, B2 odd). For odd c the
// denominator 2 is inverted mod c; for even c the caller halves the modulus
// against doubled coefficients (Lemma 2.26 proof: c = 2c').

/// Reduction of half-integer coefficients to TwistedSumParams for odd c.
inline TwistedSumParams twisted_params_halfint(int64_t A2, int64_t B2, int64_t C, int64_t u,
                                               int64_t v, int64_t c) {
    if (A2 % 2 == 0 && B2 % 2 == 0)
        return TwistedSumParams(A2 / 2, B2 / 2, C, u, v, c);
    if ((A2 & 1) != (B2 & 1))
        throw std::invalid_argument("twisted halfint: q not integer valued (need A2+B2 even)");
    if (c % 2 == 0)
        throw std::domain_error(
            "twisted halfint: even c requires the halved form S_{c/2}^{2B,C}(2A)");
    int64_t i2 = mod_inverse(2, c).value;
    return TwistedSumParams(mul_mod(mod_reduce(A2, c), i2, c), mul_mod(mod_reduce(B2, c), i2, c),
                            C, u, v, c);
}

/// S_c^{B,C}(A) for half-integer A = A2/2, B = B2/2; dispatches on parity of c.
inline cplx twisted_sum_halfint(int64_t A2, int64_t B2, int64_t C, int64_t u, int64_t v,
                                int64_t c) {
    if (A2 % 2 != 0 && c % 2 == 0)  // halve the modulus against doubled coefficients
        return twisted_sum_direct(TwistedSumParams(A2, B2, C, u, v, c / 2));
    return twisted_sum_direct(twisted_params_halfint(A2, B2, C, u, v, c));
}

/// Lemma-2.26 envelope for the half-integer family; the radical split uses
/// the true 4*gamma = 2*A2.
inline BoundReport bound_report_halfint(int64_t A2, int64_t B2, int64_t C, int64_t u, int64_t v,
                                        int64_t c) {
    int64_t m = std::llabs(checked_mul(2, A2));
    if (A2 % 2 != 0 && c % 2 == 0) {
        auto [c1, c2] = split_by_radical(c, m);
        BoundReport r = detail::bound_report_impl(TwistedSumParams(A2, B2, C, u, v, c / 2),
                                                  m, 0.01);
        // observed comes from the halved evaluation; envelope keeps the true c split
        int64_t gv = std::gcd(mod_reduce(v, c1), c1);
        if (gv == 0) gv = c1;
        r.c1 = c1;
        r.c2 = c2;
        r.vanishing_branch = (mod_reduce(u, c1) % gv != 0);
        r.reference = static_cast<double>(gv) * std::pow(static_cast<double>(c1), 1.5) *
                      std::pow(static_cast<double>(c2), 2.5 + 0.01);
        r.ratio = r.observed / r.reference;
        return r;
    }
    return detail::bound_report_impl(twisted_params_halfint(A2, B2, C, u, v, c), m, 0.01);
}

// --- full (u,v) grids ------------------------------------------------------
//
// S_c^{B,C}(gamma) as a function of (u,v) is a two-dimensional DFT of
// M[a][b] = S(|q(a)|,|q(b)|;c) e_c(2 gamma a b + B(a+b)); both exhaustive
// verification suites read entire grids off one O(c^3) transform.

/// Row-major c*c grid indexed by [u*c + v], definitional route.
inline std::vector<cplx> twisted_sum_grid(int64_t gamma, int64_t B, int64_t C, int64_t c) {
    TwistedSumParams base(gamma, B, C, 0, 0, c);
    auto roots = unit_roots(c);
    detail::UnitTable units(c);
    auto qvals = detail::abs_poly_values(base);
    detail::KloostermanCache kl(qvals, c, units, *roots);
    std::size_t n = static_cast<size_t>(c);

    std::vector<cplx> m(n * n);
    for (int64_t a = 0; a < c; ++a)
        for (int64_t b = 0; b < c; ++b) {
            int64_t ph = mod_reduce(2 * mul_mod(base.gamma_mod, mul_mod(a, b, c), c) +
                                    mul_mod(base.B_mod, mod_reduce(a + b, c), c), c);
            m[static_cast<size_t>(a) * n + static_cast<size_t>(b)] =
                kl.at(static_cast<size_t>(a), static_cast<size_t>(b)) * roots->at_reduced(ph);
        }
    // rows: F1[a][v] = sum_b M[a][b] e_c(bv)
    std::vector<cplx> f1(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (int64_t v = 0; v < c; ++v) {
            cplx s = 0.0;
            int64_t idx = 0;
            for (int64_t b = 0; b < c; ++b) {
                s += m[a * n + static_cast<size_t>(b)] * roots->at_reduced(idx);
                idx += v; if (idx >= c) idx -= c;
            }
            f1[a * n + static_cast<size_t>(v)] = s;
        }
    // columns: G[u][v] = sum_a F1[a][v] e_c(au)
    std::vector<cplx> g(n * n);
    for (int64_t u = 0; u < c; ++u)
        for (std::size_t v = 0; v < n; ++v) {
            cplx s = 0.0;
            int64_t idx = 0;
            for (int64_t a = 0; a < c; ++a) {
                s += f1[static_cast<size_t>(a) * n + v] * roots->at_reduced(idx);
                idx += u; if (idx >= c) idx -= c;
            }
            g[static_cast<size_t>(u) * n + v] = s;
        }
    return g;
}

/// Same grid through the Prop-2.33 closed form; requires gcd(4*gamma,c)=1.
inline std::vector<cplx> twisted_sum_gauss_grid(int64_t gamma, int64_t B, int64_t C, int64_t c) {
    if (std::gcd(mod_reduce(4 * gamma, c), c) != 1 || c % 2 == 0)
        throw std::domain_error("twisted_sum_gauss_grid: requires gcd(4*gamma, c) = 1");
    auto roots = unit_roots(c);
    detail::UnitTable units(c);
    std::size_t n = static_cast<size_t>(c);
    int64_t gm = mod_reduce(gamma, c), Bm = mod_reduce(B, c), Cm = mod_reduce(C, c);
    int64_t i4g = c == 1 ? 0 : mod_inverse(4 * gm, c).value;
    int64_t i2g = c == 1 ? 0 : mod_inverse(2 * gm, c).value;
    cplx eps = (c % 4 == 1) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    cplx front = eps * std::sqrt(static_cast<double>(c)) *
                 static_cast<double>(jacobi_symbol(gm, c)) * static_cast<double>(c);
    int64_t cxB = mod_reduce(Cm - mul_mod(i4g, mul_mod(Bm, Bm, c), c), c);
    std::vector<cplx> g(n * n, cplx(0.0));
    for (int64_t u = 0; u < c; ++u) {
        int64_t bu = mod_reduce(Bm + u, c);
        int64_t cxi = mod_reduce(Cm - mul_mod(i4g, mul_mod(bu, bu, c), c), c);
        int64_t c0 = mod_reduce(-mul_mod(i2g, mul_mod(Bm, bu, c), c), c);
        for (std::size_t i = 0; i < units.unit.size(); ++i) {
            int64_t x = units.unit[i], xi = units.inverse[i];
            int64_t v = mul_mod(xi, u, c);
            int64_t idx = mod_reduce(mul_mod(cxB, x, c) + mul_mod(cxi, xi, c) + c0, c);
            g[static_cast<size_t>(u) * n + static_cast<size_t>(v)] +=
                front * static_cast<double>(jacobi_symbol(x, c)) * roots->at_reduced(idx);
        }
    }
    return g;
}

}  // namespace qvar
