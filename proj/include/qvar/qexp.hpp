#pragma once

// Exact integer power-series arithmetic for q-expansions. Coefficients are
// GMP integers (tau(n) leaves 64-bit range quickly and weight-26 forms leave
// 128-bit range too); products go through a truncated Karatsuba, which is
// what makes coefficient ranges around 1e5 practical.

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qvar {

using BigInt = mpz_class;

namespace detail {

inline void mul_school(const BigInt* a, std::size_t na, const BigInt* b, std::size_t nb,
                       BigInt* c) {
    for (std::size_t i = 0; i < na; ++i) {
        if (mpz_sgn(a[i].get_mpz_t()) == 0) continue;
        for (std::size_t j = 0; j < nb; ++j)
            mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
}

// adds a*b into c (c must hold na+nb-1 entries)
inline void mul_rec(const BigInt* a, std::size_t na, const BigInt* b, std::size_t nb, BigInt* c) {
    if (na == 0 || nb == 0) return;
    if (std::min(na, nb) <= 32) {
        mul_school(a, na, b, nb, c);
        return;
    }
    std::size_t h = (std::max(na, nb) + 1) / 2;
    if (na <= h) {  // only b splits
        mul_rec(a, na, b, h, c);
        mul_rec(a, na, b + h, nb - h, c + h);
        return;
    }
    if (nb <= h) {
        mul_rec(a, h, b, nb, c);
        mul_rec(a + h, na - h, b, nb, c + h);
        return;
    }
    // balanced split: z0 = a0 b0, z2 = a1 b1, z1 = (a0+a1)(b0+b1) - z0 - z2
    std::size_t na1 = na - h, nb1 = nb - h;
    std::vector<BigInt> z0(2 * h - 1), z2(na1 + nb1 - 1);
    mul_rec(a, h, b, h, z0.data());
    mul_rec(a + h, na1, b + h, nb1, z2.data());

    std::vector<BigInt> sa(h), sb(h);
    for (std::size_t i = 0; i < h; ++i) {
        sa[i] = a[i];
        if (i < na1) sa[i] += a[h + i];
        sb[i] = b[i];
        if (i < nb1) sb[i] += b[h + i];
    }
    std::vector<BigInt> zm(2 * h - 1);
    mul_rec(sa.data(), h, sb.data(), h, zm.data());

    for (std::size_t i = 0; i < z0.size(); ++i) {
        c[i] += z0[i];
        zm[i] -= z0[i];
    }
    for (std::size_t i = 0; i < z2.size(); ++i) {
        c[2 * h + i] += z2[i];
        zm[i] -= z2[i];
    }
    for (std::size_t i = 0; i < zm.size(); ++i) c[h + i] += zm[i];
}

}  // namespace detail

// Truncated integer power series sum a_n q^n, n = 0..n_max. Arithmetic never
// mixes truncation lengths silently; mismatched operands are rejected.
class QExpansion {
  public:
    explicit QExpansion(std::size_t n_max) : a_(n_max + 1) {}

    static QExpansion one(std::size_t n_max) {
        QExpansion e(n_max);
        e.a_[0] = 1;
        return e;
    }

    /// prod_{n>=1} (1 - q^n) via Euler's pentagonal-number expansion.
    static QExpansion euler_product(std::size_t n_max) {
        QExpansion e(n_max);
        e.a_[0] = 1;
        for (long j = 1;; ++j) {
            long g1 = j * (3 * j - 1) / 2, g2 = j * (3 * j + 1) / 2;
            if (static_cast<std::size_t>(g1) > n_max) break;
            int sign = (j % 2 == 0) ? 1 : -1;
            e.a_[static_cast<std::size_t>(g1)] = sign;
            if (static_cast<std::size_t>(g2) <= n_max) e.a_[static_cast<std::size_t>(g2)] = sign;
        }
        return e;
    }

    std::size_t n_max() const { return a_.size() - 1; }
    const BigInt& operator[](std::size_t n) const { return a_.at(n); }
    BigInt& at(std::size_t n) { return a_.at(n); }
    const std::vector<BigInt>& coefficients() const { return a_; }

    QExpansion mul(const QExpansion& other) const {
        if (n_max() != other.n_max())
            throw std::invalid_argument("QExpansion::mul: truncation lengths differ");
        std::vector<BigInt> full(2 * n_max() + 1);
        detail::mul_rec(a_.data(), a_.size(), other.a_.data(), other.a_.size(), full.data());
        QExpansion out(n_max());
        for (std::size_t i = 0; i <= n_max(); ++i) out.a_[i] = std::move(full[i]);
        return out;
    }

    QExpansion pow(unsigned e) const {
        QExpansion result = one(n_max());
        QExpansion base = *this;
        while (e > 0) {
            if (e & 1u) result = result.mul(base);
            e >>= 1u;
            if (e) base = base.mul(base);
        }
        return result;
    }

    /// multiply by q^j
    QExpansion shifted(std::size_t j) const {
        QExpansion out(n_max());
        for (std::size_t i = j; i <= n_max(); ++i) out.a_[i] = a_[i - j];
        return out;
    }

  private:
    std::vector<BigInt> a_;
};

/// Delta = q prod (1-q^n)^24: 24th power of the pentagonal expansion by
/// repeated squaring, shifted by q. delta[n] = tau(n).
inline QExpansion delta_qexp(std::size_t n_max) {
    if (n_max < 1) throw std::invalid_argument("delta_qexp: n_max must be >= 1");
    QExpansion e = QExpansion::euler_product(n_max);
    return e.pow(24).shifted(1);
}

namespace detail {

// sum_{n>=1} sigma_e(n) q^n by a divisor sieve
inline QExpansion sigma_series(std::size_t n_max, unsigned e) {
    QExpansion s(n_max);
    for (std::size_t d = 1; d <= n_max; ++d) {
        BigInt dp;
        mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), e);
        for (std::size_t m = d; m <= n_max; m += d) s.at(m) += dp;
    }
    return s;
}

}  // namespace detail

/// E_4 = 1 + 240 sum sigma_3(n) q^n
inline QExpansion eisenstein4(std::size_t n_max) {
    QExpansion e = detail::sigma_series(n_max, 3);
    for (std::size_t n = 1; n <= n_max; ++n) e.at(n) *= 240;
    e.at(0) = 1;
    return e;
}

/// E_6 = 1 - 504 sum sigma_5(n) q^n
inline QExpansion eisenstein6(std::size_t n_max) {
    QExpansion e = detail::sigma_series(n_max, 5);
    for (std::size_t n = 1; n <= n_max; ++n) e.at(n) *= -504;
    e.at(0) = 1;
    return e;
}

}  // namespace qvar
