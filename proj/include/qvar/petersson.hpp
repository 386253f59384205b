#pragma once

// Numerical verification of the Petersson trace formula at level N:
//
//   omega * lambda(m) lambda(n) = delta_{m,n}
//       + 2 pi i^{-k} sum_{c>0, N|c} c^{-1} S(m,n;c) J_{k-1}(4 pi sqrt(mn)/c)
//
// for one-dimensional spaces. The harmonic weight omega (the paper's
// 2 pi^2 / (k L(1, sym^2 f))) is obtained by self-calibration at m = n = 1;
// truncation of the c-sum carries a computed series-envelope certificate.

#include "qvar/bessel.hpp"
#include "qvar/eigenforms.hpp"
#include "qvar/kloosterman.hpp"

namespace qvar {

struct TailRule {
    std::int64_t c_max = 0;
    double bound = 0.0;  // certified truncation error of the full c-sum
};

/// Smallest c_max with 2 pi e sum_{c > c_max} (2 pi sqrt(mn)/c)^{k-1} below
/// target (trivial |S| <= c and the small-argument envelope |J_k(x)| <= e (x/2)^k),
/// and at least ceil(8 pi sqrt(mn)) so the envelope applies.
inline TailRule petersson_truncation(int k, std::int64_t m, std::int64_t n, double target = 1e-10) {
    if (k < 4) throw std::invalid_argument("petersson_truncation: weight too small");
    double amp = 2.0 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    double c0 = std::pow(2.0 * kPi * std::exp(1.0) * std::pow(amp, k - 1) /
                             ((k - 2) * target),
                         1.0 / static_cast<double>(k - 2));
    TailRule rule;
    rule.c_max = static_cast<std::int64_t>(std::ceil(std::max(4.0 * amp, c0))) + 1;
    double r = static_cast<double>(rule.c_max);
    rule.bound = 2.0 * kPi * std::exp(1.0) * std::pow(amp, k - 1) *
                 std::pow(r, 2.0 - k) / (k - 2);
    return rule;
}

/// 2 pi i^{-k} sum_{c <= c_max, N | c} c^{-1} S(m,n;c) J_{k-1}(4 pi sqrt(mn)/c).
inline double kloosterman_bessel_sum(int k, std::int64_t m, std::int64_t n, std::int64_t level,
                                     std::int64_t c_max) {
    if (k % 2 != 0) throw std::invalid_argument("kloosterman_bessel_sum: weight must be even");
    double amp = 4.0 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    std::vector<double> terms;
    for (std::int64_t c = level; c <= c_max; c += level) {
        double s = kloosterman_sum(m, n, c);
        if (s == 0.0) continue;
        terms.push_back(s / static_cast<double>(c) * bessel_j(k - 1, amp / static_cast<double>(c)));
    }
    double ik = (k % 4 == 0) ? 1.0 : -1.0;  // i^{-k} for even k
    return 2.0 * kPi * ik * pairwise_sum(terms.data(), terms.size());
}

/// Self-calibration at (1,1): omega = 1 + RHS(1,1). Doubling c_max must not
/// move the result; the tail certificate enforces that analytically.
inline double calibrate_harmonic_weight(EigenformData& f, std::int64_t c_max = 0,
                                        double tail_target = 1e-10) {
    TailRule rule = petersson_truncation(f.weight, 1, 1, tail_target);
    if (c_max > 0) rule.c_max = c_max;
    if (rule.bound > tail_target)
        throw std::runtime_error("calibrate_harmonic_weight: tail bound above tolerance");
    double omega = 1.0 + kloosterman_bessel_sum(f.weight, 1, 1, f.level, rule.c_max);
    if (!(omega > 0.0))
        throw std::runtime_error("calibrate_harmonic_weight: non-positive harmonic weight");
    f.omega = omega;
    return omega;
}

/// Implied L(1, sym^2 f) = 2 pi^2 / (k omega), reported as a diagnostic only.
inline double implied_symmetric_square(const EigenformData& f) {
    if (f.omega <= 0.0) throw std::logic_error("implied_symmetric_square: omega not calibrated");
    return 2.0 * kPi * kPi / (static_cast<double>(f.weight) * f.omega);
}

struct PeterssonCheck {
    double residual = 0.0;
    double tail_bound = 0.0;
    std::int64_t c_max = 0;
};

/// |omega lambda(m) lambda(n) - delta_{m,n} - RHS(m,n)| with a certified
/// truncation of the c-sum.
inline PeterssonCheck petersson_residual(const EigenformData& f, std::int64_t m, std::int64_t n,
                                         std::int64_t c_max = 0, double tail_target = 1e-9) {
    if (f.omega <= 0.0) throw std::logic_error("petersson_residual: omega not calibrated");
    TailRule rule = petersson_truncation(f.weight, m, n, tail_target / 2.0);
    if (c_max > 0) rule.c_max = c_max;
    if (rule.bound > tail_target)
        throw std::runtime_error("petersson_residual: uncertifiable tail at this c_max");
    double lhs = f.omega * f.lambda(m) * f.lambda(n);
    double rhs = (m == n ? 1.0 : 0.0) +
                 kloosterman_bessel_sum(f.weight, m, n, f.level, rule.c_max);
    return {std::abs(lhs - rhs), rule.bound, rule.c_max};
}

/// Residual grid over (m,n) in [1, m_max]^2 sharing one Kloosterman scan per
/// modulus; row-major by m.
struct PeterssonGrid {
    int weight = 0;
    std::int64_t m_max = 0, c_max = 0;
    std::vector<double> residual;    // (m-1)*m_max + (n-1)
    std::vector<double> tail_bound;  // same layout
    double max_residual = 0.0;
    double max_tail_bound = 0.0;
};

inline PeterssonGrid petersson_grid(const EigenformData& f, std::int64_t m_max,
                                    double tail_target = 1e-9) {
    if (f.omega <= 0.0) throw std::logic_error("petersson_grid: omega not calibrated");
    PeterssonGrid grid;
    grid.weight = f.weight;
    grid.m_max = m_max;
    std::int64_t c_top = 0;
    grid.tail_bound.assign(static_cast<std::size_t>(m_max * m_max), 0.0);
    for (std::int64_t m = 1; m <= m_max; ++m)
        for (std::int64_t n = 1; n <= m_max; ++n) {
            TailRule rule = petersson_truncation(f.weight, m, n, tail_target / 2.0);
            grid.tail_bound[static_cast<std::size_t>((m - 1) * m_max + (n - 1))] = rule.bound;
            c_top = std::max(c_top, rule.c_max);
        }
    grid.c_max = c_top;

    std::vector<double> rhs(static_cast<std::size_t>(m_max * m_max), 0.0);
    int k = f.weight;
    for (std::int64_t c = f.level; c <= c_top; c += f.level) {
        auto row = kloosterman_row(c, m_max, m_max);
        for (std::int64_t m = 1; m <= m_max; ++m)
            for (std::int64_t n = 1; n <= m_max; ++n) {
                double s = row[static_cast<std::size_t>((m - 1) * m_max + (n - 1))];
                if (s == 0.0) continue;
                double x = 4.0 * kPi *
                           std::sqrt(static_cast<double>(m) * static_cast<double>(n)) /
                           static_cast<double>(c);
                rhs[static_cast<std::size_t>((m - 1) * m_max + (n - 1))] +=
                    s / static_cast<double>(c) * bessel_j(k - 1, x);
            }
    }
    double ik = (k % 4 == 0) ? 1.0 : -1.0;
    grid.residual.assign(static_cast<std::size_t>(m_max * m_max), 0.0);
    for (std::int64_t m = 1; m <= m_max; ++m)
        for (std::int64_t n = 1; n <= m_max; ++n) {
            std::size_t idx = static_cast<std::size_t>((m - 1) * m_max + (n - 1));
            double lhs = f.omega * f.lambda(m) * f.lambda(n);
            double r = (m == n ? 1.0 : 0.0) + 2.0 * kPi * ik * rhs[idx];
            grid.residual[idx] = std::abs(lhs - r);
            grid.max_residual = std::max(grid.max_residual, grid.residual[idx]);
            grid.max_tail_bound = std::max(grid.max_tail_bound, grid.tail_bound[idx]);
        }
    return grid;
}

}  // namespace qvar
