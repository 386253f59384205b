#pragma once

// J-Bessel evaluation in double precision, covering both regimes the trace
// formula touches: tiny arguments deep in truncation tails and arguments up
// to ~1e4 where the order is far below the argument. Ascending series when
// x <= max(8, k/2), Miller downward recurrence normalized by
// J_0 + 2 sum J_{2j} = 1 otherwise. No external special-function library.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qvar {

/// Ascending series J_k(x) = (x/2)^k sum_n (-1)^n (x/2)^{2n} / (n! (k+n)!).
inline double bessel_j_series(int k, double x) {
    if (k < 0) throw std::invalid_argument("bessel_j_series: order must be >= 0");
    if (x == 0.0) return k == 0 ? 1.0 : 0.0;
    double h = 0.5 * x;
    double t0;
    if (k <= 30) {
        t0 = 1.0;
        for (int j = 1; j <= k; ++j) t0 *= h / static_cast<double>(j);
    } else {
        t0 = std::exp(static_cast<double>(k) * std::log(h) - std::lgamma(static_cast<double>(k) + 1.0));
    }
    double h2 = h * h, term = t0, sum = t0;
    for (int n = 1; n < 40000; ++n) {
        term *= -h2 / (static_cast<double>(n) * static_cast<double>(k + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-320) break;
    }
    return sum;
}

/// J_0(x) .. J_{k_max}(x) by Miller's downward recurrence. Intended for
/// x >= ~8; accurate for every order, including k_max far above x.
inline std::vector<double> bessel_j_miller(int k_max, double x) {
    if (x <= 0.0) throw std::invalid_argument("bessel_j_miller: x must be positive");
    int start = std::max(k_max, static_cast<int>(std::ceil(x)));
    int pad = 24 + static_cast<int>(6.0 * std::cbrt(std::max(x, 1.0)));
    std::vector<double> out;
    double prev_check = 0.0;
    for (int round = 0; round < 6; ++round) {
        int M = start + pad;
        std::vector<double> v(static_cast<size_t>(M) + 2, 0.0);
        v[static_cast<size_t>(M) + 1] = 0.0;
        v[static_cast<size_t>(M)] = 1e-280;
        for (int k = M; k >= 1; --k) {
            double next = (2.0 * static_cast<double>(k) / x) * v[static_cast<size_t>(k)] -
                          v[static_cast<size_t>(k) + 1];
            v[static_cast<size_t>(k) - 1] = next;
            if (std::abs(next) > 1e250) {
                for (int j = k - 1; j <= M + 1; ++j) v[static_cast<size_t>(j)] *= 1e-250;
            }
        }
        double norm = v[0];
        for (int j = 2; j <= M; j += 2) norm += 2.0 * v[static_cast<size_t>(j)];
        out.assign(v.begin(), v.begin() + k_max + 1);
        for (auto& y : out) y /= norm;
        double check = out[static_cast<size_t>(k_max)];
        if (round > 0 && std::abs(check - prev_check) <=
                             1e-13 * (std::abs(check) + std::abs(out[0]) * 1e-3))
            break;
        prev_check = check;
        pad += 32;
    }
    return out;
}

/// All orders 0..k_max at one argument; one Miller sweep when x is large.
inline std::vector<double> bessel_j_all(int k_max, double x) {
    if (x < 0.0) throw std::invalid_argument("bessel_j_all: x must be >= 0");
    if (x < 8.0) {
        std::vector<double> out(static_cast<size_t>(k_max) + 1);
        for (int k = 0; k <= k_max; ++k) out[static_cast<size_t>(k)] = bessel_j_series(k, x);
        return out;
    }
    return bessel_j_miller(k_max, x);
}

inline double bessel_j(int k, double x) {
    if (k < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
    if (x < 0.0) throw std::invalid_argument("bessel_j: x must be >= 0");
    if (x <= std::max(8.0, 0.5 * static_cast<double>(k))) return bessel_j_series(k, x);
    return bessel_j_miller(k, x)[static_cast<size_t>(k)];
}

}  // namespace qvar
