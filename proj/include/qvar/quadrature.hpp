#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace qvar {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on P_n and cached.
struct GaussLegendre {
    std::vector<double> node, weight;
};

inline std::shared_ptr<const GaussLegendre> gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const GaussLegendre>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto gl = std::make_shared<GaussLegendre>();
    gl->node.resize(static_cast<size_t>(n));
    gl->weight.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        gl->node[static_cast<size_t>(i)] = x;
        gl->weight[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    cache.emplace(n, gl);
    return cache[n];
}

template <class F>
auto integrate_gl(F&& f, double a, double b, int order = 16) {
    auto gl = gauss_legendre(order);
    using R = std::invoke_result_t<F, double>;
    R s{};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i)
        s += gl->weight[static_cast<size_t>(i)] * f(mid + half * gl->node[static_cast<size_t>(i)]);
    return s * half;
}

template <class F>
auto integrate_panels(F&& f, double a, double b, long panels, int order = 16) {
    using R = std::invoke_result_t<F, double>;
    if (panels < 1) panels = 1;
    R s{};
    double w = (b - a) / static_cast<double>(panels);
    for (long p = 0; p < panels; ++p)
        s += integrate_gl(f, a + static_cast<double>(p) * w, a + static_cast<double>(p + 1) * w, order);
    return s;
}

template <class R>
struct AdaptiveResult {
    R value{};
    long nodes = 0;
    bool converged = false;
    double last_change = 0.0;
};

/// Composite Gauss-Legendre with panel doubling until the value moves by
/// less than tol (absolute).
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double tol, long initial_panels = 4,
                        long max_panels = 1L << 22, int order = 16) {
    using R = std::invoke_result_t<F, double>;
    AdaptiveResult<R> res;
    long panels = std::max(1L, initial_panels);
    R prev = integrate_panels(f, a, b, panels, order);
    res.nodes = panels * order;
    while (panels * 2 <= max_panels) {
        panels *= 2;
        R cur = integrate_panels(f, a, b, panels, order);
        res.nodes += panels * order;
        res.last_change = std::abs(cur - prev);
        prev = cur;
        if (res.last_change < tol) {
            res.converged = true;
            break;
        }
    }
    res.value = prev;
    return res;
}

}  // namespace qvar
