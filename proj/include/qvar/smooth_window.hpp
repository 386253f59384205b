#pragma once

// Compactly supported C^infinity plateau windows with evaluable derivatives
// to high order. Derivatives come from truncated-Taylor (jet) arithmetic on
// the closed-form recurrence for H(s) = exp(-1/s): s^2 H' = H. No finite
// differences anywhere.

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "qvar/quadrature.hpp"

namespace qvar {

namespace jet {

// Taylor coefficients f(t0), f'(t0)/1!, f''(t0)/2!, ... of a scalar function.
using Jet = std::vector<double>;

inline Jet constant(double v, int n) {
    Jet a(static_cast<size_t>(n) + 1, 0.0);
    a[0] = v;
    return a;
}

inline Jet add(const Jet& a, const Jet& b) {
    Jet c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline Jet mul(const Jet& a, const Jet& b) {
    Jet c(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline Jet div(const Jet& a, const Jet& b) {
    Jet c(a.size(), 0.0);
    for (size_t k = 0; k < a.size(); ++k) {
        double s = a[k];
        for (size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
        c[k] = s / b[0];
    }
    return c;
}

// H(s) = exp(-1/s) for s > 0 (0 for s <= 0); coefficients from s^2 H' = H.
inline Jet exp_inv(double s0, int n) {
    Jet c(static_cast<size_t>(n) + 1, 0.0);
    if (s0 <= 0.0) return c;
    double h = std::exp(-1.0 / s0);
    if (h == 0.0) return c;
    c[0] = h;
    double s2 = s0 * s0;
    for (int j = 0; j < n; ++j) {
        double prev = j >= 1 ? c[static_cast<size_t>(j) - 1] : 0.0;
        c[static_cast<size_t>(j) + 1] =
            (c[static_cast<size_t>(j)] * (1.0 - 2.0 * s0 * j) - (j - 1) * prev) /
            (s2 * (j + 1));
    }
    return c;
}

// composition with s = s0 +/- u: flips odd coefficients
inline Jet reflect(Jet a) {
    for (size_t i = 1; i < a.size(); i += 2) a[i] = -a[i];
    return a;
}

// C^inf ramp on [0,1] with R(0)=1, R(1)=0: R = H(1-s) / (H(s) + H(1-s)).
inline Jet ramp(double s0, int n) {
    Jet hs = exp_inv(s0, n);
    Jet h1s = reflect(exp_inv(1.0 - s0, n));
    return div(h1s, add(hs, h1s));
}

// rescale Taylor coefficients for f(k*(x-x0)) given coefficients in s
inline Jet scale_var(Jet a, double k) {
    double f = 1.0;
    for (size_t i = 1; i < a.size(); ++i) {
        f *= k;
        a[i] *= f;
    }
    return a;
}

// Taylor coefficients -> derivative values (multiply by factorials)
inline std::vector<double> to_derivatives(const Jet& a) {
    std::vector<double> d(a.size());
    double fact = 1.0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (i > 0) fact *= static_cast<double>(i);
        d[i] = a[i] * fact;
    }
    return d;
}

}  // namespace jet

// Plateau window: 0 off (lo,hi), 1 on [flat_lo,flat_hi], monotone C^inf
// ramps between. This one family covers every window in the artifact: the
// family-smoothing u (1 on [-1,1], support [-1.1,1.1]), its shifted/scaled
// instances g_K, the polynomial cutoff psi, and the Bessel-sum test windows.
class SmoothWindow {
  public:
    SmoothWindow() = default;

    static SmoothWindow plateau(double lo, double flat_lo, double flat_hi, double hi,
                                int max_order = 40, std::string label = "plateau") {
        if (!(lo < flat_lo && flat_lo < flat_hi && flat_hi < hi))
            throw std::invalid_argument("SmoothWindow: need lo < flat_lo < flat_hi < hi");
        SmoothWindow w;
        w.lo_ = lo;
        w.flat_lo_ = flat_lo;
        w.flat_hi_ = flat_hi;
        w.hi_ = hi;
        w.max_order_ = max_order;
        w.label_ = std::move(label);
        return w;
    }

    /// The section-2.1 family window: identically 1 on [-1,1], support [-1.1,1.1].
    static SmoothWindow family_u(int max_order = 40) {
        return plateau(-1.1, -1.0, 1.0, 1.1, max_order, "u");
    }

    /// Window for w((x - shift)/scale); knots map affinely.
    SmoothWindow scaled(double scale, double shift, std::string label = "") const {
        if (scale <= 0.0) throw std::invalid_argument("SmoothWindow::scaled: scale must be > 0");
        SmoothWindow w = *this;
        w.lo_ = shift + scale * lo_;
        w.flat_lo_ = shift + scale * flat_lo_;
        w.flat_hi_ = shift + scale * flat_hi_;
        w.hi_ = shift + scale * hi_;
        w.label_ = label.empty() ? label_ + "-scaled" : std::move(label);
        return w;
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double flat_lo() const { return flat_lo_; }
    double flat_hi() const { return flat_hi_; }
    int max_order() const { return max_order_; }
    const std::string& label() const { return label_; }
    bool positive_support() const { return lo_ >= 0.0; }

    double operator()(double x) const {
        if (x <= lo_ || x >= hi_) return 0.0;
        if (x >= flat_lo_ && x <= flat_hi_) return 1.0;
        if (x < flat_lo_) {
            double w = flat_lo_ - lo_;
            return ramp_value((flat_lo_ - x) / w);
        }
        double w = hi_ - flat_hi_;
        return ramp_value((x - flat_hi_) / w);
    }

    /// Derivatives 0..order at x (order <= max_order()).
    std::vector<double> derivatives(double x, int order) const {
        if (order > max_order_)
            throw std::invalid_argument("SmoothWindow: derivative order beyond declared maximum");
        if (x <= lo_ || x >= hi_) return std::vector<double>(static_cast<size_t>(order) + 1, 0.0);
        if (x >= flat_lo_ && x <= flat_hi_) {
            std::vector<double> d(static_cast<size_t>(order) + 1, 0.0);
            d[0] = 1.0;
            return d;
        }
        jet::Jet j;
        if (x < flat_lo_) {
            double w = flat_lo_ - lo_;
            j = jet::scale_var(jet::ramp((flat_lo_ - x) / w, order), -1.0 / w);
        } else {
            double w = hi_ - flat_hi_;
            j = jet::scale_var(jet::ramp((x - flat_hi_) / w, order), 1.0 / w);
        }
        return jet::to_derivatives(j);
    }

    double derivative(double x, int order) const {
        if (order == 0) return (*this)(x);
        return derivatives(x, order)[static_cast<size_t>(order)];
    }

  private:
    static double ramp_value(double s) {
        if (s <= 0.0) return 1.0;
        if (s >= 1.0) return 0.0;
        double hs = std::exp(-1.0 / s), h1s = std::exp(-1.0 / (1.0 - s));
        return h1s / (hs + h1s);
    }

    double lo_ = -1.1, flat_lo_ = -1.0, flat_hi_ = 1.0, hi_ = 1.1;
    int max_order_ = 40;
    std::string label_ = "u";
};

/// sup over the support of |w^(r)|, by dense sampling plus parabolic refinement.
inline double sup_derivative(const SmoothWindow& w, int r, int samples = 20000) {
    if (r == 0) return 1.0;  // plateau height; ramps are monotone in [0,1]
    double lo = w.lo(), hi = w.hi();
    double best = 0.0, bestx = lo;
    for (int i = 0; i <= samples; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
        double v = std::abs(w.derivative(x, r));
        if (v > best) {
            best = v;
            bestx = x;
        }
    }
    // golden-section refinement of |w^(r)| around the best sample
    double h = (hi - lo) / static_cast<double>(samples);
    double a = bestx - h, b = bestx + h;
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = std::abs(w.derivative(x1, r)), f2 = std::abs(w.derivative(x2, r));
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = std::abs(w.derivative(x2, r));
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = std::abs(w.derivative(x1, r));
        }
    }
    return std::max({best, f1, f2});
}

/// Sobolev norm sum_{j<=T} sup |w^(j)|.
inline double sobolev_norm(const SmoothWindow& w, int T) {
    if (T > w.max_order())
        throw std::invalid_argument("sobolev_norm: T beyond declared derivative order");
    double s = 0.0;
    for (int j = 0; j <= T; ++j) s += sup_derivative(w, j);
    return s;
}

/// Integral of |w^(r)| over the support (ramps only for r >= 1). Memoized:
/// the decay-cutoff machinery queries the same few norms repeatedly.
inline double derivative_l1(const SmoothWindow& w, int r) {
    using Key = std::tuple<double, double, double, double, int>;
    static std::mutex mu;
    static std::map<Key, double> memo;
    Key key{w.lo(), w.flat_lo(), w.flat_hi(), w.hi(), r};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    auto absd = [&](double x) { return std::abs(w.derivative(x, r)); };
    auto ramp_l1 = [&](double a, double b) {
        double rough = integrate_panels(absd, a, b, 32);
        double tol = std::max(1e-12, 1e-9 * std::abs(rough));
        return integrate_adaptive(absd, a, b, tol, 32, 1 << 12).value;
    };
    double val = ramp_l1(w.lo(), w.flat_lo()) + ramp_l1(w.flat_hi(), w.hi()) +
                 (r == 0 ? (w.flat_hi() - w.flat_lo()) : 0.0);
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, val);
    return val;
}

}  // namespace qvar
