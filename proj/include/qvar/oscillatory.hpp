#pragma once

// Fourier transforms of smooth windows and numerical verification of the
// oscillatory-integral machinery: the even-order Bessel-sum identity, the
// Fresnel-integral pair, the c_r(g) moments, and the cubic-phase stationary
// point analysis with its leading-order expansion.
//
// Convention throughout: e(x) = exp(2 pi i x), ghat(t) = int g(y) e(ty) dy.

#include <array>
#include <cmath>

#include "qvar/arith.hpp"
#include "qvar/bessel.hpp"
#include "qvar/quadrature.hpp"
#include "qvar/smooth_window.hpp"

namespace qvar {

/// ghat(t) by adaptive quadrature over the support; panel count refined until
/// a doubling changes the value by less than 1e-10.
inline cplx fourier_transform(const SmoothWindow& g, double t) {
    double len = g.hi() - g.lo();
    long panels = std::max<long>(8, static_cast<long>(std::ceil(2.0 * len * (std::abs(t) + 0.25))));
    auto f = [&](double y) {
        double arg = 2.0 * kPi * t * y;
        return g(y) * cplx(std::cos(arg), std::sin(arg));
    };
    return integrate_adaptive(f, g.lo(), g.hi(), 1e-10, panels).value;
}

/// Cutoff T with a certified bound int_{|t|>T} |ghat(t) t^r| dt <= tail_target,
/// from |ghat(t)| <= ||g^(m)||_1 / (2 pi |t|)^m over available orders m.
inline double fourier_decay_cutoff(const SmoothWindow& g, int r, double tail_target) {
    double best = std::numeric_limits<double>::infinity();
    for (int m = r + 2; m <= std::min(r + 14, g.max_order()); m += 2) {
        double im = derivative_l1(g, m);
        if (!(im > 0.0) || !std::isfinite(im)) continue;
        double e = static_cast<double>(m - r - 1);
        double t = std::pow(2.0 * im / (std::pow(2.0 * kPi, m) * e * tail_target), 1.0 / e);
        best = std::min(best, t);
    }
    if (!std::isfinite(best))
        throw std::runtime_error("fourier_decay_cutoff: no usable derivative bound");
    return std::max(best, 0.25);
}

namespace detail {

// Window samples on a fixed composite Gauss-Legendre grid, so that ghat can
// be evaluated at many frequencies as one weighted sum per frequency.
class WindowFourier {
  public:
    WindowFourier(const SmoothWindow& g, double t_abs_max, int order = 16) {
        double len = g.hi() - g.lo();
        long panels =
            std::max<long>(8, static_cast<long>(std::ceil(1.25 * len * t_abs_max)) + 4);
        auto gl = gauss_legendre(order);
        double w = len / static_cast<double>(panels);
        y_.reserve(static_cast<size_t>(panels) * order);
        wg_.reserve(static_cast<size_t>(panels) * order);
        for (long p = 0; p < panels; ++p) {
            double a = g.lo() + static_cast<double>(p) * w;
            double mid = a + 0.5 * w, half = 0.5 * w;
            for (int i = 0; i < order; ++i) {
                double y = mid + half * gl->node[static_cast<size_t>(i)];
                double gy = g(y);
                if (gy == 0.0) continue;
                y_.push_back(y);
                wg_.push_back(half * gl->weight[static_cast<size_t>(i)] * gy);
            }
        }
    }

    cplx operator()(double t) const {
        cplx s = 0.0;
        for (size_t j = 0; j < y_.size(); ++j) {
            double arg = 2.0 * kPi * t * y_[j];
            s += wg_[j] * cplx(std::cos(arg), std::sin(arg));
        }
        return s;
    }
    long nodes() const { return static_cast<long>(y_.size()); }

  private:
    std::vector<double> y_, wg_;
};

inline void require_positive_support(const SmoothWindow& g, const char* who) {
    if (!g.positive_support())
        throw std::domain_error(std::string(who) + ": window support must lie in (0, infinity)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bessel-sum identity:
//   sum_{k even} 2 pi i^k J_{k-1}(x) g(k-1) = -2 pi int ghat(t) sin(x cos 2 pi t) dt

struct BesselSumCheck {
    double lhs = 0.0;
    cplx rhs = 0.0;
    double residual = 0.0;
    long nodes = 0;
    double cutoff = 0.0;
};

inline BesselSumCheck bessel_sum_identity(double x, const SmoothWindow& g,
                                          double tail_target = 1e-9, int refine = 0) {
    detail::require_positive_support(g, "bessel_sum_identity");
    BesselSumCheck out;

    int k_lo = static_cast<int>(std::floor(g.lo())) + 1;
    int k_hi = static_cast<int>(std::ceil(g.hi()));
    for (int km1 = k_lo; km1 <= k_hi; ++km1) {
        int k = km1 + 1;
        if (k % 2 != 0) continue;  // even weights only
        double gv = g(static_cast<double>(km1));
        if (gv == 0.0) continue;
        double ik = (k % 4 == 0) ? 1.0 : -1.0;  // i^k for even k
        out.lhs += 2.0 * kPi * ik * bessel_j(km1, x) * gv;
    }

    double t_max = fourier_decay_cutoff(g, 0, tail_target);
    out.cutoff = t_max;
    detail::WindowFourier ghat(g, t_max);
    auto integrand = [&](double t) { return ghat(t) * std::sin(x * std::cos(2.0 * kPi * t)); };
    long panels = static_cast<long>(std::ceil(1.25 * 2.0 * t_max * (g.hi() + x + 1.0))) + 32;
    panels <<= refine;
    cplx integral = integrate_panels(integrand, -t_max, t_max, panels);
    out.nodes = panels * 16 + ghat.nodes();
    out.rhs = -2.0 * kPi * integral;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

inline double bessel_sum_identity_residual(double x, const SmoothWindow& g) {
    return bessel_sum_identity(x, g).residual;
}

// ---------------------------------------------------------------------------
// Fresnel pair:
//   2 int ghat(t) sin(x - 2 pi^2 t^2 x) dt
//     = int_0^inf g(sqrt(2yx)) sin(y + x - pi/4) (pi y)^{-1/2} dy,  and cos twin.

enum class FresnelParity { sin_variant, cos_variant };

struct FresnelCheck {
    cplx lhs = 0.0;
    cplx rhs = 0.0;
    double residual = 0.0;
    long nodes = 0;
    double cutoff = 0.0;
};

/// Both parities in one sweep (they share every ghat evaluation).
inline std::array<FresnelCheck, 2> fresnel_pair(double x, const SmoothWindow& g,
                                                double tail_target = 1e-8, int refine = 0) {
    detail::require_positive_support(g, "fresnel_identity");
    if (x <= 0.0) throw std::invalid_argument("fresnel_identity: x must be positive");
    std::array<FresnelCheck, 2> out;

    double t_max = fourier_decay_cutoff(g, 0, tail_target);
    detail::WindowFourier ghat(g, t_max);
    // left sides: phase x - 2 pi^2 t^2 x turns at rate 4 pi^2 |t| x
    long panels = static_cast<long>(
                      std::ceil(1.25 * 2.0 * t_max * (kPi * x * t_max + g.hi() + 2.0))) + 32;
    panels <<= refine;
    cplx ls = 0.0, lc = 0.0;
    {
        auto gl = gauss_legendre(16);
        double w = 2.0 * t_max / static_cast<double>(panels);
        for (long p = 0; p < panels; ++p) {
            double a = -t_max + static_cast<double>(p) * w;
            double mid = a + 0.5 * w, half = 0.5 * w;
            for (int i = 0; i < 16; ++i) {
                double t = mid + half * gl->node[static_cast<size_t>(i)];
                cplx gh = half * gl->weight[static_cast<size_t>(i)] * ghat(t);
                double phase = x - 2.0 * kPi * kPi * t * t * x;
                ls += gh * std::sin(phase);
                lc += gh * std::cos(phase);
            }
        }
    }
    out[0].lhs = 2.0 * ls;
    out[1].lhs = 2.0 * lc;

    // right sides under y = s^2: (2/sqrt(pi)) int g(sqrt(2x) s) sc(s^2 + x - pi/4) ds
    double root = std::sqrt(2.0 * x);
    double s_lo = std::max(0.0, g.lo() / root), s_hi = g.hi() / root;
    long rp = static_cast<long>(std::ceil((s_hi - s_lo) * (s_hi / kPi + 1.0) * 3.0)) + 16;
    rp <<= refine;
    auto rhs_s = [&](double s) { return g(root * s) * std::sin(s * s + x - kPi / 4.0); };
    auto rhs_c = [&](double s) { return g(root * s) * std::cos(s * s + x - kPi / 4.0); };
    out[0].rhs = (2.0 / std::sqrt(kPi)) * integrate_panels(rhs_s, s_lo, s_hi, rp);
    out[1].rhs = (2.0 / std::sqrt(kPi)) * integrate_panels(rhs_c, s_lo, s_hi, rp);

    for (auto& c : out) {
        c.cutoff = t_max;
        c.nodes = panels * 16 + rp * 16 + ghat.nodes();
        c.residual = std::abs(c.lhs - c.rhs);
    }
    return out;
}

inline FresnelCheck fresnel_identity(double x, const SmoothWindow& g, FresnelParity parity,
                                     double tail_target = 1e-8, int refine = 0) {
    auto pair = fresnel_pair(x, g, tail_target, refine);
    return parity == FresnelParity::sin_variant ? pair[0] : pair[1];
}

inline double fresnel_identity_residual(double x, const SmoothWindow& g, FresnelParity parity) {
    return fresnel_identity(x, g, parity).residual;
}

// ---------------------------------------------------------------------------
// Stationary points of f(t) = x(-2 pi^2 t^2 + (2/3) pi^4 t^4) + 2 pi t y.
// f'(t) = x(-4 pi^2 t + (8/3) pi^4 t^3) + 2 pi y has roots near 0 and
// +- sqrt(3/2)/pi when |y/x| is small.

struct StationaryPoints {
    double left, middle, right;
};

inline double phase_value(double x, double y, double t) {
    double t2 = t * t;
    return x * (-2.0 * kPi * kPi * t2 + (2.0 / 3.0) * kPi * kPi * kPi * kPi * t2 * t2) +
           2.0 * kPi * t * y;
}

inline double phase_d1(double x, double y, double t) {
    double p2 = kPi * kPi;
    return x * (-4.0 * p2 * t + (8.0 / 3.0) * p2 * p2 * t * t * t) + 2.0 * kPi * y;
}

inline double phase_d2(double x, double t) {
    double p2 = kPi * kPi;
    return x * (-4.0 * p2 + 8.0 * p2 * p2 * t * t);
}

inline StationaryPoints stationary_points(double x, double y) {
    if (x <= 0.0) throw std::invalid_argument("stationary_points: x must be positive");
    double s = std::sqrt(1.5) / kPi;  // outer roots of -4 pi^2 t + (8/3) pi^4 t^3
    if (y == 0.0) return {-s, 0.0, s};
    // three real roots persist only while |2 pi y| stays below the cubic's
    // critical value x * 8 pi / (3 sqrt 2)
    double crit = x * 8.0 * kPi / (3.0 * std::sqrt(2.0));
    if (std::abs(2.0 * kPi * y) >= 0.999 * crit)
        throw std::domain_error("stationary_points: roots coalesce (|y/x| too large)");
    double tol = 1e-10 * std::max(x, std::abs(y));
    StationaryPoints out{};
    double* slot[3] = {&out.left, &out.middle, &out.right};
    const double seeds[3] = {-s, 0.0, s};
    for (int i = 0; i < 3; ++i) {
        double t = seeds[i];
        for (int it = 0; it < 200; ++it) {
            double f1 = phase_d1(x, y, t);
            if (std::abs(f1) < 0.5 * tol) break;
            t -= f1 / phase_d2(x, t);
        }
        if (!(std::abs(phase_d1(x, y, t)) < tol))
            throw std::runtime_error("stationary_points: Newton failed to converge");
        *slot[i] = t;
    }
    if (!(out.left < out.middle && out.middle < out.right))
        throw std::domain_error("stationary_points: roots coalesce");
    return out;
}

// ---------------------------------------------------------------------------
// Leading-order stationary phase for int exp(i f(t)) dt against direct
// quadrature with a smooth cutoff. With g = f/(2 pi), each stationary point
// beta contributes e(sgn(g''(beta))/8) |g''(beta)|^{-1/2} e(g(beta)); the
// remainder is O(1/x).

struct StationaryPhaseCheck {
    cplx approx = 0.0;
    cplx quadrature = 0.0;
    double rel_error = 0.0;
    long nodes = 0;
};

inline StationaryPhaseCheck stationary_phase_check(double x, double y) {
    auto pts = stationary_points(x, y);
    StationaryPhaseCheck out;
    for (double b : {pts.left, pts.middle, pts.right}) {
        double g2 = phase_d2(x, b) / (2.0 * kPi);
        double sgn = g2 > 0.0 ? 1.0 : -1.0;
        cplx eighth = std::polar(1.0, sgn * kPi / 4.0);  // e(+-1/8)
        out.approx += eighth * std::pow(std::abs(g2), -0.5) *
                      std::polar(1.0, phase_value(x, y, b));
    }

    // cutoff window flat across all three stationary points
    auto w = SmoothWindow::plateau(-1.15, -0.8, 0.8, 1.15, 8, "sp-cutoff");
    auto integrand = [&](double t) {
        double wv = w(t);
        if (wv == 0.0) return cplx(0.0);
        return wv * std::polar(1.0, phase_value(x, y, t));
    };
    // uniform panels sized for the phase rate at the cutoff edge, |f'(1.15)|
    double rate = std::abs(phase_d1(x, std::abs(y), 1.15)) + 2.0 * kPi * std::abs(y);
    long panels = static_cast<long>(std::ceil(1.25 * 2.3 * rate / (2.0 * kPi))) + 64;
    cplx q1 = integrate_panels(integrand, -1.15, 1.15, panels);
    cplx q2 = integrate_panels(integrand, -1.15, 1.15, 2 * panels);
    out.nodes = 3 * panels * 16;
    if (std::abs(q2 - q1) > 1e-6 * std::abs(q2) + 1e-12)
        throw std::runtime_error("stationary_phase_check: quadrature did not converge");
    out.quadrature = q2;
    out.rel_error = std::abs(out.approx - out.quadrature) / std::abs(out.quadrature);
    return out;
}

// Probe for the first-derivative (van der Corput) bound |int_a^b e^{i f}| <= 4/mu
// on an interval where f' is monotone and bounded away from zero.
struct TailProbe {
    cplx integral = 0.0;
    double mu = 0.0;     // min |f'| on [a,b]
    double bound = 0.0;  // 4/mu
};

inline TailProbe nonstationary_tail_probe(double x, double y, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("nonstationary_tail_probe: need a < b");
    TailProbe out;
    out.mu = std::min(std::abs(phase_d1(x, y, a)), std::abs(phase_d1(x, y, b)));
    double prev = phase_d1(x, y, a);
    for (int i = 1; i <= 64; ++i) {
        double t = a + (b - a) * static_cast<double>(i) / 64.0;
        double d = phase_d1(x, y, t);
        if ((d < 0.0) != (prev < 0.0) || d == 0.0)
            throw std::domain_error(
                "nonstationary_tail_probe: interval contains a stationary point");
        prev = d;
        out.mu = std::min(out.mu, std::abs(d));
    }
    auto integrand = [&](double t) { return std::polar(1.0, phase_value(x, y, t)); };
    long panels = static_cast<long>(
                      std::ceil((b - a) * (std::abs(phase_d1(x, y, a)) +
                                           std::abs(phase_d1(x, y, b)) + x) / (2.0 * kPi))) + 32;
    out.integral = integrate_panels(integrand, a, b, panels);
    out.bound = 4.0 / out.mu;
    return out;
}

// ---------------------------------------------------------------------------
// c_r(g) = int |ghat(t) t^r| dt. Accuracy target ~1e-6 relative: the modulus
// has kinks at the zeros of ghat, which caps fixed-panel convergence; every
// consumer is a ratio or scaling-law check.

/// Several moments at once over a shared transform grid. |ghat| carries no
/// carrier oscillation, only sign-change kinks spaced ~1/len, so panels
/// scale with the support length. Two-phase: a coarse pass sets each
/// moment's scale, then the certified tail cutoff is solved for a target
/// relative to that scale.
inline std::vector<double> c_r_norms(const SmoothWindow& g, const std::vector<int>& rs,
                                     double rel_tail = 1e-6) {
    int r_max = 0;
    for (int r : rs) {
        if (r < 0) throw std::invalid_argument("c_r_norm: r must be >= 0");
        r_max = std::max(r_max, r);
    }
    double len = g.hi() - g.lo();

    auto sweep = [&](const detail::WindowFourier& ghat, double t_max, long np) {
        auto gl = gauss_legendre(8);
        std::vector<double> acc(rs.size(), 0.0);
        double w = 2.0 * t_max / static_cast<double>(np);
        for (long p = 0; p < np; ++p) {
            double a = -t_max + static_cast<double>(p) * w;
            double mid = a + 0.5 * w, half = 0.5 * w;
            for (int i = 0; i < 8; ++i) {
                double t = mid + half * gl->node[static_cast<size_t>(i)];
                double mag = half * gl->weight[static_cast<size_t>(i)] * std::abs(ghat(t));
                for (size_t j = 0; j < rs.size(); ++j)
                    acc[j] += mag * std::pow(std::abs(t), static_cast<double>(rs[j]));
            }
        }
        return acc;
    };

    // The derivative-ratio tail bound is far too pessimistic for narrow
    // ramps, so locate the effective support empirically: march outward
    // until the weighted integrand stays negligible against the running
    // integral for a full stretch of samples. The analytic bound still
    // caps the march.
    double t_cap = std::min(fourier_decay_cutoff(g, r_max, 1e-12), 60.0);
    double step = 0.5, riemann = 0.0, t_edge = 0.0;
    int quiet = 0;
    for (double t = 0.5 * step; t < t_cap && quiet < 8; t += step) {
        double mag = std::abs(fourier_transform(g, t));
        double s = mag * std::pow(t, static_cast<double>(r_max));
        riemann += 2.0 * s * step;
        // below the transform's own noise floor the samples carry no signal
        if (mag < 1e-9 || s * 2.0 * step < 0.02 * rel_tail * std::max(riemann, 1e-12)) {
            ++quiet;
        } else {
            quiet = 0;
            t_edge = t;
        }
    }
    double t_b = std::min(t_cap, 1.3 * t_edge + 1.5);
    detail::WindowFourier ghat_b(g, t_b);
    return sweep(ghat_b, t_b, static_cast<long>(std::ceil(3.0 * len * t_b)) + 48);
}

inline double c_r_norm(const SmoothWindow& g, int r, double rel_tail = 1e-6) {
    return c_r_norms(g, {r}, rel_tail)[0];
}

}  // namespace qvar
