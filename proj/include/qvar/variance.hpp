#pragma once

// Desk-scale evaluation of the smoothed variance sum by two independent
// routes: direct eigenvalue summation over the weight family, and the
// diagonal + off-diagonal decomposition obtained from the Petersson trace
// formula. Everything is reported in the omega/(2 pi^2) normalization, so
// the decomposition identity reads
//
//   variance_direct = diagonal_term + off_diagonal_term      (exactly).

#include <cstdint>
#include <map>
#include <set>

#include "qvar/parallel.hpp"
#include "qvar/petersson.hpp"
#include "qvar/smooth_window.hpp"

namespace qvar {

// Integer-valued quadratic q(x) = (A2 x^2 + B2 x)/2 + C with rational
// coefficients A = A2/2, B = B2/2 (denominator dividing 2).
struct QuadraticPoly {
    std::int64_t A2 = 2, B2 = 2, C = 1;

    QuadraticPoly(std::int64_t a2, std::int64_t b2, std::int64_t c) : A2(a2), B2(b2), C(c) {
        if (A2 == 0) throw std::invalid_argument("QuadraticPoly: leading coefficient is zero");
        if (((A2 % 2) + 2) % 2 != ((B2 % 2) + 2) % 2)
            throw std::invalid_argument(
                "QuadraticPoly: q does not map integers to integers (need A2 = B2 mod 2)");
    }
    static QuadraticPoly from_integer(std::int64_t A, std::int64_t B, std::int64_t C) {
        return QuadraticPoly(2 * A, 2 * B, C);
    }

    double A() const { return 0.5 * static_cast<double>(A2); }
    double B() const { return 0.5 * static_cast<double>(B2); }
    bool half_integer() const { return A2 % 2 != 0; }

    /// 2 q(r), exact
    std::int64_t eval2(std::int64_t r) const {
        return checked_mul(A2, checked_mul(r, r)) + checked_mul(B2, r) + 2 * C;
    }
    std::int64_t eval_abs(std::int64_t r) const { return std::llabs(eval2(r)) / 2; }

    /// 4 D = 4(B^2 - 4AC) = B2^2 - 8 A2 C; irreducible over Q iff this is
    /// not a perfect square.
    std::int64_t disc4() const { return B2 * B2 - 8 * A2 * C; }
    double discriminant() const { return 0.25 * static_cast<double>(disc4()); }
    bool irreducible() const {
        std::int64_t d = disc4();
        if (d < 0) return true;
        std::int64_t s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(d))));
        for (std::int64_t t = std::max<std::int64_t>(0, s - 2); t <= s + 2; ++t)
            if (t * t == d) return false;
        return true;
    }
};

struct ConfigError : std::runtime_error {
    std::string constraint;
    ConfigError(const std::string& what, std::string which)
        : std::runtime_error(what), constraint(std::move(which)) {}
};

// Parameters of a variance run. The epsilon family carries the constraints
// the theorem imposes; violations are rejected by name at validation.
struct ExperimentConfig {
    double K = 16.0;
    double theta = 0.6;
    double X = 10.0;
    double eps = 0.5;
    double eps0 = 0.02;
    double eps1 = 0.05;
    double eps2 = 0.1;
    double l = 2.0;             // psi supported on (1/l, l)
    std::int64_t c_max = 0;     // off-diagonal truncation; 0 = automatic
    double tol_two_route = 1e-4;
    double tail_target = 1e-7;  // off-diagonal truncation certificate target
    std::uint64_t seed = 1;
    int threads = 0;

    void validate() const {
        auto fail = [](const std::string& what, const std::string& name) {
            throw ConfigError("config: " + what, name);
        };
        if (!(K > 0.0)) fail("K must be positive", "K");
        if (!(theta > 1.0 / 3.0 && theta < 1.0)) fail("requires 1/3 < theta < 1", "theta");
        if (!(X > 0.0)) fail("X must be positive", "X");
        if (!(X <= K)) fail("requires X <= K", "X<=K");
        if (!(eps > 0.0)) fail("eps must be positive", "eps");
        double cap0 = std::min({(3.0 * theta - 1.0) / 20.0, (1.0 - theta) / 2.0, eps / 10.0});
        if (!(eps0 > 0.0 && eps0 < cap0))
            fail("requires 0 < eps0 < min{(3 theta - 1)/20, (1 - theta)/2, eps/10}", "eps0");
        if (!(eps1 > 0.0 && eps1 < (3.0 * theta - 1.0) / 12.0))
            fail("requires 0 < eps1 < (3 theta - 1)/12", "eps1");
        if (!(eps2 > eps0 && eps2 < 0.4 * eps))
            fail("requires eps0 < eps2 < (2/5) eps", "eps2");
        if (!(l > 1.0)) fail("psi support parameter l must exceed 1", "l");
        if (c_max < 0) fail("c_max must be nonnegative", "c_max");
        if (!(tol_two_route > 0.0)) fail("tolerance must be positive", "tol_two_route");
    }

    /// Diagnostic thresholds of the paper's c-split (reported, not gated):
    /// main/mid boundary X^{2+eps0} K^{-1-theta+eps1} and mid/tail boundary K^10.
    double c_split_main() const {
        return std::pow(X, 2.0 + eps0) * std::pow(K, -1.0 - theta + eps1);
    }
    double c_split_tail() const { return std::pow(K, 10.0); }
};

/// psi supported on (1/l, l), flat on the middle half of the interval.
inline SmoothWindow psi_window(double l, int max_order = 40) {
    if (!(l > 1.0)) throw std::invalid_argument("psi_window: need l > 1");
    double lo = 1.0 / l, hi = l, w = hi - lo;
    return SmoothWindow::plateau(lo, lo + 0.25 * w, hi - 0.25 * w, hi, max_order, "psi");
}

struct PolyValidation {
    bool integer_valued = false;
    bool irreducible = false;
    bool size_a = false, size_b = false, size_c = false;
    bool all_pass() const { return integer_valued && irreducible && size_a && size_b && size_c; }
};

/// Integer-valuedness, irreducibility and the theorem's coefficient-size
/// regime (implied constant 1). Size failures warn rather than abort: the
/// identity checks stay valid, only the asymptotic regime claim lapses.
inline PolyValidation validate_poly(const QuadraticPoly& q, double X,
                                    const ExperimentConfig& cfg) {
    PolyValidation v;
    v.integer_valued = true;  // enforced by the constructor
    v.irreducible = q.irreducible();
    v.size_a = std::abs(q.A()) <= std::pow(X, cfg.eps0);
    v.size_b = std::abs(q.B()) <= std::sqrt(X);
    v.size_c = std::abs(static_cast<double>(q.C)) <= std::pow(X, 1.0 - cfg.eps0);
    return v;
}

struct InsufficientCoefficients : std::runtime_error {
    std::int64_t required_n_max;
    explicit InsufficientCoefficients(std::int64_t need)
        : std::runtime_error("poly_eigen_sum: coefficients required up to n = " +
                             std::to_string(need)),
          required_n_max(need) {}
};

inline std::pair<std::int64_t, std::int64_t> support_range(const SmoothWindow& psi, double X) {
    auto lo = static_cast<std::int64_t>(std::floor(psi.lo() * X)) + 1;
    auto hi = static_cast<std::int64_t>(std::ceil(psi.hi() * X)) - 1;
    return {std::max<std::int64_t>(1, lo), hi};
}

/// sum_{r >= 1} lambda_f(|q(r)|) psi(r/X); finite because psi is compactly
/// supported. Lookups are cached by the value |q(r)|.
inline double poly_eigen_sum(const EigenformData& f, const QuadraticPoly& q,
                             const SmoothWindow& psi, double X) {
    auto [r_lo, r_hi] = support_range(psi, X);
    std::map<std::int64_t, double> lam_cache;
    double s = 0.0;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        double w = psi(static_cast<double>(r) / X);
        if (w == 0.0) continue;
        std::int64_t n = q.eval_abs(r);
        if (n < 1 || static_cast<std::size_t>(n) > f.n_max()) throw InsufficientCoefficients(n);
        auto it = lam_cache.find(n);
        if (it == lam_cache.end()) it = lam_cache.emplace(n, f.lambda(n)).first;
        s += it->second * w;
    }
    return s;
}

struct MissingWeights : std::runtime_error {
    std::vector<int> weights;
    explicit MissingWeights(std::vector<int> ks)
        : std::runtime_error("variance_direct: no eigenform data for contributing weights"),
          weights(std::move(ks)) {}
};

/// Even weights with u((k-K)/K^theta) > 0.
inline std::vector<int> contributing_weights(const ExperimentConfig& cfg, const SmoothWindow& u) {
    double kt = std::pow(cfg.K, cfg.theta);
    std::vector<int> ks;
    auto lo = static_cast<int>(std::floor(cfg.K + u.lo() * kt));
    auto hi = static_cast<int>(std::ceil(cfg.K + u.hi() * kt));
    for (int k = std::max(2, lo); k <= hi; ++k) {
        if (k % 2 != 0) continue;
        if (u((static_cast<double>(k) - cfg.K) / kt) > 0.0) ks.push_back(k);
    }
    return ks;
}

/// Direct route: (1/X) sum_k u((k-K)/K^theta) sum_f (omega_f / 2 pi^2)
/// |sum_r lambda_f(|q(r)|) psi(r/X)|^2. Weights with dim S_k = 0 contribute
/// nothing; any other weight must be covered by the supplied forms.
inline double variance_direct(const std::map<int, EigenformData>& forms, const QuadraticPoly& q,
                              const SmoothWindow& psi, const ExperimentConfig& cfg,
                              const SmoothWindow& u) {
    double kt = std::pow(cfg.K, cfg.theta);
    std::vector<int> missing;
    double total = 0.0;
    for (int k : contributing_weights(cfg, u)) {
        auto it = forms.find(k);
        if (it == forms.end()) {
            if (dim_cusp_forms_level1(k) > 0) missing.push_back(k);
            continue;
        }
        const EigenformData& f = it->second;
        if (f.omega <= 0.0)
            throw std::logic_error("variance_direct: harmonic weight not calibrated for k = " +
                                   std::to_string(k));
        double uk = u((static_cast<double>(k) - cfg.K) / kt);
        double s = poly_eigen_sum(f, q, psi, cfg.X);
        total += uk * (f.omega / (2.0 * kPi * kPi)) * s * s;
    }
    if (!missing.empty()) throw MissingWeights(missing);
    return total / cfg.X;
}

/// Sharp-window variant (weight 1 on |k-K| < K^theta); the smoothing
/// inequality says this never exceeds the smoothed sum.
inline double variance_sharp(const std::map<int, EigenformData>& forms, const QuadraticPoly& q,
                             const SmoothWindow& psi, const ExperimentConfig& cfg) {
    double kt = std::pow(cfg.K, cfg.theta);
    double total = 0.0;
    std::vector<int> missing;
    for (int k = 2; k <= static_cast<int>(cfg.K + kt) + 1; k += 2) {
        if (std::abs(static_cast<double>(k) - cfg.K) >= kt) continue;
        auto it = forms.find(k);
        if (it == forms.end()) {
            if (dim_cusp_forms_level1(k) > 0) missing.push_back(k);
            continue;
        }
        double s = poly_eigen_sum(it->second, q, psi, cfg.X);
        total += (it->second.omega / (2.0 * kPi * kPi)) * s * s;
    }
    if (!missing.empty()) throw MissingWeights(missing);
    return total / cfg.X;
}

// --- diagonal --------------------------------------------------------------

namespace detail {

inline std::int64_t isqrt_exact(std::int64_t d) {  // -1 if not a perfect square
    if (d < 0) return -1;
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(d))));
    for (std::int64_t t = std::max<std::int64_t>(0, s - 2); t <= s + 2; ++t)
        if (t * t == d) return t;
    return -1;
}

// r2 candidates with |q(r2)| = |q(r1)|: r1 itself, the mirror root of
// q(r2) = q(r1), and the (at most two) integer roots of q(r2) = -q(r1).
inline std::vector<std::int64_t> equal_abs_partners(const QuadraticPoly& q, std::int64_t r1) {
    std::vector<std::int64_t> out{r1};
    std::int64_t num = -(q.A2 * r1 + q.B2);
    if (num % q.A2 == 0) out.push_back(num / q.A2);
    // sign flip: A2 r^2 + B2 r + (A2 r1^2 + B2 r1 + 4C) = 0
    std::int64_t cc = q.A2 * r1 * r1 + q.B2 * r1 + 4 * q.C;
    std::int64_t disc = q.B2 * q.B2 - 4 * q.A2 * cc;
    std::int64_t s = isqrt_exact(disc);
    if (s >= 0) {
        for (std::int64_t sgn : {-1, 1}) {
            std::int64_t num2 = -q.B2 + sgn * s;
            if (num2 % (2 * q.A2) == 0) out.push_back(num2 / (2 * q.A2));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// I^{diag}/(2 pi^2): (1/(2 pi^2 X)) sum_{|q(r1)|=|q(r2)|} psi psi
/// sum_{k even} u((k-K)/K^theta); the (r1,r2) pairs come from exact integer
/// solving, never more than 4 partners per r1.
inline double diagonal_term(const QuadraticPoly& q, const SmoothWindow& psi,
                            const ExperimentConfig& cfg, const SmoothWindow& u) {
    double kt = std::pow(cfg.K, cfg.theta);
    double weight_sum = 0.0;
    for (int k : contributing_weights(cfg, u))
        weight_sum += u((static_cast<double>(k) - cfg.K) / kt);

    auto [r_lo, r_hi] = support_range(psi, cfg.X);
    double pairs = 0.0;
    for (std::int64_t r1 = r_lo; r1 <= r_hi; ++r1) {
        double w1 = psi(static_cast<double>(r1) / cfg.X);
        if (w1 == 0.0) continue;
        auto partners = detail::equal_abs_partners(q, r1);
        if (partners.size() > 4)
            throw std::logic_error("diagonal_term: more than 4 equal-|q| partners");
        for (std::int64_t r2 : partners) {
            if (r2 < r_lo || r2 > r_hi) continue;
            if (q.eval_abs(r2) != q.eval_abs(r1))
                throw std::logic_error("diagonal_term: partner solve mismatch");
            pairs += w1 * psi(static_cast<double>(r2) / cfg.X);
        }
    }
    return pairs * weight_sum / (2.0 * kPi * kPi * cfg.X);
}

// --- off-diagonal ----------------------------------------------------------

struct OffDiagonal {
    double value = 0.0;
    double tail_bound = 0.0;  // certificate for the truncated c-sum
    std::int64_t c_max = 0;
};

/// I^{OD}/(2 pi^2): the (r1, r2, c) triple sum with the weight-window k-sum,
/// truncated at c_max with a certificate from the Bessel series envelope
/// |J_nu(x)| <= (x/2)^nu e^{x^2/4} / nu!. Parallel over c, reduced in order.
inline OffDiagonal off_diagonal_term(const QuadraticPoly& q, const SmoothWindow& psi,
                                     const ExperimentConfig& cfg, const SmoothWindow& u,
                                     std::int64_t level = 1) {
    double kt = std::pow(cfg.K, cfg.theta);
    std::vector<int> ks = contributing_weights(cfg, u);
    if (ks.empty()) return {};
    std::vector<double> uk;
    int k_top = 0;
    for (int k : ks) {
        uk.push_back(u((static_cast<double>(k) - cfg.K) / kt));
        k_top = std::max(k_top, k);
    }

    auto [r_lo, r_hi] = support_range(psi, cfg.X);
    struct Node {
        std::int64_t r, qabs;
        double w;
    };
    std::vector<Node> nodes;
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
        double w = psi(static_cast<double>(r) / cfg.X);
        if (w != 0.0) nodes.push_back({r, q.eval_abs(r), w});
    }
    if (nodes.empty()) return {};

    std::int64_t q_top = 0;
    for (const auto& n1 : nodes) q_top = std::max(q_top, n1.qabs);
    // max over pairs of 2 pi sqrt(|q(r1) q(r2)|)
    double amp_top = 2.0 * kPi * static_cast<double>(q_top);
    OffDiagonal out;
    out.c_max = cfg.c_max > 0 ? cfg.c_max
                              : static_cast<std::int64_t>(std::ceil(2.0 * amp_top)) + level;

    // truncation certificate
    double cert = 0.0;
    {
        double r = static_cast<double>(out.c_max);
        for (const auto& n1 : nodes)
            for (const auto& n2 : nodes) {
                double amp = 2.0 * kPi * std::sqrt(static_cast<double>(n1.qabs) *
                                                   static_cast<double>(n2.qabs));
                if (2.0 * amp / r > 1.0)
                    throw std::runtime_error(
                        "off_diagonal_term: c_max too small to certify the tail");
                for (std::size_t j = 0; j < ks.size(); ++j) {
                    int nu = ks[j] - 1;
                    double tail = std::exp(static_cast<double>(nu) * std::log(amp) -
                                           std::lgamma(nu + 1.0) + 0.25 -
                                           (nu - 1) * std::log(r)) /
                                  static_cast<double>(nu - 1);
                    cert += uk[j] * 2.0 * kPi * n1.w * n2.w * tail;
                }
            }
        cert /= 2.0 * kPi * kPi * cfg.X;
        out.tail_bound = cert;
        if (cert > cfg.tail_target)
            throw std::runtime_error("off_diagonal_term: tail certificate above target");
    }

    std::size_t n_c = static_cast<std::size_t>(out.c_max / level);
    auto partial = parallel_map<double>(
        n_c,
        [&](std::size_t ci) {
            std::int64_t c = static_cast<std::int64_t>(ci + 1) * level;
            auto roots = unit_roots(c);
            detail::UnitTable units(c);
            // Kloosterman values for the distinct residues of |q(r)| mod c
            std::vector<std::int64_t> res(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) res[i] = mod_reduce(nodes[i].qabs, c);
            std::map<std::int64_t, int> index;
            std::vector<std::int64_t> distinct;
            std::vector<int> cls(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                auto [it, fresh] = index.emplace(res[i], static_cast<int>(distinct.size()));
                if (fresh) distinct.push_back(res[i]);
                cls[i] = it->second;
            }
            std::size_t nd = distinct.size();
            std::vector<cplx> kl(nd * nd, cplx(0.0));
            for (std::size_t t = 0; t < units.unit.size(); ++t) {
                std::int64_t x = units.unit[t], xi = units.inverse[t];
                for (std::size_t i = 0; i < nd; ++i) {
                    std::int64_t mx = mul_mod(distinct[i], x, c);
                    for (std::size_t j = 0; j < nd; ++j) {
                        std::int64_t idx = mx + mul_mod(distinct[j], xi, c);
                        if (idx >= c) idx -= c;
                        kl[i * nd + j] += roots->at_reduced(idx);
                    }
                }
            }
            double slice = 0.0;
            std::vector<double> bessel;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    cplx s = kl[static_cast<std::size_t>(cls[i]) * nd +
                                static_cast<std::size_t>(cls[j])];
                    if (std::abs(s.imag()) >= 1e-9 * static_cast<double>(c))
                        throw std::runtime_error("off_diagonal_term: Kloosterman reality failure");
                    if (s.real() == 0.0) continue;
                    double x = 4.0 * kPi *
                               std::sqrt(static_cast<double>(nodes[i].qabs) *
                                         static_cast<double>(nodes[j].qabs)) /
                               static_cast<double>(c);
                    double term = 0.0;
                    if (x >= 8.0) {
                        bessel = bessel_j_miller(k_top - 1, x);
                        for (std::size_t t = 0; t < ks.size(); ++t) {
                            double ik = (ks[t] % 4 == 0) ? 1.0 : -1.0;
                            term += uk[t] * ik * bessel[static_cast<std::size_t>(ks[t] - 1)];
                        }
                    } else {
                        for (std::size_t t = 0; t < ks.size(); ++t) {
                            double ik = (ks[t] % 4 == 0) ? 1.0 : -1.0;
                            term += uk[t] * ik * bessel_j_series(ks[t] - 1, x);
                        }
                    }
                    slice += s.real() / static_cast<double>(c) * nodes[i].w * nodes[j].w * term;
                }
            return slice;
        },
        cfg.threads);

    double total = 0.0;
    for (double p : partial) total += p;  // fixed c-order reduction
    out.value = 2.0 * kPi * total / (2.0 * kPi * kPi * cfg.X);
    return out;
}

struct TwoRouteCheck {
    double direct = 0.0;
    double diagonal = 0.0;
    double off_diagonal = 0.0;
    double residual = 0.0;   // |direct - diagonal - off_diagonal|
    double tolerance = 0.0;  // tol * max(1, |direct|)
    double tail_bound = 0.0;
    std::int64_t c_max = 0;
    bool pass() const { return residual < tolerance; }
};

inline TwoRouteCheck two_route_check(const std::map<int, EigenformData>& forms,
                                     const QuadraticPoly& q, const SmoothWindow& psi,
                                     const ExperimentConfig& cfg, const SmoothWindow& u) {
    TwoRouteCheck out;
    out.direct = variance_direct(forms, q, psi, cfg, u);
    out.diagonal = diagonal_term(q, psi, cfg, u);
    auto od = off_diagonal_term(q, psi, cfg, u);
    out.off_diagonal = od.value;
    out.tail_bound = od.tail_bound;
    out.c_max = od.c_max;
    out.residual = std::abs(out.direct - out.diagonal - out.off_diagonal);
    out.tolerance = cfg.tol_two_route * std::max(1.0, std::abs(out.direct));
    return out;
}

// --- cancellation profile ---------------------------------------------------

struct CancellationProfile {
    std::vector<double> X, value;  // |poly_eigen_sum| per grid point
    double slope = 0.0;            // least-squares slope of log|S| vs log X
    double scatter = 0.0;          // rms residual of the fit
};

/// Square-root-cancellation diagnostic for a single form: no pass/fail, the
/// theorem speaks about family averages.
inline CancellationProfile cancellation_profile(const EigenformData& f, const QuadraticPoly& q,
                                                const SmoothWindow& psi,
                                                const std::vector<double>& x_grid) {
    CancellationProfile out;
    std::vector<double> lx, ly;
    for (double X : x_grid) {
        double s = std::abs(poly_eigen_sum(f, q, psi, X));
        out.X.push_back(X);
        out.value.push_back(s);
        if (s > 0.0) {
            lx.push_back(std::log(X));
            ly.push_back(std::log(s));
        }
    }
    if (lx.size() >= 2) {
        double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double icept = (sy - out.slope * sx) / n;
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            double e = ly[i] - (icept + out.slope * lx[i]);
            rss += e * e;
        }
        out.scatter = std::sqrt(rss / n);
    }
    return out;
}

}  // namespace qvar
