#include <catch2/catch_amalgamated.hpp>

#include "qvar/oscillatory.hpp"

using namespace qvar;

namespace {
const SmoothWindow& test_window() {
    static auto g = SmoothWindow::plateau(30.0, 38.0, 42.0, 50.0, 40, "bessel-test");
    return g;
}
}  // namespace

TEST_CASE("fourier transform basics") {
    auto& g = test_window();
    SECTION("zero frequency gives the mass") {
        cplx v = fourier_transform(g, 0.0);
        CHECK(v.imag() == Catch::Approx(0.0).margin(1e-12));
        CHECK(v.real() > 4.0);   // at least the flat part, width 4
        CHECK(v.real() < 12.1);  // at most the support, width 20
        CHECK(v.real() == Catch::Approx(derivative_l1(g, 0)).margin(1e-8));
    }
    SECTION("conjugate symmetry for real windows") {
        for (double t : {0.3, 1.7, 2.9})
            REQUIRE(std::abs(fourier_transform(g, -t) - std::conj(fourier_transform(g, t))) <
                    1e-10);
    }
    SECTION("decay: (1+t^2)|ghat| stays bounded") {
        double bound = 0.0;
        for (double t = -50.0; t <= 50.0; t += 2.11)
            bound = std::max(bound, (1.0 + t * t) * std::abs(fourier_transform(g, t)));
        REQUIRE(bound < 50.0);
    }
}

TEST_CASE("Bessel-sum identity (even weights)") {
    auto& g = test_window();
    for (double x : {0.5, 5.0, 50.0}) {
        auto c = bessel_sum_identity(x, g);
        INFO("x = " << x);
        REQUIRE(c.residual < 1e-6);
    }
    SECTION("residual stable under refinement") {
        auto c0 = bessel_sum_identity(50.0, g, 1e-9, 0);
        auto c1 = bessel_sum_identity(50.0, g, 1e-9, 1);
        REQUIRE(std::abs(c1.residual - c0.residual) < 1e-8);
    }
    SECTION("rejects windows that straddle zero") {
        CHECK_THROWS_AS(bessel_sum_identity(1.0, SmoothWindow::family_u()), std::domain_error);
    }
}

TEST_CASE("Fresnel identities") {
    auto& g = test_window();
    for (double x : {1.0, 10.0}) {
        auto pr = fresnel_pair(x, g);
        INFO("x = " << x);
        REQUIRE(pr[0].residual < 1e-6);
        REQUIRE(pr[1].residual < 1e-6);
    }
    SECTION("residual stable under node doubling") {
        auto a = fresnel_identity(10.0, g, FresnelParity::sin_variant, 1e-8, 0);
        auto b = fresnel_identity(10.0, g, FresnelParity::sin_variant, 1e-8, 1);
        REQUIRE(b.residual < 2.0 * a.residual + 1e-9);
    }
}

TEST_CASE("stationary points") {
    double s = std::sqrt(1.5) / kPi;
    SECTION("unperturbed cubic") {
        auto p = stationary_points(3.0, 0.0);
        CHECK(p.left == -s);
        CHECK(p.middle == 0.0);
        CHECK(p.right == s);
    }
    SECTION("middle root follows y/x with the right sign") {
        auto p = stationary_points(1e4, 1.0);
        CHECK(p.middle > 0.0);
        CHECK(p.middle == Catch::Approx(1.0 / (2.0 * kPi * 1e4)).epsilon(1e-3));
        CHECK(std::abs(phase_d1(1e4, 1.0, p.middle)) < 1e-10 * 1e4);
        // f'(0) = 2 pi y > 0 and f''(0) < 0
        CHECK(phase_d1(1e4, 1.0, 0.0) == Catch::Approx(2.0 * kPi));
        CHECK(phase_d2(1e4, 0.0) < 0.0);
    }
    SECTION("residual gate on all three roots") {
        for (double x : {10.0, 100.0, 5000.0}) {
            auto p = stationary_points(x, 0.3);
            for (double b : {p.left, p.middle, p.right})
                REQUIRE(std::abs(phase_d1(x, 0.3, b)) < 1e-10 * std::max(x, 0.3));
        }
    }
    SECTION("coalescence is signalled") {
        CHECK_THROWS_AS(stationary_points(1.0, 10.0), std::domain_error);
    }
}

TEST_CASE("stationary phase expansion vs quadrature") {
    auto a = stationary_phase_check(100.0, 1.0);
    auto b = stationary_phase_check(1000.0, 1.0);
    CHECK(a.rel_error < 2e-3);
    CHECK(b.rel_error < a.rel_error);  // decay trend across the decade
    // the absolute error carries the paper's 1/x envelope
    CHECK(a.rel_error * std::abs(a.quadrature) * 100.0 < 0.1);
    CHECK(b.rel_error * std::abs(b.quadrature) * 1000.0 < 0.1);
}

TEST_CASE("nonstationary tail bound") {
    // interval beyond the outer stationary points, f' monotone there
    for (double x : {100.0, 1000.0}) {
        auto p = nonstationary_tail_probe(x, 1.0, 0.6, 1.2);
        REQUIRE(std::abs(p.integral) <= p.bound);
    }
    CHECK_THROWS_AS(nonstationary_tail_probe(100.0, 1.0, -0.1, 0.5), std::domain_error);
}

TEST_CASE("c_r moments") {
    SECTION("c_0 of a bump is positive and finite") {
        double c0 = c_r_norm(test_window(), 0);
        CHECK(c0 > 0.0);
        CHECK(std::isfinite(c0));
    }
    SECTION("scaling law across the K grid at theta = 1/2") {
        auto u = SmoothWindow::family_u();
        const double theta = 0.5;
        std::vector<double> ratio0, ratio2;
        for (double K : {50.0, 100.0, 200.0, 400.0}) {
            double kt = std::pow(K, theta);
            auto gk = u.scaled(kt, K - 1.0);
            auto crs = c_r_norms(gk, {0, 1, 2, 4});
            // c_r(g_K) * K^{(r-1)theta} bounded across the grid
            ratio0.push_back(crs[0] * std::pow(K, -theta));
            ratio2.push_back(crs[2] * std::pow(K, theta));
            // c_{r+2}/c_r tracks K^{-2 theta}
            double dec = (crs[2] / crs[0]) * std::pow(K, 2.0 * theta);
            CHECK(dec > 0.05);
            CHECK(dec < 20.0);
        }
        auto spread = [](const std::vector<double>& v) {
            return *std::max_element(v.begin(), v.end()) /
                   *std::min_element(v.begin(), v.end());
        };
        REQUIRE(spread(ratio0) < 4.0);
        REQUIRE(spread(ratio2) < 4.0);
    }
}

TEST_CASE("Parseval pairing") {
    // int ghat(t) f(t) dt = int g(t) fhat(t) dt for two windows
    auto g = SmoothWindow::plateau(1.0, 2.0, 3.0, 4.0);
    auto f = SmoothWindow::plateau(0.5, 1.5, 3.5, 4.5);
    auto lhs_f = [&](double t) { return fourier_transform(g, t) * f(t); };
    auto rhs_f = [&](double t) { return g(t) * fourier_transform(f, t); };
    cplx lhs = integrate_adaptive(lhs_f, f.lo(), f.hi(), 1e-10, 64).value;
    cplx rhs = integrate_adaptive(rhs_f, g.lo(), g.hi(), 1e-10, 64).value;
    REQUIRE(std::abs(lhs - rhs) < 1e-8);
}
