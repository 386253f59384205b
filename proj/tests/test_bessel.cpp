#include <catch2/catch_amalgamated.hpp>

#include "qvar/bessel.hpp"
#include "oracles.hpp"

using namespace qvar;

namespace {
constexpr double kTau = 6.28318530717958647692529;  // 2*pi
}

TEST_CASE("bessel_j basics") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(0, 1.0) == Catch::Approx(0.7651976865579665514497175).epsilon(1e-13));
    // series-oracle value at the trace-formula argument
    CHECK(bessel_j(11, 2.0 * kTau) ==
          Catch::Approx(0.2913379679389660805973202).epsilon(1e-12));
    CHECK_THROWS_AS(bessel_j(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(1, -1.0), std::invalid_argument);
}

TEST_CASE("known values across regimes") {
    CHECK(bessel_j(7, 13.3) == Catch::Approx(-0.2295596126708744178017398).epsilon(1e-12));
    CHECK(bessel_j(40, 700.0) == Catch::Approx(-0.02947031611769700709761734).epsilon(1e-11));
    CHECK(bessel_j(200, 1000.0) == Catch::Approx(0.004183531525022075645503912).epsilon(1e-11));
    CHECK(bessel_j(11, kTau) ==
          Catch::Approx(0.00314782524237730571826723).epsilon(1e-12));
}

TEST_CASE("agreement with the extended-precision oracle") {
    // k <= 200, x <= 1e3; grid chosen away from Bessel zeros
    const int ks[] = {0, 1, 2, 5, 11, 25, 60, 121, 200};
    const double xs[] = {0.05, 0.7, 3.1, 8.0, 12.56637, 47.0, 153.0, 411.5, 997.0};
    for (int k : ks)
        for (double x : xs) {
            double got = bessel_j(k, x);
            double want = oracle::bessel_j(k, x);
            REQUIRE(std::abs(got - want) <= 1e-10 * std::abs(want) + 1e-300);
        }
}

TEST_CASE("three-term recurrence") {
    for (double x : {0.1, 1.0, 10.0, 100.0}) {
        auto j = bessel_j_all(102, x);
        for (int k = 1; k <= 100; ++k) {
            double lhs = j[static_cast<size_t>(k - 1)] + j[static_cast<size_t>(k + 1)];
            double rhs = (2.0 * k / x) * j[static_cast<size_t>(k)];
            double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
            REQUIRE(std::abs(lhs - rhs) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("normalization identity") {
    for (double x : {0.3, 2.0, 17.0, 55.5, 100.0}) {
        auto j = bessel_j_all(static_cast<int>(x) + 60, x);
        double s = j[0];
        for (size_t k = 2; k < j.size(); k += 2) s += 2.0 * j[k];
        REQUIRE(s == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("series envelope for 0 < x < 1") {
    // |J_k(x)| <= e (x/2)^k
    for (int k = 0; k <= 50; k += 5) {
        for (int i = 1; i <= 1000; ++i) {
            double x = static_cast<double>(i) / 1000.5;
            double env = std::exp(1.0) * std::pow(0.5 * x, k);
            REQUIRE(std::abs(bessel_j(k, x)) <= env + 1e-300);
        }
    }
}

TEST_CASE("dispatch continuity across the series/Miller boundary") {
    for (int k : {0, 3, 11}) {
        double xb = std::max(8.0, 0.5 * k);
        double lo = bessel_j(k, xb * (1.0 - 1e-9));
        double hi = bessel_j(k, xb * (1.0 + 1e-9));
        REQUIRE(lo == Catch::Approx(hi).margin(1e-9));
    }
}
