#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qvar/qexp.hpp"

using namespace qvar;

TEST_CASE("euler product pentagonal expansion") {
    auto e = QExpansion::euler_product(30);
    // 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + q^22 + q^26 - ...
    CHECK(e[0] == 1);
    CHECK(e[1] == -1);
    CHECK(e[2] == -1);
    CHECK(e[3] == 0);
    CHECK(e[5] == 1);
    CHECK(e[7] == 1);
    CHECK(e[12] == -1);
    CHECK(e[15] == -1);
    CHECK(e[22] == 1);
    CHECK(e[26] == 1);
}

TEST_CASE("delta coefficients") {
    auto d = delta_qexp(300);
    CHECK(d[1] == 1);
    CHECK(d[2] == -24);
    CHECK(d[3] == 252);
    CHECK(d[4] == -1472);
    CHECK(d[5] == 4830);
    CHECK(d[6] == -6048);
    CHECK(d[7] == -16744);
    CHECK(d[8] == 84480);
    CHECK(d[9] == -113643);
    CHECK(d[10] == -115920);
    // tau(4) is forced by the Hecke relation from tau(2): (-24)^2 = tau(4) + 2^11
    CHECK(d[2] * d[2] == d[4] + 2048);

    SECTION("independent route: Jacobi cube then three squarings") {
        auto j = QExpansion::euler_product(300).pow(3);
        // sparse check of Jacobi's identity prod(1-q^n)^3 = sum (-1)^m (2m+1) q^{m(m+1)/2}
        CHECK(j[0] == 1);
        CHECK(j[1] == -3);
        CHECK(j[3] == 5);
        CHECK(j[6] == -7);
        CHECK(j[2] == 0);
        auto d2 = j.pow(8).shifted(1);
        for (std::size_t n = 0; n <= 300; ++n) REQUIRE(d2[n] == d[n]);
    }
}

TEST_CASE("eisenstein series") {
    auto e4 = eisenstein4(12);
    CHECK(e4[0] == 1);
    CHECK(e4[1] == 240);
    CHECK(e4[2] == 2160);   // 240 * sigma3(2) = 240 * 9
    CHECK(e4[3] == 6720);   // 240 * 28
    auto e6 = eisenstein6(12);
    CHECK(e6[0] == 1);
    CHECK(e6[1] == -504);
    CHECK(e6[2] == -16632);  // -504 * 33
}

TEST_CASE("karatsuba against schoolbook") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 3; ++trial) {
        std::size_t n = 257 + 91 * static_cast<std::size_t>(trial);
        QExpansion a(n), b(n);
        for (std::size_t i = 0; i <= n; ++i) {
            a.at(i) = static_cast<long>(rng() % 2001) - 1000;
            b.at(i) = static_cast<long>(rng() % 2001) - 1000;
        }
        auto fast = a.mul(b);
        std::vector<BigInt> slow(2 * n + 1);
        detail::mul_school(a.coefficients().data(), n + 1, b.coefficients().data(), n + 1,
                           slow.data());
        for (std::size_t i = 0; i <= n; ++i) REQUIRE(fast[i] == slow[i]);
    }
}

TEST_CASE("series arithmetic contracts") {
    auto a = QExpansion::one(10);
    auto b = QExpansion::euler_product(20);
    CHECK_THROWS_AS(a.mul(b), std::invalid_argument);  // no silent truncation shrinkage
    CHECK(QExpansion::euler_product(50).pow(0)[0] == 1);
    auto sh = QExpansion::one(5).shifted(2);
    CHECK(sh[2] == 1);
    CHECK(sh[0] == 0);
}
