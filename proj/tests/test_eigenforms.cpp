#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qvar/eigenforms.hpp"

using namespace qvar;

TEST_CASE("dimension table") {
    CHECK(dim_cusp_forms_level1(2) == 0);
    CHECK(dim_cusp_forms_level1(10) == 0);
    CHECK(dim_cusp_forms_level1(12) == 1);
    CHECK(dim_cusp_forms_level1(14) == 0);
    CHECK(dim_cusp_forms_level1(16) == 1);
    CHECK(dim_cusp_forms_level1(18) == 1);
    CHECK(dim_cusp_forms_level1(20) == 1);
    CHECK(dim_cusp_forms_level1(22) == 1);
    CHECK(dim_cusp_forms_level1(24) == 2);
    CHECK(dim_cusp_forms_level1(26) == 1);
    CHECK(dim_cusp_forms_level1(13) == 0);
}

TEST_CASE("internal eigenforms") {
    SECTION("weight 12 equals the delta expansion") {
        auto f = eigenform(12, 150);
        auto d = delta_qexp(150);
        for (std::size_t n = 1; n <= 150; ++n) REQUIRE(f.a[n] == d[n]);
    }
    SECTION("weight 16 against a schoolbook product oracle") {
        std::size_t n = 60;
        auto f = eigenform(16, n);
        auto d = delta_qexp(n);
        auto e4 = eisenstein4(n);
        std::vector<BigInt> slow(2 * n + 1);
        detail::mul_school(d.coefficients().data(), n + 1, e4.coefficients().data(), n + 1,
                           slow.data());
        for (std::size_t i = 1; i <= n; ++i) REQUIRE(f.a[i] == slow[i]);
    }
    SECTION("normalization") {
        for (int w : {12, 16, 18, 20, 22, 26}) REQUIRE(eigenform(w, 10).a[1] == 1);
    }
    SECTION("unsupported weights are rejected") {
        CHECK_THROWS_AS(eigenform(14, 10), std::invalid_argument);
        CHECK_THROWS_AS(eigenform(24, 10), std::invalid_argument);  // dim 2
        CHECK_THROWS_AS(eigenform(13, 10), std::invalid_argument);
    }
}

TEST_CASE("Hecke relations are exact integers") {
    SECTION("weight 12 worked case: (-24)^2 = tau(4) + 2^11") {
        auto f = eigenform(12, 10);
        CHECK(hecke_relation_residual(f, 2, 2) == 0);
        CHECK(f.a[2] * f.a[2] - f.a[4] == 2048);
    }
    SECTION("coprime arguments multiply") {
        auto f = eigenform(18, 50);
        CHECK(f.a[6] == f.a[2] * f.a[3]);
        CHECK(f.a[35] == f.a[5] * f.a[7]);
    }
    SECTION("exhaustive m,n <= 40 across all supported weights") {
        for (int w : {12, 16, 18, 20, 22, 26}) {
            auto f = eigenform(w, 1600);
            for (std::int64_t m = 1; m <= 40; ++m)
                for (std::int64_t n = m; n <= 40; ++n)
                    REQUIRE(hecke_relation_residual(f, m, n) == 0);
        }
    }
    SECTION("signals insufficient truncation") {
        auto f = eigenform(12, 10);
        CHECK_THROWS_AS(hecke_relation_residual(f, 4, 5), std::out_of_range);
    }
}

TEST_CASE("Deligne bound and lambda") {
    for (int w : {12, 16, 26}) {
        auto f = eigenform(w, 1000);
        for (std::int64_t p : qvar::detail::primes_up_to(1000))
            REQUIRE(std::abs(f.lambda(p)) <= 2.0 + 1e-12);
    }
    SECTION("lambda multiplicativity in the floating image") {
        auto f = eigenform(12, 400);
        for (auto [m, n] : std::vector<std::pair<std::int64_t, std::int64_t>>{
                 {2, 3}, {4, 9}, {5, 49}, {8, 27}}) {
            double lhs = f.lambda(m) * f.lambda(n);
            double rhs = f.lambda(m * n);
            REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-13));
        }
    }
}

TEST_CASE("CSV round trip and gates") {
    auto f = eigenform(12, 60);
    std::stringstream ss;
    save_eigenvalues(f, ss);

    SECTION("round trip is exact") {
        auto g = load_eigenvalues(ss);
        REQUIRE(g.level == 1);
        REQUIRE(g.weight == 12);
        REQUIRE(g.n_max() == 60);
        for (std::size_t n = 1; n <= 60; ++n) REQUIRE(g.a[n] == f.a[n]);
    }
    SECTION("a(1) != 1 is rejected") {
        EigenformData bad = f;
        bad.a[1] = 2;
        std::stringstream s2;
        save_eigenvalues(bad, s2);
        CHECK_THROWS_AS(load_eigenvalues(s2), EigenformRejected);
    }
    SECTION("corrupted a(4) is rejected by the Hecke gate at (2,2)") {
        EigenformData bad = f;
        bad.a[4] += 1;
        std::stringstream s2;
        save_eigenvalues(bad, s2);
        try {
            load_eigenvalues(s2);
            FAIL("corrupt data was accepted");
        } catch (const EigenformRejected& e) {
            CHECK(std::string(e.what()).find("(2,2)") != std::string::npos);
        }
    }
    SECTION("Deligne violation is rejected") {
        EigenformData bad = f;
        bad.a[59] = BigInt("99999999999999999999999999");  // 59 prime, way over 2 p^{11/2}
        std::stringstream s2;
        save_eigenvalues(bad, s2);
        CHECK_THROWS_AS(load_eigenvalues(s2), EigenformRejected);
    }
    SECTION("malformed input is rejected") {
        std::stringstream s2("level,weight,n_max\n1,12,3\nn,a_n\n1,1\n3,252\n");
        CHECK_THROWS_AS(load_eigenvalues(s2), EigenformRejected);  // skips n = 2
        std::stringstream s3("nonsense\n");
        CHECK_THROWS_AS(load_eigenvalues(s3), EigenformRejected);
    }
}
