#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qvar/kloosterman.hpp"
#include "oracles.hpp"

using namespace qvar;

namespace {

// Verification draws keep gamma >= 1, B, C >= 0 so that |q(a)| = q(a) as
// integers on [0, c) — the regime in which the section-2.5 identities hold.
struct ParamDraw {
    std::mt19937_64 rng;
    explicit ParamDraw(uint64_t seed) : rng(seed) {}
    int64_t in(int64_t lo, int64_t hi) {  // inclusive
        return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
    }
};

double tol_c2(int64_t c) { return 1e-6 * static_cast<double>(c) * static_cast<double>(c); }

}  // namespace

TEST_CASE("twisted sum worked examples") {
    CHECK(std::abs(twisted_sum_direct(TwistedSumParams(1, 0, 0, 0, 0, 1)) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(twisted_sum_direct(TwistedSumParams(1, 0, 1, 0, 0, 2))) < 1e-12);
    SECTION("against the O(c^3) brute oracle") {
        for (auto [g, B, C, u, v, c] :
             std::vector<std::array<int64_t, 6>>{{1, 1, 1, 1, 2, 5},
                                                 {2, 1, 0, 1, 1, 5},
                                                 {3, 2, 5, 4, 1, 12},
                                                 {1, 0, 1, 3, 2, 9},
                                                 {5, 3, 2, 0, 6, 14}}) {
            cplx got = twisted_sum_direct(TwistedSumParams(g, B, C, u, v, c));
            cplx want = oracle::twisted(g, B, C, u, v, c);
            REQUIRE(std::abs(got - want) < tol_c2(c));
        }
    }
}

TEST_CASE("twisted grid matches per-point evaluation") {
    for (int64_t c : {5, 9, 12}) {
        auto grid = twisted_sum_grid(2, 1, 3, c);
        for (int64_t u = 0; u < c; ++u)
            for (int64_t v = 0; v < c; ++v) {
                cplx single = twisted_sum_direct(TwistedSumParams(2, 1, 3, u, v, c));
                REQUIRE(std::abs(grid[static_cast<size_t>(u * c + v)] - single) < tol_c2(c));
            }
    }
}

TEST_CASE("gauss route equals direct route") {
    SECTION("spec cross-oracle cases") {
        for (auto [g, B, C, u, v, c] :
             std::vector<std::array<int64_t, 6>>{{1, 0, 1, 0, 0, 3}, {2, 1, 0, 1, 1, 5}}) {
            TwistedSumParams p(g, B, C, u, v, c);
            REQUIRE(std::abs(twisted_sum_gauss(p) - twisted_sum_direct(p)) < tol_c2(c));
        }
    }
    SECTION("all u,v for odd c <= 45, random gamma,B,C") {
        ParamDraw draw(20240501);
        for (int64_t c = 1; c <= 45; c += 2) {
            for (int trial = 0; trial < 4; ++trial) {
                int64_t g = draw.in(1, 12);
                if (std::gcd(4 * g, c) != 1) continue;
                int64_t B = draw.in(0, 12), C = draw.in(0, 12);
                auto direct = twisted_sum_grid(g, B, C, c);
                auto gauss = twisted_sum_gauss_grid(g, B, C, c);
                for (size_t i = 0; i < direct.size(); ++i)
                    REQUIRE(std::abs(direct[i] - gauss[i]) < tol_c2(c));
            }
        }
    }
    SECTION("precondition") {
        CHECK_THROWS_AS(twisted_sum_gauss(TwistedSumParams(1, 0, 0, 0, 0, 2)), std::domain_error);
        CHECK_THROWS_AS(twisted_sum_gauss(TwistedSumParams(3, 0, 0, 0, 0, 9)), std::domain_error);
    }
}

TEST_CASE("vanishing when (v,c) does not divide u") {
    // any p with (v,c) not dividing u and gcd(4gamma,c)=1 gives 0 (Prop 2.34route)
    TwistedSumParams p(1, 0, 0, 1, 0, 3);
    auto w = vanishing_witness(p);
    CHECK(w.cls == VanishClass::vanishes_proven);
    CHECK(w.magnitude < 1e-6 * 9.0);

    // (v,c) = c divides u = 0: the criterion never fires
    auto w2 = vanishing_witness(TwistedSumParams(1, 1, 1, 0, 0, 5));
    CHECK(w2.cls != VanishClass::vanishes_proven);

    // gcd(4c, gamma) != 1: classified numerically
    auto w3 = vanishing_witness(TwistedSumParams(3, 0, 1, 1, 0, 6));
    CHECK((w3.cls == VanishClass::vanishes_numeric || w3.cls == VanishClass::nonzero));
}

TEST_CASE("multiplicativity residual") {
    SECTION("trivial split is exactly zero") {
        TwistedSumParams p(3, 1, 2, 4, 5, 21);
        CHECK(twisted_multiplicativity_residual(p, 1, 21) == 0.0);
        CHECK(twisted_multiplicativity_residual(p, 21, 1) == 0.0);
    }
    SECTION("worked case") {
        TwistedSumParams p(1, 0, 1, 0, 0, 15);
        CHECK(twisted_multiplicativity_residual(p, 3, 5) < 1e-6);
    }
    SECTION("seeded random draws, c <= 200") {
        ParamDraw draw(7);
        const std::pair<int64_t, int64_t> splits[] = {{3, 5},  {4, 9},  {5, 8}, {7, 9},
                                                      {8, 25}, {9, 16}, {11, 13}, {7, 27}};
        for (int i = 0; i < 200; ++i) {
            auto [c1, c2] = splits[draw.in(0, 7)];
            int64_t c = c1 * c2;
            TwistedSumParams p(draw.in(1, 20), draw.in(0, 20), draw.in(0, 20),
                               draw.in(0, c - 1), draw.in(0, c - 1), c);
            REQUIRE(twisted_multiplicativity_residual(p, c1, c2) < tol_c2(c));
        }
    }
    SECTION("rejects bad splits") {
        TwistedSumParams p(1, 0, 1, 0, 0, 12);
        CHECK_THROWS_AS(twisted_multiplicativity_residual(p, 2, 6), std::domain_error);
        CHECK_THROWS_AS(twisted_multiplicativity_residual(p, 3, 5), std::invalid_argument);
    }
}

TEST_CASE("swap symmetry in (u,a) <-> (v,b)") {
    for (int64_t c = 1; c <= 30; ++c) {
        auto grid = twisted_sum_grid(2, 3, 1, c);
        for (int64_t u = 0; u < c; ++u)
            for (int64_t v = 0; v <= u; ++v)
                REQUIRE(std::abs(grid[static_cast<size_t>(u * c + v)] -
                                 grid[static_cast<size_t>(v * c + u)]) < 1e-9 * tol_c2(c) + 1e-9);
    }
}

TEST_CASE("bound report") {
    SECTION("c = 1") {
        auto r = bound_report(TwistedSumParams(1, 0, 0, 0, 0, 1));
        CHECK(r.observed == Catch::Approx(1.0));
        CHECK(r.reference >= 1.0);
    }
    SECTION("vanishing branch magnitudes") {
        ParamDraw draw(11);
        for (int i = 0; i < 40; ++i) {
            int64_t c = draw.in(2, 60);
            TwistedSumParams p(draw.in(1, 10), draw.in(0, 10), draw.in(0, 10),
                               draw.in(0, c - 1), draw.in(0, c - 1), c);
            auto r = bound_report(p);
            if (r.vanishing_branch && std::gcd(4 * p.c, p.gamma) == 1)
                REQUIRE(r.observed < tol_c2(c));
        }
    }
    SECTION("prime c, gamma = 1: ratio stays modest") {
        for (int64_t c : {5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59}) {
            for (int64_t u : {0, 1, 3})
                for (int64_t v : {0, 1, 4}) {
                    auto r = bound_report(TwistedSumParams(1, 2, 3, u, v, c));
                    REQUIRE(r.ratio <= 10.0);
                }
        }
    }
}

TEST_CASE("half-integer coefficients") {
    SECTION("odd c: inverse-of-2 reduction satisfies multiplicativity") {
        for (auto [c1, c2] : std::vector<std::pair<int64_t, int64_t>>{{3, 5}, {5, 7}, {3, 7}}) {
            int64_t c = c1 * c2;
            int64_t A2 = 1, B2 = 3, C = 2, u = 4, v = 9;
            int64_t d1 = mod_inverse(c1, c2).value, d2 = mod_inverse(c2, c1).value;
            cplx lhs = twisted_sum_halfint(A2, B2, C, u, v, c);
            cplx f1 = twisted_sum_direct(
                twisted_params_halfint(A2 * c2, B2, C * d2, u, v, c1));
            cplx f2 = twisted_sum_direct(
                twisted_params_halfint(A2 * c1, B2, C * d1, u, v, c2));
            REQUIRE(std::abs(lhs - f1 * f2) < tol_c2(c));
        }
    }
    SECTION("even c: halved modulus against doubled coefficients") {
        cplx halved = twisted_sum_halfint(1, 1, 3, 2, 3, 10);
        cplx expect = twisted_sum_direct(TwistedSumParams(1, 1, 3, 2, 3, 5));
        CHECK(std::abs(halved - expect) < 1e-9);
        CHECK_THROWS_AS(twisted_params_halfint(1, 1, 3, 2, 3, 10), std::domain_error);
    }
    SECTION("rejects non-integer-valued coefficients") {
        CHECK_THROWS_AS(twisted_params_halfint(1, 2, 0, 0, 0, 5), std::invalid_argument);
    }
    SECTION("bound report on the half-integer family") {
        for (int64_t c : {6, 9, 10, 15, 21, 22}) {
            auto r = bound_report_halfint(1, 3, 2, 1, 2, c);
            REQUIRE(r.c1 * r.c2 == c);
            REQUIRE(std::gcd(r.c1, int64_t(2)) == 1);
            REQUIRE(std::isfinite(r.ratio));
        }
    }
}
