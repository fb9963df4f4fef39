#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "tailforge/saddle.hpp"

using namespace tailforge;

TEST_CASE("closed-form saddle for identical indicators") {
    ExplicitListSeq half(std::vector<double>(10, 0.5));
    auto sol = solve(half, 6);
    CHECK(std::fabs(sol.s - std::log(1.5)) < 1e-11);
    CHECK(std::fabs(sol.residual) <= default_residual_tol(6));

    double I = legendre(half, 6);
    double expect = 6.0 * std::log(1.5) - 10.0 * std::log(1.25);
    CHECK(std::fabs(I - expect) < 1e-9);

    CHECK_THROWS_AS(solve(half, 10), no_solution_error);
    CHECK_THROWS_AS(solve(half, 4), level_too_small_error);  // psi'(0) = 5
}

TEST_CASE("quadratic-decay saddle matches the log formula") {
    // numeric s_n minus [beta log(n+1/2) + beta log(beta sin(pi/beta)/(pi c^{1/beta}))]
    // shrinks like n^{-min(2,beta)}
    for (double beta : {2.0, 1.5}) {
        PolynomialSeq poly(1.0, beta);
        double rate = std::min(2.0, beta);
        for (long n : {50L, 100L, 200L}) {
            auto sol = solve(poly, n);
            double formula = beta * std::log(n + 0.5) +
                             beta * std::log(beta * std::sin(pi / beta) / pi);
            INFO("beta=" << beta << " n=" << n);
            CHECK(std::fabs(sol.s - formula) < 5.0 * std::pow(n, -rate));
        }
    }
}

TEST_CASE("gnedin saddle growth") {
    GnedinSinhSeq gs(1.0);
    auto sol = solve(gs, 50);
    double approx = 2.0 * std::log(50.5) + 2.0 * std::log(2.0);
    CHECK(std::fabs(sol.s - approx) < 1e-2);
}

TEST_CASE("family saddles track numeric saddles") {
    // beta > 1: s = n^beta + n^{(beta-1)/2}, residual of order e^{-n^{(beta-1)/2}}
    StretchedExpSeq fast(1.0, 2.0);
    double prev_crit = 1e300;
    for (long n : {30L, 60L, 100L}) {
        auto fam = family_saddle(fast, n);
        double nd = static_cast<double>(n);
        CHECK(fam.s == std::pow(nd, 2.0) + std::pow(nd, 0.5));
        CHECK(std::fabs(fam.residual) < 3.0 * std::exp(-std::sqrt(nd)));
        double crit = std::fabs(fam.residual) * fam.s;
        CHECK(crit < prev_crit);
        prev_crit = crit;
    }

    // beta = 1: s = n + 1/2 - log c
    StretchedExpSeq geo(1.0, 1.0);
    for (long n : {20L, 40L}) {
        auto fam = family_saddle(geo, n);
        CHECK(fam.s == n + 0.5);
        auto num = solve(geo, n);
        CHECK(std::fabs(num.s - fam.s) < 1e-3);
    }

    // beta < 1 with the alpha correction
    StretchedExpSeq slow(1.0, 0.3);
    double prev = 1e300;
    for (long n : {200L, 400L, 800L}) {
        auto fam = family_saddle(slow, n);
        double crit = std::fabs(fam.residual) * fam.s;
        INFO("n=" << n << " residual*s=" << crit);
        CHECK(crit < prev);
        prev = crit;
    }

    CHECK_THROWS_AS(family_saddle(GnedinSinhSeq(1.0), 10),
                    unsupported_family_error);
}

TEST_CASE("alpha correction coefficients") {
    // A_1 = -2(1/beta - 1) c_1 with c_1 = pi^2/12
    for (double beta : {0.3, 0.25, 0.2}) {
        auto A = stretched_exp_alpha_coeffs(beta);
        REQUIRE(A.size() >= 1);
        CHECK(std::fabs(A[0] - (-2.0 * (1.0 / beta - 1.0) * pi * pi / 12.0)) <
              1e-12 * std::fabs(A[0]));
    }
    // quadratic relation tying A_2 to A_1
    double beta = 0.2;
    auto A = stretched_exp_alpha_coeffs(beta);
    REQUIRE(A.size() >= 2);
    double ib = 1.0 / beta;
    double lhs = A[1] / beta + binom_real(ib, 2) * A[0] * A[0] +
                 (2.0 / beta) * (ib - 1.0) * (ib - 2.0) * c_coeff(1) * A[0] +
                 (2.0 / beta) * binom_real(ib - 1.0, 3) * c_coeff(3);
    CHECK(std::fabs(lhs) < 1e-9 * std::fabs(A[1] / beta));
    // beta > 1/3 has no correction at all
    CHECK(stretched_exp_alpha_coeffs(0.4).empty());
}

TEST_CASE("saddle monotone in n") {
    std::vector<SequencePtr> seqs = {
        std::make_shared<PolynomialSeq>(1.0, 2.0),
        std::make_shared<StretchedExpSeq>(1.0, 1.0),
        std::make_shared<GinibreGammaSeq>(2.0),
    };
    for (const auto& seq : seqs) {
        INFO(seq->family());
        double prev = -1.0;
        for (long n : {5L, 8L, 13L, 21L, 34L}) {
            auto sol = solve(*seq, n);
            CHECK(sol.s > prev);
            prev = sol.s;
            CHECK(std::fabs(sol.residual) <= default_residual_tol(n));
        }
    }
}

TEST_CASE("tight and loose solves agree") {
    GnedinSinhSeq gs(1.0);
    auto a = solve(gs, 30, 1e-6);
    auto b = solve(gs, 30, 1e-11);
    CHECK(std::fabs(a.s - b.s) <= 1e-6 / a.psi_double_prime + 1e-12);
}
