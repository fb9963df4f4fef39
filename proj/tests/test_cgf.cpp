#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "tailforge/cgf.hpp"

using namespace tailforge;

TEST_CASE("psi at s=0 vanishes") {
    GnedinSinhSeq gs(1.0);
    auto v = psi(gs, 0.0);
    CHECK(v.value == 0.0);
}

TEST_CASE("psi single-indicator closed form") {
    ExplicitListSeq one({0.5});
    for (double s : {-3.0, -1.0, 0.5, 2.0, 10.0}) {
        auto v = psi(one, s);
        double expect = std::log((std::exp(s) + 1.0) / 2.0);
        CHECK(std::fabs(v.value - expect) < 1e-13 * std::max(1.0, std::fabs(expect)));
        CHECK(v.error_bound == 0.0);
    }
}

TEST_CASE("psi matches brute summation for geometric decay") {
    StretchedExpSeq se(1.0, 1.0);
    double s = 5.0;
    KahanSum brute;
    for (long k = 1; k <= 200; ++k)
        brute.add(std::log1p(se.value(k) * std::expm1(s)));
    auto v = psi(se, s, 1e-13);
    CHECK(std::fabs(v.value - brute.value()) < 1e-12 * std::fabs(v.value));
}

TEST_CASE("psi_prime closed forms") {
    std::vector<double> geo;
    for (int k = 1; k <= 30; ++k) geo.push_back(std::pow(2.0, -k));
    ExplicitListSeq gl(geo);
    auto v0 = psi_prime(gl, 0.0);
    CHECK(std::fabs(v0.value - (1.0 - std::pow(2.0, -30))) < 1e-14);

    ExplicitListSeq half(std::vector<double>(7, 0.5));
    for (double s : {-2.0, 0.0, 1.5}) {
        auto v = psi_prime(half, s);
        double expect = 7.0 * std::exp(s) / (std::exp(s) + 1.0);
        CHECK(std::fabs(v.value - expect) < 1e-13 * expect);
    }
}

TEST_CASE("psi_prime sums r_k at s=0: analytic series") {
    // sum_k lambda^2/((pi k)^2+lambda^2) = (lambda coth lambda - 1)/2
    for (double lambda : {0.5, 1.0, 2.0}) {
        GnedinSinhSeq gs(lambda);
        auto v = psi_prime(gs, 0.0, 1e-10);
        double expect = (lambda / std::tanh(lambda) - 1.0) / 2.0;
        CHECK(std::fabs(v.value - expect) < 1e-9 * std::max(1.0, expect));
        CHECK(std::fabs(v.value - expect) <= v.error_bound + 1e-13);
    }
    PolynomialSeq poly(1.0, 2.0);
    auto v = psi_prime(poly, 0.0, 1e-10);
    CHECK(std::fabs(v.value - pi * pi / 6.0) < 1e-9);
}

TEST_CASE("psi_double_prime closed values") {
    ExplicitListSeq half({0.5});
    CHECK(std::fabs(psi_double_prime(half, 0.0).value - 0.25) < 1e-15);

    ExplicitListSeq ones({1.0, 1.0});
    CHECK(psi_double_prime(ones, 3.0).value == 0.0);

    // sum r_k(1-r_k) at s=0 for r_k = k^{-2}
    PolynomialSeq poly(1.0, 2.0);
    double expect = pi * pi / 6.0 - std::pow(pi, 4) / 90.0;
    CHECK(std::fabs(psi_double_prime(poly, 0.0).value - expect) < 1e-9);
}

TEST_CASE("large-tilt expansions for the quadratic-decay family") {
    PolynomialSeq poly(1.0, 2.0);
    double s = 10.0;
    auto v1 = psi_prime(poly, s, 1e-10);
    double lead1 = pi * std::exp(s / 2.0) / 2.0 - 0.5;
    CHECK(std::fabs(v1.value - lead1) < 0.1);

    double s2 = 20.0;
    auto v2 = psi_double_prime(poly, s2, 1e-10);
    double lead2 = pi / 4.0 * std::exp(s2 / 2.0);
    CHECK(std::fabs(v2.value / lead2 - 1.0) < 0.01);
}

TEST_CASE("tilted probabilities") {
    GnedinCoshSeq gc(1.0);
    for (long k = 1; k <= 20; ++k)
        CHECK(std::fabs(tilted_prob(gc, 0.0, k) - gc.value(k)) < 1e-15);
    ExplicitListSeq half({0.5});
    CHECK(std::fabs(tilted_prob(half, std::log(3.0), 1) - 0.75) < 1e-15);
    // increasing in s
    double prev = 0.0;
    for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        double p = tilted_prob(gc, s, 3);
        CHECK(p > prev);
        CHECK(p <= 1.0);
        prev = p;
    }
}

TEST_CASE("tilted split consistency") {
    GnedinSinhSeq gs(1.0);
    double s = 6.0;
    auto full = psi_prime(gs, s, 1e-11);
    KahanSum head;
    long K = 50;
    for (long k = 1; k <= K; ++k) head.add(tilted_prob(gs, s, k));
    auto tail = tilted_tail_sum(gs, s, K + 1, 1e-11);
    CHECK(std::fabs(head.value() + tail.value - full.value) <
          full.error_bound + tail.error_bound + 1e-12 * full.value);
}

TEST_CASE("monotone and convex") {
    std::vector<SequencePtr> seqs = {
        std::make_shared<PolynomialSeq>(1.0, 2.0),
        std::make_shared<StretchedExpSeq>(1.0, 1.0),
        std::make_shared<GinibreGammaSeq>(2.0),
        std::make_shared<RecordsGeomSeq>(0.5),
    };
    for (const auto& seq : seqs) {
        INFO(seq->family());
        double prev = -1e300;
        for (double s : {-4.0, -1.0, 0.0, 2.0, 5.0, 9.0}) {
            auto d1 = psi_prime(*seq, s, 1e-10);
            CHECK(d1.value - d1.error_bound > prev);
            prev = d1.value + d1.error_bound;
            CHECK(psi_double_prime(*seq, s, 1e-10).value > 0.0);
        }
    }
}

TEST_CASE("characteristic-function modulus bound") {
    const double B1 = std::pow(pi, 3) / 6.0;
    const double B2 =
        std::sqrt(std::pow(pi * pi / 2.0 + 1.0, 2) + pi * pi) *
        std::pow(pi, 3) / 6.0;
    const double B3 =
        std::sqrt(std::pow(pi, 8) / 16.0 + std::pow(pi, 6) / 4.0);
    const double B = B1 + B2 + B3 + 1.0;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> up(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        double p = up(rng);
        double u = (2.0 * up(rng) - 1.0) * pi;
        double re = 1.0 - p + p * std::cos(u);
        double im = p * std::sin(u);
        double lhs = std::hypot(re, im);
        double rhs = B * std::exp(-u * u * p * (1.0 - p) / (2.0 * B));
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("core identity") {
    // (1/2)x10, n=6: the saddle is s = log(3/2) exactly
    ExplicitListSeq half(std::vector<double>(10, 0.5));
    double s = std::log(1.5);
    auto ci = core_identity(half, s, 6);
    CHECK(std::fabs(ci.gap) < 1e-13);

    // random finite sequences at random s: head - tail == n - psi'(s)
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> up(0.01, 0.99);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> vals;
        int m = 5 + static_cast<int>(up(rng) * 20);
        for (int i = 0; i < m; ++i) vals.push_back(up(rng));
        ExplicitListSeq seq(vals);
        double s_rand = -2.0 + 5.0 * up(rng);
        long n = 1 + static_cast<long>(up(rng) * (m - 1));
        double gap = core_identity_gap(seq, s_rand, n);
        double expect = n - psi_prime(seq, s_rand).value;
        CHECK(std::fabs(gap - expect) < 1e-12 * std::max(1.0, std::fabs(expect)));
    }
}

TEST_CASE("error bounds honest under tolerance changes") {
    PolynomialSeq poly(1.0, 2.0);
    for (double s : {0.0, 4.0, 12.0}) {
        auto tight = psi_prime(poly, s, 1e-11);
        auto loose = psi_prime(poly, s, 1e-6);
        CHECK(std::fabs(tight.value - loose.value) <=
              tight.error_bound + loose.error_bound + 1e-13 * std::fabs(tight.value));
    }
    GnedinSinhSeq gs(2.0);
    for (double s : {3.0, 8.0}) {
        auto tight = psi(gs, s, 1e-11);
        auto loose = psi(gs, s, 1e-6);
        CHECK(std::fabs(tight.value - loose.value) <=
              tight.error_bound + loose.error_bound + 1e-13 * std::fabs(tight.value));
    }
}
