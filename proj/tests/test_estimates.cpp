#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "tailforge/estimates.hpp"

using namespace tailforge;

TEST_CASE("regime formulas differ by the gaussian prefactor") {
    PolynomialSeq poly(1.0, 2.0);
    long n = 40;
    auto b = estimate(poly, n, RegimeLabel::B);
    auto a = estimate(poly, n, RegimeLabel::A);
    double pref = -0.5 * std::log(2.0 * pi * b.saddle.psi_double_prime);
    CHECK(std::fabs((b.log_point - a.log_point) - pref) < 1e-12);
    CHECK(b.log_tail == b.log_point);

    auto c = estimate(poly, n, RegimeLabel::C, 0.37);
    CHECK(std::fabs((c.log_point - a.log_point) - std::log(0.37)) < 1e-12);
}

TEST_CASE("gaussian-corrected estimate matches a binomial point mass") {
    ExplicitListSeq half(std::vector<double>(10, 0.5));
    auto est = estimate(half, 6, RegimeLabel::B);
    double exact = std::lgamma(11.0) - std::lgamma(7.0) - std::lgamma(5.0) -
                   10.0 * std::log(2.0);
    CHECK(std::fabs(est.log_point - exact) < 0.05);
}

TEST_CASE("bare estimate is the legendre transform") {
    StretchedExpSeq fast(1.0, 2.0);
    long n = 8;
    auto est = estimate(fast, n, RegimeLabel::A);
    double I = legendre(fast, n);
    CHECK(std::fabs(est.log_point + I) <
          std::fabs(est.saddle.residual) * est.saddle.s + 1e-9);
}

TEST_CASE("estimate from a classification report") {
    StretchedExpSeq geo(1.0, 1.0);
    auto rep = classify(geo, {20, 40, 80, 160});
    REQUIRE(rep.label == RegimeLabel::C);
    auto est = estimate(geo, rep, 30);
    double base = est.saddle.psi - est.saddle.s * 30.0;
    CHECK(std::fabs(est.log_point - std::log(rep.c_data->c0->value) - base) <
          1e-12);
}

TEST_CASE("estimate refuses what it cannot justify") {
    PolynomialSeq poly(1.0, 2.0);
    CHECK_THROWS_AS(estimate(poly, 30, RegimeLabel::undetermined),
                    cannot_estimate_error);
    CHECK_THROWS_AS(estimate(poly, 30, RegimeLabel::C),
                    cannot_estimate_error);
}

TEST_CASE("transfer constant for the matched quadratic pair") {
    // base r_k = lambda^2 (pi k)^{-2}, perturbed r_k = lambda^2/((pi k)^2 +
    // lambda^2): the product of (1 + eps_k) telescopes to lambda / sinh(lambda)
    for (double lambda : {0.5, 1.0, 2.0}) {
        auto base = std::make_shared<PolynomialSeq>(
            lambda * lambda / (pi * pi), 2.0);
        auto pert = perturb(
            base,
            [lambda](long k) {
                double pk2 = pi * pi * static_cast<double>(k) * k;
                return -lambda * lambda / (pk2 + lambda * lambda);
            },
            [lambda](long K) {
                // sum_{k>K} lambda^2/(pi k)^2 dominates each |eps_k|
                return lambda * lambda / (pi * pi * static_cast<double>(K));
            },
            1);
        auto rep = transfer(dynamic_cast<const PerturbedSeq&>(*pert),
                            {20, 40, 80});
        CHECK(rep.log_A_error < 1e-5);
        CHECK(std::fabs(rep.log_A - std::log(lambda / std::sinh(lambda))) <
              2.0 * rep.log_A_error + 1e-12);
        REQUIRE(rep.conditions.size() == 3);
        CHECK(rep.conditions.back().log_head_cond <
              rep.conditions.front().log_head_cond);
        CHECK(rep.conditions.back().log_tail_cond <
              rep.conditions.front().log_tail_cond);
    }
}

TEST_CASE("zero perturbation has unit transfer constant") {
    auto base = std::make_shared<GnedinSinhSeq>(1.0);
    auto pert = perturb(base, [](long) { return 0.0; },
                        [](long) { return 0.0; }, 1);
    auto rep = transfer(dynamic_cast<const PerturbedSeq&>(*pert), {10, 20});
    CHECK(rep.A == 1.0);
    CHECK(rep.log_A_error == 0.0);
}

TEST_CASE("estimates decrease strictly in the level") {
    std::vector<SequencePtr> seqs = {
        std::make_shared<PolynomialSeq>(1.0, 2.0),
        std::make_shared<GnedinSinhSeq>(1.0),
        std::make_shared<StretchedExpSeq>(1.0, 2.0),
    };
    std::vector<RegimeLabel> labels = {RegimeLabel::B, RegimeLabel::B,
                                       RegimeLabel::A};
    for (size_t i = 0; i < seqs.size(); ++i) {
        INFO(seqs[i]->family());
        double prev = 0.0;
        for (long n : {5L, 9L, 14L, 20L, 30L}) {
            auto est = estimate(*seqs[i], n, labels[i]);
            CHECK(std::isfinite(est.log_point));
            CHECK(est.log_point < prev);
            prev = est.log_point;
        }
    }
}

TEST_CASE("transfer constant links base and perturbed estimates") {
    double lambda = 1.0;
    PolynomialSeq base(lambda * lambda / (pi * pi), 2.0);
    GnedinSinhSeq pert(lambda);
    double log_A = std::log(lambda / std::sinh(lambda));
    double prev_gap = 1e300;
    for (long n : {25L, 50L, 100L}) {
        auto eb = estimate(base, n, RegimeLabel::B);
        auto ep = estimate(pert, n, RegimeLabel::B);
        double gap = std::fabs((ep.log_point - eb.log_point) - log_A);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.05);
}

TEST_CASE("transfer rejects non-decaying perturbations") {
    auto base = std::make_shared<StretchedExpSeq>(1.0, 1.0);
    auto pert = perturb(
        base, [](long) { return 0.5; },
        [base](long K) {
            long Km = std::max(K, base->tail_bound_min());
            double t = tail_sum_bound(*base, Km).bound;
            for (long k = K + 1; k <= Km; ++k) t += base->value(k);
            return 0.5 * t;
        },
        1);
    CHECK_THROWS_AS(transfer(dynamic_cast<const PerturbedSeq&>(*pert),
                             {10, 20, 40}),
                    transfer_invalid_error);
}

TEST_CASE("one-minus-exp thinning stays within half the rate") {
    // u_k = 1 - e^{-r_k} = r_k (1 + eps_k) with |eps_k| <= r_k / 2
    GnedinSinhSeq gs(1.0);
    for (long k = 1; k <= 50; ++k) {
        double r = gs.value(k);
        double eps = (1.0 - std::exp(-r)) / r - 1.0;
        CHECK(std::fabs(eps) <= r / 2.0);
    }
}
