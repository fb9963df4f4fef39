#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cgf.hpp"
#include "common.hpp"
#include "regime.hpp"
#include "saddle.hpp"
#include "sequences.hpp"

namespace tailforge {

struct TailEstimate {
    long n;
    RegimeLabel label;
    SaddleSolution saddle;
    std::optional<double> c0_used;
    double log_point;  // estimated log P{Y = n}
    double log_tail;   // estimated log P{Y >= n}
};

inline TailEstimate estimate(const Sequence& seq, long n, RegimeLabel label,
                             std::optional<double> c0 = std::nullopt) {
    if (label == RegimeLabel::undetermined)
        throw cannot_estimate_error("estimate: regime is undetermined");
    if (label == RegimeLabel::C && !c0)
        throw cannot_estimate_error(
            "estimate: the constant-variance formula needs the atom at zero");
    TailEstimate out;
    out.n = n;
    out.label = label;
    out.c0_used = c0;
    out.saddle = solve(seq, n);
    double base = out.saddle.psi - out.saddle.s * static_cast<double>(n);
    switch (label) {
        case RegimeLabel::B:
            out.log_point = base - 0.5 * std::log(2.0 * pi *
                                                  out.saddle.psi_double_prime);
            break;
        case RegimeLabel::A:
            out.log_point = base;
            break;
        default:
            out.log_point = std::log(*c0) + base;
            break;
    }
    out.log_tail = out.log_point;
    return out;
}

inline TailEstimate estimate(const Sequence& seq, const RegimeReport& rep,
                             long n) {
    std::optional<double> c0;
    if (rep.c_data && rep.c_data->c0) c0 = rep.c_data->c0->value;
    return estimate(seq, n, rep.label, c0);
}

struct TransferPoint {
    long n;
    double log_head_cond;  // log of s_n e^{-s_n} sum_{k<=n} |eps_k| / r_k
    double log_tail_cond;  // log of s_n e^{s_n} sum_{k>n} |eps_k| r_k
};

struct TransferReport {
    double log_A;  // log prod_k (1 + eps_k)
    double log_A_error;
    double A;
    std::vector<TransferPoint> conditions;
};

// Validates that the perturbed sequence inherits the base sequence's tail
// estimates up to the constant factor A, and computes that factor.
inline TransferReport transfer(const PerturbedSeq& pert,
                               const std::vector<long>& n_grid,
                               double tol = 1e-12) {
    const Sequence& base = *pert.base_ptr();
    TransferReport rep;

    KahanSum log_a;
    rep.log_A_error = 0.0;
    const long cap = static_cast<long>(max_terms());
    for (long K = 1;; ++K) {
        if (base.support() >= 0 && K > base.support()) break;
        double e = pert.epsilon(K);
        if (e <= -1.0)
            throw invalid_perturbation_error("transfer: eps_k <= -1");
        log_a.add(std::log1p(e));
        double t = pert.epsilon_abs_tail(K);
        // |log(1+x)| <= 2|x| once |x| <= 1/2
        if (K >= 8 && t <= 0.5 && (2.0 * t <= tol || K >= cap)) {
            rep.log_A_error = 2.0 * t;
            break;
        }
        if (K >= cap)
            throw truncation_failure("transfer: product did not stabilize",
                                     log_a.value(), 2.0 * t, K);
    }
    rep.log_A = log_a.value();
    rep.A = std::exp(rep.log_A);

    for (long n : n_grid) {
        auto sol = solve(base, n);
        std::vector<double> head_terms;
        for (long k = 1; k <= n; ++k) {
            double e = std::fabs(pert.epsilon(k));
            if (e > 0.0) head_terms.push_back(std::log(e) - base.log_value(k));
        }
        double lse_head =
            head_terms.empty() ? neg_inf : logsumexp(head_terms);

        // incremental log-domain accumulation: terms scaled by the running
        // reference so the check stays O(1) per index
        double ref = neg_inf;
        KahanSum scaled;
        auto add_term = [&](double lt) {
            if (lt == neg_inf) return;
            if (ref == neg_inf) {
                ref = lt;
                scaled.add(1.0);
            } else if (lt - ref > 40.0) {
                double old = scaled.value() * std::exp(ref - lt);
                scaled = KahanSum();
                scaled.add(old);
                ref = lt;
                scaled.add(1.0);
            } else {
                scaled.add(std::exp(lt - ref));
            }
        };
        double lse_tail = neg_inf;
        for (long k = n + 1;; ++k) {
            if (base.support() >= 0 && k > base.support()) break;
            double e = std::fabs(pert.epsilon(k));
            if (e > 0.0) add_term(std::log(e) + base.log_value(k));
            if (k >= n + 8) {
                lse_tail = ref == neg_inf
                               ? neg_inf
                               : ref + std::log(scaled.value());
                double rem = pert.epsilon_abs_tail(k) > 0.0
                                 ? std::log(pert.epsilon_abs_tail(k)) +
                                       base.log_value(k + 1)
                                 : neg_inf;
                if (rem <= std::log(tol) + lse_tail || rem == neg_inf) break;
            }
            if (k - n > static_cast<long>(max_terms()))
                throw truncation_failure("transfer: tail condition sum",
                                         lse_tail, 0.0, k - n);
        }
        if (lse_tail == neg_inf && ref != neg_inf)
            lse_tail = ref + std::log(scaled.value());

        TransferPoint pt;
        pt.n = n;
        pt.log_head_cond = std::log(sol.s) - sol.s + lse_head;
        pt.log_tail_cond = std::log(sol.s) + sol.s + lse_tail;
        rep.conditions.push_back(pt);
    }

    if (rep.conditions.size() >= 2) {
        const auto& first = rep.conditions.front();
        const auto& last = rep.conditions.back();
        if (last.log_head_cond > first.log_head_cond ||
            last.log_tail_cond > first.log_tail_cond)
            throw transfer_invalid_error(
                "transfer: condition sums do not decay along the grid");
    }
    return rep;
}

}  // namespace tailforge
