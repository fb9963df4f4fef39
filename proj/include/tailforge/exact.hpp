#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "cgf.hpp"
#include "common.hpp"
#include "saddle.hpp"
#include "sequences.hpp"
#include "specfun.hpp"

namespace tailforge {

struct LogPmf {
    std::vector<double> log_p;  // index j: log P{Y_K = j}, j = 0..n_max
    long K_used;
    double stabilization_delta;  // max |change| over the last K-doubling
    double tail_drop_bound;      // sum_{k>K} r_k
};

namespace detail {

// fold one Bernoulli(r) factor into the log-domain table
inline void fold_indicator(std::vector<double>& L, double log_r) {
    double r = std::exp(log_r);
    if (r >= 1.0) {
        for (long j = static_cast<long>(L.size()) - 1; j >= 1; --j)
            L[j] = L[j - 1];
        L[0] = neg_inf;
        return;
    }
    double log_q = log_r > -37.0 ? std::log1p(-r) : -r;
    for (long j = static_cast<long>(L.size()) - 1; j >= 1; --j)
        L[j] = log_add(L[j] + log_q, L[j - 1] + log_r);
    L[0] += log_q;
}

// convolve a truncated table with a Poisson(mean) count standing in for the
// dropped indicators: their probabilities are individually tiny, so the
// Poisson completion is exact to second order in the dropped masses and the
// residual is what the stabilization check measures
inline std::vector<double> poisson_complete(const std::vector<double>& L,
                                            double mean) {
    if (mean <= 0.0) return L;
    long n_max = static_cast<long>(L.size()) - 1;
    std::vector<double> out(L.size(), neg_inf);
    for (long j = 0; j <= n_max; ++j) {
        std::vector<double> terms;
        for (long i = 0; i <= j; ++i) {
            if (L[j - i] == neg_inf) continue;
            double lp = -mean + i * std::log(mean) - std::lgamma(i + 1.0);
            terms.push_back(L[j - i] + lp);
        }
        if (!terms.empty()) out[j] = logsumexp(terms);
    }
    return out;
}

}  // namespace detail

inline LogPmf exact_pmf(const Sequence& seq, long n_max,
                        double rel_tol = 1e-6) {
    if (n_max < 0) throw parameter_domain_error("exact_pmf: n_max >= 0");
    std::vector<double> L(n_max + 1, neg_inf);
    L[0] = 0.0;
    const long support = seq.support();
    long K0 = std::max(2 * n_max, seq.k0());
    if (support >= 0) K0 = support;
    for (long k = 1; k <= K0; ++k)
        detail::fold_indicator(L, seq.log_value(k));

    LogPmf out;
    out.K_used = K0;
    out.stabilization_delta = 0.0;
    if (support >= 0) {
        out.log_p = L;
        out.tail_drop_bound = 0.0;
        return out;
    }

    auto drop_mean = [&](long K) {
        return tilted_tail_sum(seq, 0.0, K + 1, 1e-12).value;
    };
    long K = K0;
    std::vector<double> completed =
        detail::poisson_complete(L, drop_mean(K));
    const long cap = static_cast<long>(max_terms());
    for (;;) {
        long K_next = 2 * K;
        for (long k = K + 1; k <= K_next; ++k)
            detail::fold_indicator(L, seq.log_value(k));
        K = K_next;
        std::vector<double> next =
            detail::poisson_complete(L, drop_mean(K));
        double delta = 0.0;
        for (long j = 0; j <= n_max; ++j) {
            if (next[j] == neg_inf && completed[j] == neg_inf) continue;
            delta = std::max(delta, std::fabs(next[j] - completed[j]));
        }
        completed.swap(next);
        out.stabilization_delta = delta;
        out.K_used = K;
        if (delta <= rel_tol) break;
        if (2 * K > cap)
            throw truncation_failure("exact_pmf: table did not stabilize",
                                     completed[n_max], delta, K);
    }
    out.log_p = completed;
    out.tail_drop_bound =
        std::exp(seq.log_tail_bound(std::max(K, seq.tail_bound_min())));
    return out;
}

// log P{Poisson(t0) >= n} with t0 = sum |log(1 - r_k)|; an upper bound for
// log P{Y >= n}. Returns 0 (the trivial bound) when some r_k = 1.
inline double poissonization_bound(const Sequence& seq, long n) {
    if (n <= 0) return 0.0;
    KahanSum t0;
    long k = 1;
    double tail = 0.0;
    for (;; ++k) {
        if (seq.support() >= 0 && k > seq.support()) break;
        double r = seq.value(k);
        if (r >= 1.0) return 0.0;
        t0.add(-std::log1p(-r));
        if (seq.support() < 0 && k >= seq.tail_bound_min() && k >= 64) {
            // |log(1-r)| <= 2r for r <= 1/2, so twice the tail bound closes t0
            // from above; the bound is increasing in t0
            // loose closure is fine: the tail is added to t0 and the Poisson
            // bound is increasing in t0, so validity is kept either way
            tail = 2.0 * std::exp(seq.log_tail_bound(k));
            if (tail <= 1e-6 * std::max(1.0, t0.value())) break;
        }
        if (k > static_cast<long>(max_terms()))
            throw truncation_failure("poissonization_bound: t0 sum", t0.value(),
                                     tail, k);
    }
    double t0_upper = t0.value() + tail;
    return log_reg_lower_gamma(static_cast<double>(n), t0_upper);
}

// log P{Y >= n} from a pmf table, completed by the Poissonization bound
// beyond the end of the table
inline double exact_ccdf(const Sequence& seq, const LogPmf& pmf, long n,
                         double rel_tol = 1e-6) {
    long n_max = static_cast<long>(pmf.log_p.size()) - 1;
    if (n < 0 || n > n_max)
        throw parameter_domain_error("exact_ccdf: n out of table range");
    std::vector<double> terms(pmf.log_p.begin() + n, pmf.log_p.end());
    double body = logsumexp(terms);
    double correction = (seq.support() >= 0 && n_max >= seq.support())
                            ? neg_inf
                            : poissonization_bound(seq, n_max + 1);
    if (correction - body > std::log(rel_tol))
        throw table_too_short_error(
            "exact_ccdf: mass beyond the table is not negligible");
    return log_add(body, correction);
}

// closed-form pmfs for the two trigonometric-rate families
inline double gnedin_sinh_log_pmf(double lambda, long n) {
    if (lambda <= 0.0 || n < 0)
        throw parameter_domain_error("gnedin_sinh_log_pmf");
    double log_sinh = lambda + std::log1p(-std::exp(-2.0 * lambda)) -
                      std::log(2.0);
    return (2.0 * n + 1.0) * std::log(lambda) - std::lgamma(2.0 * n + 2.0) -
           log_sinh;
}

inline double gnedin_cosh_log_pmf(double lambda, long n) {
    if (lambda <= 0.0 || n < 0)
        throw parameter_domain_error("gnedin_cosh_log_pmf");
    double log_cosh = lambda + std::log1p(std::exp(-2.0 * lambda)) -
                      std::log(2.0);
    return 2.0 * n * std::log(lambda) - std::lgamma(2.0 * n + 1.0) - log_cosh;
}

namespace detail {

// counter-based uniform draws: stream position is (seed, sample, slot), so
// changing the truncation index never shifts earlier draws
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double u01(std::uint64_t seed, std::uint64_t sample,
                  std::uint64_t slot) {
    std::uint64_t x = mix64(seed ^ mix64(sample ^ mix64(slot)));
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Poisson count by CDF inversion from a single uniform
inline long poisson_inverse(double mean, double u) {
    if (mean <= 0.0) return 0;
    double p = std::exp(-mean);
    double cdf = p;
    long j = 0;
    while (u > cdf && j < 100000) {
        ++j;
        p *= mean / static_cast<double>(j);
        cdf += p;
    }
    return j;
}

}  // namespace detail

struct McEstimate {
    long n;
    double s;
    double log_point_estimate;  // -inf when hits == 0
    double std_error_log;
    long samples;
    std::uint64_t seed;
    long hits;
    long K_head;       // per-index sampling up to here
    double tail_mean;  // tilted mass handled as a pooled count beyond K_head
    double mean_y;     // empirical tilted mean, compare against psi'(s_n)
};

inline McEstimate mc_tilted(const Sequence& seq, long n, long samples,
                            std::uint64_t seed) {
    if (samples < 1000)
        throw parameter_domain_error("mc_tilted: samples >= 1000");
    auto sol = solve(seq, n);
    const double s = sol.s;

    // per-index sampling while the tilted success chance is non-negligible
    const double head_floor = 1e-4;
    std::vector<double> head;
    for (long k = 1;; ++k) {
        if (seq.support() >= 0 && k > seq.support()) break;
        double p = detail::tilted_from_logs(seq.log_value(k), s);
        if (p < head_floor && k > n && k >= seq.tail_bound_min()) break;
        head.push_back(p);
        if (k > static_cast<long>(max_terms()))
            throw truncation_failure("mc_tilted: head did not close", 0.0, p,
                                     k);
    }
    const long K_head = static_cast<long>(head.size());
    // residual tilted mass: successes beyond the head are individually rare
    // (each < 1e-4), so the pooled count is drawn as a Poisson with the
    // completed tilted tail mean
    double tail_mean = 0.0;
    if (seq.support() < 0 || K_head < seq.support())
        tail_mean = tilted_tail_sum(seq, s, K_head + 1, 1e-9).value;

    long hits = 0;
    KahanSum total_y;
    for (long i = 0; i < samples; ++i) {
        long y = 0;
        for (long j = 0; j < K_head; ++j)
            if (detail::u01(seed, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(j + 1)) < head[j])
                ++y;
        y += detail::poisson_inverse(
            tail_mean, detail::u01(seed, static_cast<std::uint64_t>(i), 0));
        total_y.add(static_cast<double>(y));
        if (y == n) ++hits;
    }

    McEstimate out;
    out.n = n;
    out.s = s;
    out.samples = samples;
    out.seed = seed;
    out.hits = hits;
    out.K_head = K_head;
    out.tail_mean = tail_mean;
    out.mean_y = total_y.value() / static_cast<double>(samples);
    if (hits == 0) {
        out.log_point_estimate = neg_inf;
        out.std_error_log = std::numeric_limits<double>::infinity();
        return out;
    }
    double f =
        static_cast<double>(hits) / static_cast<double>(samples);
    out.log_point_estimate =
        sol.psi - s * static_cast<double>(n) + std::log(f);
    out.std_error_log =
        std::sqrt((1.0 - f) / (f * static_cast<double>(samples)));
    return out;
}

}  // namespace tailforge
