#pragma once

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "sequences.hpp"
#include "specfun.hpp"

namespace tailforge {

enum class Weight { Psi, PsiPrime, PsiDoublePrime };

namespace detail {

// All per-indicator quantities are driven by t = log r_k + s, so that
// nothing overflows even when e^s alone would (s grows like n^beta for
// the fastest-decaying families).

inline double tilted_from_logs(double lr, double s) {
    double t = lr + s;
    double r = std::exp(lr);
    if (t >= 0.0) return 1.0 / (1.0 + (1.0 - r) * std::exp(-t));
    return std::exp(t) / (std::exp(t) + (1.0 - r));
}

inline double one_minus_tilted(double lr, double s) {
    double t = lr + s;
    double r = std::exp(lr);
    if (t >= 0.0) {
        double q = (1.0 - r) * std::exp(-t);
        return q / (1.0 + q);
    }
    return (1.0 - r) / (std::exp(t) + (1.0 - r));
}

// y = r(e^s - 1), computed without overflow; |y| <= e^t for s > 0
inline double y_term(double lr, double s) {
    if (s > 0.0) return std::exp(lr + s) * (-std::expm1(-s));
    return std::exp(lr) * std::expm1(s);
}

inline double weight_term(Weight w, double lr, double s) {
    switch (w) {
        case Weight::Psi: {
            double t = lr + s;
            double r = std::exp(lr);
            if (t > 0.0) return t + std::log1p((1.0 - r) * std::exp(-t));
            return std::log1p(y_term(lr, s));
        }
        case Weight::PsiPrime:
            return tilted_from_logs(lr, s);
        case Weight::PsiDoublePrime:
            return tilted_from_logs(lr, s) * one_minus_tilted(lr, s);
    }
    return 0.0;
}

// d/dx of the weight integrand at real x in the tail region (r e^s <= 1/2),
// given rp = r'(x); used for Euler-Maclaurin endpoint corrections.
inline double weight_term_deriv(Weight w, double r, double rp, double s) {
    double lr = std::log(r);
    double y = y_term(lr, s);
    double d = 1.0 + y;  // = r e^s + 1 - r
    switch (w) {
        case Weight::Psi:
            return rp * y / (r * d);
        case Weight::PsiPrime:
            return rp * std::exp(s - 2.0 * std::log1p(y));
        case Weight::PsiDoublePrime:
            return rp * std::exp(s) *
                   ((1.0 - 2.0 * r) * d - 2.0 * (1.0 - r) * y) / (d * d * d);
    }
    return 0.0;
}

struct TailCompletion {
    double value;
    double error;
};

// sum_{k>=m} f(k) for a smooth power-decay tail: integral (substituted to
// a bounded integrand on [0,1]) plus Euler-Maclaurin endpoint terms.
inline TailCompletion complete_smooth_tail(const Sequence& seq, Weight w,
                                           double s, long m, double tol_abs) {
    const double beta = seq.tail_power();
    const double C = seq.tail_coeff();
    const double md = static_cast<double>(m);
    const double p = 1.0 / (beta - 1.0);

    // endpoint limit of the substituted integrand at u = 0
    double base = std::exp(std::log(C) + (1.0 - beta) * std::log(md) + s) /
                  (beta - 1.0);
    double g0;
    switch (w) {
        case Weight::Psi:
            g0 = base * (-std::expm1(-s));
            break;
        default:
            g0 = base;
            break;
    }

    auto g = [&](double u) -> double {
        if (u == 0.0) return g0;
        double x = md * std::pow(u, -p);
        double r = seq.value_at(x);
        if (r <= 0.0) return 0.0;
        double f = weight_term(w, std::log(r), s);
        return f * (md * p / u) * std::pow(u, -p);
    };
    double integral = adaptive_simpson(g, 0.0, 1.0, tol_abs / 8.0);

    double rm = seq.value_at(md);
    double fm = weight_term(w, std::log(rm), s);
    double fpm = weight_term_deriv(w, rm, seq.dvalue_at(md), s);
    TailCompletion out;
    out.value = integral + 0.5 * fm - fpm / 12.0;
    out.error = std::fabs(fpm) / 6.0 + tol_abs / 4.0;
    return out;
}

inline BoundedValue sum_weight(const Sequence& seq, double s, double tol,
                               Weight w, long from = 1) {
    if (!(tol > 0.0)) throw parameter_domain_error("tolerance must be > 0");
    if (!std::isfinite(s)) throw parameter_domain_error("s must be finite");
    const long cap = max_terms();
    const long m_sup = seq.support();
    const bool smooth = seq.smooth_tail();
    const double s_plus = std::max(s, 0.0);
    const long k_tail = std::max(seq.tail_bound_min(), seq.k0());

    KahanSum acc;
    long k = from - 1;
    long next_check = from + 15;
    for (;;) {
        ++k;
        if (m_sup >= 0 && k > m_sup)
            return {acc.value(), 0.0, k - from};
        if (k - from + 1 > cap)
            throw truncation_failure("series did not reach tolerance",
                                     acc.value(), std::exp(s_plus + seq.log_tail_bound(std::max(k - 1, k_tail))),
                                     k - from);
        acc.add(weight_term(w, seq.log_value(k), s));
        if (k < k_tail || k < next_check) continue;
        next_check = k + 1 + k / 16;

        double tol_abs = tol * std::max(1.0, std::fabs(acc.value()));
        double log_tol = std::log(tol_abs);
        double plain = s_plus + seq.log_tail_bound(k);
        if (plain <= log_tol)
            return {acc.value(), std::exp(plain), k - from + 1};

        if (smooth) {
            double xm = static_cast<double>(k + 1);
            double t_next = std::log(seq.value_at(xm)) + s;
            if (t_next <= -0.7) {
                double proxy =
                    s + std::log(std::fabs(seq.dvalue_at(xm))) + std::log(4.0);
                if (proxy <= std::log(tol_abs / 2.0)) {
                    auto tc = detail::complete_smooth_tail(seq, w, s, k + 1,
                                                           tol_abs);
                    acc.add(tc.value);
                    return {acc.value(), tc.error, k - from + 1};
                }
            }
        }
    }
}

}  // namespace detail

inline BoundedValue psi(const Sequence& seq, double s, double tol = 1e-10) {
    if (s == 0.0) return {0.0, 0.0, 0};
    return detail::sum_weight(seq, s, tol, Weight::Psi);
}

inline BoundedValue psi_prime(const Sequence& seq, double s,
                              double tol = 1e-10) {
    return detail::sum_weight(seq, s, tol, Weight::PsiPrime);
}

inline BoundedValue psi_double_prime(const Sequence& seq, double s,
                                     double tol = 1e-10) {
    return detail::sum_weight(seq, s, tol, Weight::PsiDoublePrime);
}

inline double tilted_prob(const Sequence& seq, double s, long k) {
    return detail::tilted_from_logs(seq.log_value(k), s);
}

// sum_{k>=from} of the tilted success probabilities
inline BoundedValue tilted_tail_sum(const Sequence& seq, double s, long from,
                                    double tol = 1e-10) {
    return detail::sum_weight(seq, s, tol, Weight::PsiPrime, from);
}

struct CoreIdentity {
    double head;           // sum_{k<=n} (1 - tilted_prob)
    BoundedValue tail;     // sum_{k>n} tilted_prob
    double gap;            // head - tail
};

inline CoreIdentity core_identity(const Sequence& seq, double s, long n,
                                  double tol = 1e-10) {
    if (n < 0) throw parameter_domain_error("core_identity: n >= 0 required");
    KahanSum head;
    long hi = seq.support() >= 0 ? std::min<long>(n, seq.support()) : n;
    for (long k = 1; k <= hi; ++k)
        head.add(detail::one_minus_tilted(seq.log_value(k), s));
    CoreIdentity out;
    out.head = head.value();
    out.tail = tilted_tail_sum(seq, s, hi + 1, tol);
    out.gap = out.head - out.tail.value;
    return out;
}

inline double core_identity_gap(const Sequence& seq, double s, long n) {
    return core_identity(seq, s, n).gap;
}

}  // namespace tailforge
