#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "regime.hpp"
#include "saddle.hpp"
#include "specfun.hpp"

namespace tailforge {

struct AsymptoticTerm {
    std::string name;
    double value;
};

struct ExplicitAsymptotic {
    char family;  // 'a', 'b', 'c', 'd'
    double c;
    double beta;
    long n;
    std::vector<AsymptoticTerm> terms;
    double log_value;
};

namespace detail {

// compensated sum in descending magnitude
inline double sum_terms(const std::vector<AsymptoticTerm>& terms) {
    std::vector<double> v;
    for (const auto& t : terms) v.push_back(t.value);
    std::sort(v.begin(), v.end(),
              [](double a, double b) { return std::fabs(a) > std::fabs(b); });
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value();
}

}  // namespace detail

// log tail probability for r_k = c k^{-beta}
inline ExplicitAsymptotic thm4a(double c, double beta, long n) {
    if (beta <= 1.0 || c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4a: need beta > 1, c > 0, n >= 1");
    double nd = static_cast<double>(n);
    double sb = beta * std::sin(pi / beta);
    ExplicitAsymptotic out{'a', c, beta, n, {}, 0.0};
    out.terms = {
        {"leading", -beta * nd * std::log(nd)},
        {"linear",
         -beta * (std::log(sb / (pi * std::pow(c, 1.0 / beta))) - 1.0) * nd},
        {"log_correction", -0.5 * (beta + 1.0) * std::log(nd)},
        {"const_sin", -0.5 * beta * std::log(2.0 * sb)},
        {"const_gauss", -0.5 * std::log(2.0 * pi)},
        {"const_beta", 0.5 * std::log(beta)},
    };
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// log tail probability for r_k = c e^{-k^beta}, beta in (0,1)
inline ExplicitAsymptotic thm4b(double c, double beta, long n) {
    if (beta <= 0.0 || beta >= 1.0 || c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4b: need beta in (0,1), c > 0, n >= 1");
    double nd = static_cast<double>(n);
    const int ell = param_floor((1.0 + beta) / (2.0 * beta));
    const double ib = 1.0 / beta;
    auto A = stretched_exp_alpha_coeffs(beta);
    double alpha = 0.0;
    for (int i = static_cast<int>(A.size()); i >= 1; --i)
        alpha += A[i - 1] * std::pow(nd, -2.0 * i * beta);

    ExplicitAsymptotic out{'b', c, beta, n, {}, 0.0};
    out.terms.push_back(
        {"prefactor",
         0.5 * std::log(beta / (2.0 * pi * std::pow(nd, 1.0 - beta)))});
    out.terms.push_back({"main", -std::pow(nd, 1.0 + beta) / (1.0 + beta)});
    double corr = 0.0;
    for (int i = 2; i <= ell; ++i)
        corr += binom_real(1.0 + ib, i) * std::pow(alpha, i);
    out.terms.push_back(
        {"alpha_correction",
         beta * std::pow(nd, 1.0 + beta) / (1.0 + beta) * corr});
    out.terms.push_back({"n_log_c", nd * std::log(c)});
    out.terms.push_back({"half_power", -0.5 * std::pow(nd, beta)});
    const int jtop = param_floor(ib) - 1;
    for (int j = 0; j <= jtop; j += 2) {
        double inner = 0.0;
        for (int i = 0; i <= ell - j / 2 - 1; ++i)
            inner += binom_real(ib - 1.0 - j, i) * std::pow(alpha, i);
        double t = (2.0 / beta) * binom_real(ib - 1.0, j) * f_coeff(j) *
                   std::pow(nd, 1.0 - beta * (1 + j)) * inner;
        out.terms.push_back({"f_term_j" + std::to_string(j), t});
    }
    out.terms.push_back({"zeta", -zeta(-beta)});
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// reduced forms valid for beta in (1/4, 1); cross-check path for thm4b
inline ExplicitAsymptotic thm4b_reduced(double c, double beta, long n) {
    if (beta <= 0.25 || beta >= 1.0 || c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4b_reduced: need beta in (1/4,1)");
    double nd = static_cast<double>(n);
    ExplicitAsymptotic out{'b', c, beta, n, {}, 0.0};
    out.terms = {
        {"prefactor",
         0.5 * std::log(beta / (2.0 * pi * std::pow(nd, 1.0 - beta)))},
        {"main", -std::pow(nd, 1.0 + beta) / (1.0 + beta)},
        {"n_log_c", nd * std::log(c)},
        {"half_power", -0.5 * std::pow(nd, beta)},
        {"f_term_j0", (2.0 / beta) * f_coeff(0) * std::pow(nd, 1.0 - beta)},
        {"zeta", -zeta(-beta)},
    };
    if (beta <= 1.0 / 3.0) {
        double ib = 1.0 / beta;
        double c1 = c_coeff(1), f0 = f_coeff(0), f2 = f_coeff(2);
        double coef = ib * (ib - 1.0) *
                      (2.0 * (ib - 1.0) * c1 * c1 - 4.0 * (ib - 1.0) * c1 * f0 +
                       (ib - 2.0) * f2);
        out.terms.push_back({"cubic_band", coef * std::pow(nd, 1.0 - 3.0 * beta)});
    }
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// atom at zero of the limit walk for the plain geometric family, where the
// two-sided limits are p_k = e^{-k+1/2} and q_k = e^{-k-1/2} exactly
inline double geometric_c0() {
    static const double value = [] {
        auto geom = [](double off) {
            return LimitSeq{
                [off](long k) { return std::exp(-static_cast<double>(k) + off); },
                [off](long M) {
                    return std::exp(-static_cast<double>(M + 1) + off) /
                           (1.0 - std::exp(-1.0));
                }};
        };
        return c0_convolve(geom(0.5), geom(-0.5), 1e-13).value;
    }();
    return value;
}

// log tail probability for r_k = c e^{-k}
inline ExplicitAsymptotic thm4c(double c, long n) {
    if (c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4c: need c > 0, n >= 1");
    double nd = static_cast<double>(n);
    ExplicitAsymptotic out{'c', c, 1.0, n, {}, 0.0};
    out.terms = {
        {"log_c0", std::log(geometric_c0())},
        {"quadratic", -0.5 * nd * nd},
        {"linear", (std::log(c) - 0.5) * nd},
        {"const", -0.125},
        {"c1", gnedin_c1()},
        {"h2_half", h2_eval(0.5)},
    };
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// log tail probability for r_k = c e^{-k^beta}, beta > 1
inline ExplicitAsymptotic thm4d(double c, double beta, long n) {
    if (beta <= 1.0 || c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4d: need beta > 1, c > 0, n >= 1");
    double nd = static_cast<double>(n);
    double lc = std::log(c);
    ExplicitAsymptotic out{'d', c, beta, n, {}, 0.0};
    out.terms = {
        {"main", -std::pow(nd, beta + 1.0) / (beta + 1.0)},
        {"second", -std::pow(nd, (beta + 1.0) / 2.0) / beta},
        {"linear", lc * (1.0 - 1.0 / beta) * nd},
        {"const", -1.0 / (2.0 * beta * beta)},
    };
    double arg = std::pow(nd, -(beta - 1.0) / 2.0) / beta +
                 lc / beta * std::pow(nd, 1.0 - beta) -
                 (beta - 1.0) / (2.0 * beta * beta) * std::pow(nd, -beta);
    const int ktop = param_floor(beta) + 1;
    const int gate = param_floor((beta + 1.0) / 2.0);
    for (int k = 1; k <= ktop; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double weight = std::pow(nd, beta - (k - 1));
        if (k <= gate)
            weight += (1.0 - (k - 1.0) / beta) *
                      std::pow(nd, (beta + 1.0) / 2.0 - k);
        double t = -1.0 / (beta + 1.0) * sign * binom_real(beta + 1.0, k) *
                   bernoulli_poly(k, arg) * weight;
        out.terms.push_back({"bernoulli_k" + std::to_string(k), t});
    }
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// reduced form valid for beta in (1,2); cross-check path for thm4d
inline ExplicitAsymptotic thm4d_reduced(double c, double beta, long n) {
    if (beta <= 1.0 || beta >= 2.0 || c <= 0.0 || n < 1)
        throw parameter_domain_error("thm4d_reduced: need beta in (1,2)");
    double nd = static_cast<double>(n);
    ExplicitAsymptotic out{'d', c, beta, n, {}, 0.0};
    out.terms = {
        {"main", -std::pow(nd, beta + 1.0) / (beta + 1.0)},
        {"half_power", -0.5 * std::pow(nd, beta)},
        {"linear", std::log(c) * nd},
        {"bernoulli_band", -beta / 12.0 * std::pow(nd, beta - 1.0)},
        {"half_log_c", 0.5 * std::log(c)},
    };
    out.log_value = detail::sum_terms(out.terms);
    return out;
}

// Stirling-type point-mass asymptotic for the odd-restricted Poisson variable
// with rate lambda: log P{Z = n}
inline double gnedin_log_pmf_asymptotic(double lambda, long n) {
    if (lambda <= 0.0 || n < 1)
        throw parameter_domain_error("gnedin asymptotic: lambda > 0, n >= 1");
    double nd = static_cast<double>(n);
    return std::log(lambda / (4.0 * std::sqrt(pi) * std::sinh(lambda))) -
           2.0 * nd * std::log(2.0 * nd) + 2.0 * nd * (std::log(lambda) + 1.0) -
           1.5 * std::log(nd);
}

}  // namespace tailforge
