#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cgf.hpp"
#include "common.hpp"
#include "sequences.hpp"
#include "specfun.hpp"

namespace tailforge {

enum class SaddleMethod { numeric, family_formula };

struct SaddleSolution {
    long n;
    double s;
    double psi;
    double psi_prime;
    double psi_double_prime;
    double residual;  // psi_prime - n
    SaddleMethod method;
};

inline double default_residual_tol(long n) {
    return 1e-9 * std::max(1.0, static_cast<double>(n));
}

// floor for derived discrete parameters like (1+beta)/(2 beta), guarding
// against 2.9999999999999996-style rounding
inline int param_floor(double x) {
    return static_cast<int>(std::floor(x + 1e-9));
}

// Coefficients A_{i,beta} of the saddle correction alpha_beta(n) =
// sum_i A_i n^{-2 i beta} for the sub-exponential family with
// beta in (0,1). Determined order by order from the expansion of the
// inverted mean equation: the coefficient of each power n^{-2 j beta}
// must vanish in
//   [(1+alpha)^{1/beta} - 1] +
//   (2/beta) sum_{odd j} C(1/beta-1, j) c_j u^{(j+1)/2} (1+alpha)^{1/beta-1-j}
// with u = n^{-2 beta}.
inline std::vector<double> stretched_exp_alpha_coeffs(double beta) {
    if (beta <= 0.0 || beta >= 1.0)
        throw parameter_domain_error("alpha coefficients need beta in (0,1)");
    const int ell = param_floor((1.0 + beta) / (2.0 * beta));
    const int L = ell - 1;  // number of coefficients
    std::vector<double> A(L, 0.0);
    if (L == 0) return A;

    auto mul = [L](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> out(L + 1, 0.0);
        for (int i = 0; i <= L; ++i)
            for (int j = 0; i + j <= L; ++j) out[i + j] += a[i] * b[j];
        return out;
    };
    // (1 + x)^alpha for a truncated series x with x[0] = 0
    auto pow_series = [&](const std::vector<double>& x, double alpha) {
        std::vector<double> out(L + 1, 0.0);
        out[0] = 1.0;
        std::vector<double> xp(L + 1, 0.0);
        xp[0] = 1.0;
        for (int j = 1; j <= L; ++j) {
            xp = mul(xp, x);
            double cj = binom_real(alpha, j);
            for (int i = 0; i <= L; ++i) out[i] += cj * xp[i];
        }
        return out;
    };

    const int jtop = param_floor(1.0 / beta) - 1;
    for (int ord = 1; ord <= L; ++ord) {
        std::vector<double> alpha_ser(L + 1, 0.0);
        for (int i = 1; i < ord; ++i) alpha_ser[i] = A[i - 1];
        // residual series with A[ord-1] = 0
        std::vector<double> F = pow_series(alpha_ser, 1.0 / beta);
        F[0] -= 1.0;
        for (int j = 1; j <= jtop; j += 2) {
            int up = (j + 1) / 2;  // power of u carried by this term
            if (up > L) continue;
            std::vector<double> tail =
                pow_series(alpha_ser, 1.0 / beta - 1.0 - j);
            double coef = (2.0 / beta) * binom_real(1.0 / beta - 1.0, j) *
                          c_coeff(j);
            for (int i = 0; i + up <= L; ++i) F[i + up] += coef * tail[i];
        }
        A[ord - 1] = -beta * F[ord];
    }
    return A;
}

namespace detail {

// approximate saddle used as initial guess and, for the four explicit
// families, as the reported family formula
inline std::optional<double> saddle_formula(const Sequence& seq, long n) {
    double nd = static_cast<double>(n);
    if (auto* p = dynamic_cast<const PolynomialSeq*>(&seq)) {
        double beta = p->beta(), c = p->c();
        return beta * std::log(nd + 0.5) +
               beta * std::log(beta * std::sin(pi / beta) /
                               (pi * std::pow(c, 1.0 / beta)));
    }
    if (auto* p = dynamic_cast<const StretchedExpSeq*>(&seq)) {
        double beta = p->beta(), c = p->c();
        if (beta < 1.0) {
            // log c + s_n = n^beta (1 + eps(n)) with eps solving the
            // truncated inverted mean equation; the A_{i,beta} series is
            // the n^{-2 i beta} expansion of this eps
            const double ib = 1.0 / beta;
            const int jtop = param_floor(ib) - 1;
            auto F = [&](double e) {
                double v = std::pow(1.0 + e, ib) - 1.0 - 1.0 / (2.0 * nd);
                for (int j = 1; j <= jtop; j += 2)
                    v += (2.0 / beta) * binom_real(ib - 1.0, j) * c_coeff(j) *
                         std::pow(1.0 + e, ib - 1.0 - j) *
                         std::pow(nd, -beta * (1 + j));
                return v;
            };
            auto Fp = [&](double e) {
                double v = ib * std::pow(1.0 + e, ib - 1.0);
                for (int j = 1; j <= jtop; j += 2)
                    v += (2.0 / beta) * binom_real(ib - 1.0, j) * c_coeff(j) *
                         (ib - 1.0 - j) * std::pow(1.0 + e, ib - 2.0 - j) *
                         std::pow(nd, -beta * (1 + j));
                return v;
            };
            double e = 0.0;
            for (int it = 0; it < 60; ++it) {
                double step = F(e) / Fp(e);
                e -= step;
                if (std::fabs(step) < 1e-17) break;
            }
            return std::pow(nd, beta) * (1.0 + e) - std::log(c);
        }
        if (beta == 1.0) return nd + 0.5 - std::log(c);
        return std::pow(nd, beta) + std::pow(nd, (beta - 1.0) / 2.0);
    }
    if (auto* p = dynamic_cast<const GnedinSinhSeq*>(&seq)) {
        return 2.0 * std::log(nd + 0.5) + 2.0 * std::log(2.0 / p->lambda());
    }
    if (auto* p = dynamic_cast<const GnedinCoshSeq*>(&seq)) {
        return 2.0 * std::log(nd + 0.5) + 2.0 * std::log(2.0 / p->lambda());
    }
    return std::nullopt;
}

}  // namespace detail

inline SaddleSolution solve(const Sequence& seq, long n,
                            double residual_tol = -1.0) {
    if (residual_tol <= 0.0) residual_tol = default_residual_tol(n);
    const double tol_eval =
        residual_tol / (10.0 * std::max(1.0, static_cast<double>(n)));

    auto p0 = psi_prime(seq, 0.0, 1e-10);
    long n_min = static_cast<long>(std::floor(p0.value)) + 1;
    if (n < n_min)
        throw level_too_small_error(
            "solve: n=" + std::to_string(n) +
            " below admissible minimum " + std::to_string(n_min));
    if (seq.support() >= 0 && n >= seq.support())
        throw no_solution_error("solve: n >= support size, psi' never reaches n");

    double lo = 0.0, hi;
    auto guess = detail::saddle_formula(seq, n);
    hi = std::max(1.0, guess.value_or(std::log(static_cast<double>(n) + 1.0)));
    double f_hi = psi_prime(seq, hi, tol_eval).value - n;
    int grow = 0;
    while (f_hi < 0.0) {
        lo = hi;
        hi *= 2.0;
        f_hi = psi_prime(seq, hi, tol_eval).value - n;
        if (++grow > 200)
            throw no_solution_error("solve: bracket growth failed");
    }

    double s = std::min(std::max(guess.value_or(0.5 * (lo + hi)), lo), hi);
    double f = 0.0;
    double d2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        f = psi_prime(seq, s, tol_eval).value - n;
        if (std::fabs(f) <= residual_tol) break;
        if (f < 0.0)
            lo = s;
        else
            hi = s;
        d2 = psi_double_prime(seq, s, tol_eval).value;
        double step = d2 > 0.0 ? f / d2 : 0.0;
        double s_new = s - step;
        if (!(s_new > lo) || !(s_new < hi) ||
            std::fabs(step) > 0.5 * (hi - lo))
            s_new = 0.5 * (lo + hi);
        if (s_new == s) break;
        s = s_new;
    }

    SaddleSolution out;
    out.n = n;
    out.s = s;
    out.psi = psi(seq, s, tol_eval).value;
    out.psi_prime = f + n;
    out.psi_double_prime = psi_double_prime(seq, s, tol_eval).value;
    out.residual = f;
    out.method = SaddleMethod::numeric;
    return out;
}

inline SaddleSolution family_saddle(const Sequence& seq, long n) {
    bool supported = dynamic_cast<const PolynomialSeq*>(&seq) != nullptr ||
                     dynamic_cast<const StretchedExpSeq*>(&seq) != nullptr;
    if (!supported)
        throw unsupported_family_error(
            "family_saddle: no explicit formula for this family");
    double s = *detail::saddle_formula(seq, n);
    SaddleSolution out;
    out.n = n;
    out.s = s;
    out.psi = psi(seq, s).value;
    out.psi_prime = psi_prime(seq, s).value;
    out.psi_double_prime = psi_double_prime(seq, s).value;
    out.residual = out.psi_prime - n;
    out.method = SaddleMethod::family_formula;
    return out;
}

inline double legendre(const Sequence& seq, long n) {
    auto sol = solve(seq, n);
    return sol.s * sol.psi_prime - sol.psi;
}

}  // namespace tailforge
