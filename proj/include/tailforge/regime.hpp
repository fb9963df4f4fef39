#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cgf.hpp"
#include "common.hpp"
#include "saddle.hpp"
#include "sequences.hpp"

namespace tailforge {

enum class RegimeLabel { A, B, C, undetermined };

inline const char* regime_name(RegimeLabel l) {
    switch (l) {
        case RegimeLabel::A: return "A";
        case RegimeLabel::B: return "B";
        case RegimeLabel::C: return "C";
        case RegimeLabel::undetermined: return "undetermined";
    }
    return "?";
}

struct RegimePoint {
    long n;
    double s;
    double psi2;
    double head_sum;
    BoundedValue tail_sum;
};

// P{theta = -1, 0, +1} for the three-point limit variables
inline std::array<double, 3> theta_dist(double p, double q) {
    double d = (1.0 + p) * (1.0 + q);
    return {q / d, (1.0 + p * q) / d, p / d};
}

inline std::array<double, 3> theta0_dist(double q0) {
    return {q0 / (1.0 + q0), 1.0 / (1.0 + q0), 0.0};
}

struct C0Result {
    double value;
    double error_bound;
    long M;  // variables theta_0..theta_M entered the convolution
};

struct LimitSeq {
    std::function<double(long)> value;  // p: k>=1, q: k>=0
    std::function<double(long)> tail;   // bound on sum_{k>M} value(k)
};

struct RegimeCData {
    std::vector<double> p;  // p[i] = p_{i+1}
    std::vector<double> q;  // q[i] = q_i
    double drift_p1;
    double drift_q0;
    std::optional<C0Result> c0;
};

struct ClassifyThresholds {
    double lo = 0.1;
    double hi = 10.0;
    double flat = 0.10;
};

struct RegimeReport {
    RegimeLabel label = RegimeLabel::undetermined;
    std::vector<RegimePoint> grid;
    std::optional<RegimeCData> c_data;
};

inline RegimePoint diagnostics(const Sequence& seq, long n,
                               double residual_tol = -1.0) {
    auto sol = solve(seq, n, residual_tol);
    auto ci = core_identity(seq, sol.s, n);
    return {n, sol.s, sol.psi_double_prime, ci.head, ci.tail};
}

// point mass at zero of sum theta_m by exact convolution on integer support
inline C0Result c0_convolve(const LimitSeq& p, const LimitSeq& q, double tol) {
    if (!(p.value(1) > 0.0) || !(q.value(0) > 0.0))
        throw degenerate_input_error("c0: need p_1 > 0 and q_0 > 0");
    long M = 1;
    while (p.tail(M) + q.tail(M) > tol) {
        ++M;
        if (M > 100000)
            throw truncation_failure("c0: tail cutoff not found", 0.0, 1.0, M);
    }
    // support of sum theta_0..theta_M is [-(M+1), M]; offset by M+1
    std::vector<double> dist(2 * M + 2, 0.0);
    long zero = M + 1;
    auto t0 = theta0_dist(q.value(0));
    dist[zero - 1] = t0[0];
    dist[zero] = t0[1];
    std::vector<double> next(dist.size(), 0.0);
    for (long m = 1; m <= M; ++m) {
        auto tm = theta_dist(p.value(m), q.value(m));
        std::fill(next.begin(), next.end(), 0.0);
        for (long i = 0; i < static_cast<long>(dist.size()); ++i) {
            if (dist[i] == 0.0) continue;
            if (i > 0) next[i - 1] += dist[i] * tm[0];
            next[i] += dist[i] * tm[1];
            if (i + 1 < static_cast<long>(next.size()))
                next[i + 1] += dist[i] * tm[2];
        }
        dist.swap(next);
    }
    return {dist[zero], tol, M};
}

inline RegimeCData regime_c_limits(const Sequence& seq,
                                   const std::vector<long>& n_grid, int k_max,
                                   bool with_c0 = true, double c0_tol = 1e-10) {
    if (k_max < 1 || n_grid.size() < 2)
        throw parameter_domain_error(
            "regime_c_limits: need k_max >= 1 and at least two grid points");
    auto eval = [&](long n) {
        auto sol = solve(seq, n);
        RegimeCData d;
        for (int k = 1; k <= k_max; ++k) {
            double v = 0.0;
            if (seq.support() < 0 || n + k <= seq.support())
                v = std::exp(seq.log_value(n + k) + sol.s);
            d.p.push_back(v);
        }
        for (int k = 0; k <= k_max && k < n; ++k)
            d.q.push_back(std::exp(-sol.s - seq.log_value(n - k)));
        return d;
    };
    auto last = eval(n_grid.back());
    auto prev = eval(n_grid[n_grid.size() - 2]);
    if (!(last.p[0] > 0.0) || !(last.q[0] > 0.0))
        throw not_regime_c_error("regime_c_limits: vanishing p_1 or q_0");
    last.drift_p1 = std::fabs(last.p[0] - prev.p[0]) / last.p[0];
    last.drift_q0 = std::fabs(last.q[0] - prev.q[0]) / last.q[0];
    if (last.drift_p1 > 0.10 || last.drift_q0 > 0.10)
        throw not_regime_c_error(
            "regime_c_limits: limit estimates drift by more than 10%");
    if (with_c0) {
        // geometric continuation of the observed decay for the tail bound
        auto make = [&](const std::vector<double>& v, long lo_index) {
            double ratio = 0.5;
            size_t m = v.size();
            if (m >= 2 && v[m - 1] > 0.0 && v[m - 2] > 0.0)
                ratio = std::min(0.9, v[m - 1] / v[m - 2]);
            return LimitSeq{
                [v, lo_index](long k) -> double {
                    long i = k - lo_index;
                    return i < static_cast<long>(v.size()) ? v[i] : 0.0;
                },
                [v, lo_index, ratio](long M) -> double {
                    double t = 0.0;
                    long i = M + 1 - lo_index;
                    for (; i < static_cast<long>(v.size()); ++i) t += v[i];
                    double last_v = v.empty() ? 0.0 : v.back();
                    return t + last_v * ratio / (1.0 - ratio);
                }};
        };
        last.c0 = c0_convolve(make(last.p, 1), make(last.q, 0), c0_tol);
    }
    return last;
}

inline RegimeReport classify(const Sequence& seq,
                             const std::vector<long>& n_grid,
                             ClassifyThresholds th = {},
                             double residual_tol = -1.0) {
    if (n_grid.size() < 3)
        throw parameter_domain_error("classify: need at least 3 grid points");
    for (size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw parameter_domain_error("classify: grid must be increasing");

    RegimeReport rep;
    for (long n : n_grid)
        rep.grid.push_back(diagnostics(seq, n, residual_tol));

    bool inc = true, dec = true;
    for (size_t i = 1; i < rep.grid.size(); ++i) {
        if (rep.grid[i].psi2 <= rep.grid[i - 1].psi2) inc = false;
        if (rep.grid[i].psi2 >= rep.grid[i - 1].psi2) dec = false;
    }
    double lastv = rep.grid.back().psi2;
    size_t half = rep.grid.size() / 2;
    double mn = lastv, mx = lastv;
    for (size_t i = half; i < rep.grid.size(); ++i) {
        mn = std::min(mn, rep.grid[i].psi2);
        mx = std::max(mx, rep.grid[i].psi2);
    }
    bool flat = (mx - mn) <= th.flat * std::fabs(lastv);

    if (inc && lastv > th.hi) {
        rep.label = RegimeLabel::B;
    } else if (dec && lastv < th.lo) {
        rep.label = RegimeLabel::A;
    } else if (flat && lastv > th.lo && lastv < th.hi) {
        rep.label = RegimeLabel::C;
        rep.c_data = regime_c_limits(seq, n_grid, 40);
    }
    return rep;
}

}  // namespace tailforge
