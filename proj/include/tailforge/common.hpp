#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailforge {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ---- error taxonomy ----------------------------------------------------

struct parameter_domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct invalid_perturbation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct level_too_small_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_solution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct unsupported_family_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_regime_c_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct cannot_estimate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct transfer_invalid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct table_too_short_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a series cannot meet its tolerance within the term cap.
// Carries the best value reached so the caller can still inspect it.
struct truncation_failure : std::runtime_error {
    double best_value;
    double best_error_bound;
    long terms;
    truncation_failure(const std::string& msg, double v, double e, long t)
        : std::runtime_error(msg), best_value(v), best_error_bound(e), terms(t) {}
};

// ---- term cap ----------------------------------------------------------

inline long max_terms() {
    static const long cap = [] {
        if (const char* env = std::getenv("TAILFORGE_MAX_TERMS")) {
            long v = std::atol(env);
            if (v > 0) return v;
        }
        return 10000000L;
    }();
    return cap;
}

// ---- numeric result with truncation control ----------------------------

struct BoundedValue {
    double value = 0.0;
    double error_bound = 0.0;
    long terms_used = 0;
};

// ---- compensated summation ---------------------------------------------

class KahanSum {
    double sum_ = 0.0;
    double c_ = 0.0;

public:
    void add(double x) {
        double y = x - c_;
        double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }
};

// ---- log-domain helpers ------------------------------------------------

inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

inline double logsumexp(const std::vector<double>& v) {
    double m = neg_inf;
    for (double x : v)
        if (x > m) m = x;
    if (m == neg_inf) return neg_inf;
    KahanSum acc;
    for (double x : v)
        if (x != neg_inf) acc.add(std::exp(x - m));
    return m + std::log(acc.value());
}

}  // namespace tailforge
