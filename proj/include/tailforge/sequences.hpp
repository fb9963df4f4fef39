#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "common.hpp"
#include "specfun.hpp"

namespace tailforge {

struct TailSumBound {
    long K;
    double bound;  // guaranteed >= sum_{k>K} r_k
};

// A success-probability sequence (r_k), k >= 1, with sum r_k < infinity.
// Implementations expose a rigorous closed-form tail bound and, for the
// power-decay families, a smooth continuous extension used by the series
// evaluators to complete slowly converging tails with an integral.
class Sequence {
public:
    virtual ~Sequence() = default;

    virtual const char* family() const = 0;
    virtual double value(long k) const = 0;
    virtual double log_value(long k) const { return std::log(value(k)); }

    // index beyond which r_k is nonincreasing
    virtual long k0() const = 0;

    // log of an upper bound on sum_{k>K} r_k; requires K >= tail_bound_min()
    virtual double log_tail_bound(long K) const = 0;
    virtual long tail_bound_min() const { return k0(); }

    // number of indicators, or -1 for infinite support
    virtual long support() const { return -1; }

    // smooth power-decay tail r(x) ~ tail_coeff() * x^{-tail_power()}
    virtual bool smooth_tail() const { return false; }
    virtual double value_at(double) const {
        throw unsupported_family_error("no continuous extension");
    }
    virtual double dvalue_at(double) const {
        throw unsupported_family_error("no continuous extension");
    }
    virtual double tail_coeff() const {
        throw unsupported_family_error("no tail coefficient");
    }
    virtual double tail_power() const {
        throw unsupported_family_error("no tail power");
    }

    virtual std::vector<std::pair<std::string, double>> params() const = 0;

protected:
    static void check_index(long k) {
        if (k < 1) throw parameter_domain_error("sequence index must be >= 1");
    }
};

using SequencePtr = std::shared_ptr<const Sequence>;

inline TailSumBound tail_sum_bound(const Sequence& seq, long K) {
    if (K < seq.tail_bound_min())
        throw parameter_domain_error("tail_sum_bound: K below admissible index");
    return {K, std::exp(seq.log_tail_bound(K))};
}

// ---- r_k = c k^{-beta}, beta > 1 ---------------------------------------

class PolynomialSeq final : public Sequence {
    double c_, beta_;

public:
    PolynomialSeq(double c, double beta) : c_(c), beta_(beta) {
        if (beta <= 1.0)
            throw parameter_domain_error("Polynomial: beta > 1 required");
        if (c <= 0.0 || c > 1.0)
            throw parameter_domain_error("Polynomial: c in (0,1] required");
    }
    const char* family() const override { return "polynomial"; }
    double value(long k) const override {
        check_index(k);
        return c_ * std::pow(static_cast<double>(k), -beta_);
    }
    double log_value(long k) const override {
        check_index(k);
        return std::log(c_) - beta_ * std::log(static_cast<double>(k));
    }
    long k0() const override { return 1; }
    double log_tail_bound(long K) const override {
        return std::log(c_) + (1.0 - beta_) * std::log(static_cast<double>(K)) -
               std::log(beta_ - 1.0);
    }
    bool smooth_tail() const override { return true; }
    double value_at(double x) const override { return c_ * std::pow(x, -beta_); }
    double dvalue_at(double x) const override {
        return -beta_ * c_ * std::pow(x, -beta_ - 1.0);
    }
    double tail_coeff() const override { return c_; }
    double tail_power() const override { return beta_; }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"c", c_}, {"beta", beta_}};
    }
    double c() const { return c_; }
    double beta() const { return beta_; }
};

// ---- r_k = c e^{-k^beta}, beta > 0 -------------------------------------

class StretchedExpSeq final : public Sequence {
    double c_, beta_;

public:
    StretchedExpSeq(double c, double beta) : c_(c), beta_(beta) {
        if (beta <= 0.0)
            throw parameter_domain_error("StretchedExp: beta > 0 required");
        if (c <= 0.0 || c * std::exp(-1.0) > 1.0)
            throw parameter_domain_error("StretchedExp: need 0 < c <= e");
    }
    const char* family() const override { return "stretched-exp"; }
    double value(long k) const override { return std::exp(log_value(k)); }
    double log_value(long k) const override {
        check_index(k);
        return std::log(c_) - std::pow(static_cast<double>(k), beta_);
    }
    long k0() const override { return 1; }
    long tail_bound_min() const override {
        double need = 2.0 * std::max(1.0, 1.0 / beta_ - 1.0);
        return std::max<long>(1, static_cast<long>(std::ceil(
                                     std::pow(need, 1.0 / beta_))));
    }
    double log_tail_bound(long K) const override {
        // sum_{k>K} e^{-k^beta} <= int_K^inf e^{-x^beta} dx
        //   <= K^{1-beta} e^{-K^beta} / (beta (1 - m/K^beta)),
        // m = max(0, 1/beta - 1)
        double Kb = std::pow(static_cast<double>(K), beta_);
        double m = std::max(0.0, 1.0 / beta_ - 1.0);
        return std::log(c_) - std::log(beta_) +
               (1.0 - beta_) * std::log(static_cast<double>(K)) - Kb -
               std::log1p(-m / Kb);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"c", c_}, {"beta", beta_}};
    }
    double c() const { return c_; }
    double beta() const { return beta_; }
};

// ---- Poissonized range counts over geometric weights -------------------
//
// Cell k receives a Poisson(t p_k) number of points, p_k = a q^k. The
// indicator is a monotone event of that count.

enum class RangeVariant { AtLeast, Exactly, Even };

class PoissonizedRangeSeq final : public Sequence {
    double t_, a_, q_;
    RangeVariant variant_;
    int j_;

    double mean(long k) const { return t_ * a_ * std::pow(q_, static_cast<double>(k)); }

public:
    PoissonizedRangeSeq(double t, double a, double q, RangeVariant variant,
                        int j = 1)
        : t_(t), a_(a), q_(q), variant_(variant), j_(j) {
        if (t <= 0.0 || a <= 0.0 || q <= 0.0 || q >= 1.0)
            throw parameter_domain_error(
                "PoissonizedRange: need t>0, a>0, q in (0,1)");
        if (variant != RangeVariant::Even && j < 1)
            throw parameter_domain_error("PoissonizedRange: j >= 1 required");
    }
    const char* family() const override { return "poissonized-range"; }
    double value(long k) const override {
        check_index(k);
        double m = mean(k);
        switch (variant_) {
            case RangeVariant::AtLeast:
                return reg_lower_gamma(static_cast<double>(j_), m);
            case RangeVariant::Exactly:
                return std::exp(-m + j_ * std::log(m) - std::lgamma(j_ + 1.0));
            case RangeVariant::Even: {
                double u = -std::expm1(-m);
                return 0.5 * u * u;
            }
        }
        return 0.0;
    }
    double log_value(long k) const override {
        check_index(k);
        double m = mean(k);
        switch (variant_) {
            case RangeVariant::AtLeast:
                return log_reg_lower_gamma(static_cast<double>(j_), m);
            case RangeVariant::Exactly:
                return -m + j_ * std::log(m) - std::lgamma(j_ + 1.0);
            case RangeVariant::Even:
                return 2.0 * std::log(-std::expm1(-m)) - std::log(2.0);
        }
        return neg_inf;
    }
    long k0() const override {
        if (variant_ != RangeVariant::Exactly) return 1;
        // e^{-m} m^j peaks at m = j; monotone once m <= j
        long k = 1;
        while (mean(k) > static_cast<double>(j_)) ++k;
        return k;
    }
    double log_tail_bound(long K) const override {
        // every variant satisfies r_k <= t p_k
        return std::log(t_ * a_) + (K + 1) * std::log(q_) - std::log1p(-q_);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"t", t_},
                {"a", a_},
                {"q", q_},
                {"variant", static_cast<double>(variant_)},
                {"j", static_cast<double>(j_)}};
    }
};

// ---- record indicators over geometric weights --------------------------
//
// alpha_k = a q^k; r_i = alpha_i / (alpha_1 + ... + alpha_i), which
// reduces to q^{i-1}(1-q)/(1-q^i), independent of a.

class RecordsGeomSeq final : public Sequence {
    double q_;

public:
    explicit RecordsGeomSeq(double q) : q_(q) {
        if (q <= 0.0 || q >= 1.0)
            throw parameter_domain_error("RecordsGeom: q in (0,1) required");
    }
    const char* family() const override { return "records-geom"; }
    double value(long k) const override {
        check_index(k);
        double qk = std::pow(q_, static_cast<double>(k));
        return std::pow(q_, static_cast<double>(k - 1)) * (1.0 - q_) / (1.0 - qk);
    }
    long k0() const override { return 1; }
    double log_tail_bound(long K) const override {
        return K * std::log(q_) - std::log1p(-q_);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"q", q_}};
    }
};

class RecordsListSeq final : public Sequence {
    std::vector<double> alphas_;
    std::vector<double> r_;
    std::vector<double> suffix_;  // suffix_[i] = sum_{k>i} r_k

public:
    explicit RecordsListSeq(const std::vector<double>& alphas)
        : alphas_(alphas) {
        if (alphas.empty())
            throw parameter_domain_error("RecordsList: empty weight list");
        double prefix = 0.0;
        for (double a : alphas) {
            if (a <= 0.0)
                throw parameter_domain_error("RecordsList: weights must be > 0");
            prefix += a;
            r_.push_back(a / prefix);
        }
        suffix_.assign(r_.size() + 1, 0.0);
        for (long i = static_cast<long>(r_.size()) - 1; i >= 0; --i)
            suffix_[i] = suffix_[i + 1] + r_[i];
    }
    const char* family() const override { return "records-list"; }
    double value(long k) const override {
        check_index(k);
        if (k > static_cast<long>(r_.size()))
            throw parameter_domain_error("RecordsList: index beyond support");
        return r_[k - 1];
    }
    long k0() const override { return static_cast<long>(r_.size()); }
    long tail_bound_min() const override { return 1; }
    long support() const override { return static_cast<long>(r_.size()); }
    double log_tail_bound(long K) const override {
        if (K >= static_cast<long>(r_.size())) return neg_inf;
        return std::log(suffix_[K]);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"m", static_cast<double>(r_.size())}};
    }
    const std::vector<double>& values() const { return r_; }
    const std::vector<double>& alphas() const { return alphas_; }
};

// ---- Gnedin occupancy-type sequences -----------------------------------

class GnedinSinhSeq final : public Sequence {
    double lambda_;

public:
    explicit GnedinSinhSeq(double lambda) : lambda_(lambda) {
        if (lambda <= 0.0)
            throw parameter_domain_error("GnedinSinh: lambda > 0 required");
    }
    const char* family() const override { return "gnedin-sinh"; }
    double value(long k) const override {
        check_index(k);
        double pk = pi * k;
        return lambda_ * lambda_ / (pk * pk + lambda_ * lambda_);
    }
    long k0() const override { return 1; }
    double log_tail_bound(long K) const override {
        return std::log(lambda_ / pi *
                        (pi / 2.0 - std::atan(pi * K / lambda_)));
    }
    bool smooth_tail() const override { return true; }
    double value_at(double x) const override {
        double px = pi * x;
        return lambda_ * lambda_ / (px * px + lambda_ * lambda_);
    }
    double dvalue_at(double x) const override {
        double px = pi * x;
        double d = px * px + lambda_ * lambda_;
        return -lambda_ * lambda_ * 2.0 * px * pi / (d * d);
    }
    double tail_coeff() const override { return lambda_ * lambda_ / (pi * pi); }
    double tail_power() const override { return 2.0; }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"lambda", lambda_}};
    }
    double lambda() const { return lambda_; }
};

class GnedinCoshSeq final : public Sequence {
    double lambda_;

public:
    explicit GnedinCoshSeq(double lambda) : lambda_(lambda) {
        if (lambda <= 0.0)
            throw parameter_domain_error("GnedinCosh: lambda > 0 required");
    }
    const char* family() const override { return "gnedin-cosh"; }
    double value(long k) const override {
        check_index(k);
        double u = pi * (2.0 * k - 1.0);
        return 4.0 * lambda_ * lambda_ / (u * u + 4.0 * lambda_ * lambda_);
    }
    long k0() const override { return 1; }
    double log_tail_bound(long K) const override {
        return std::log(lambda_ / pi *
                        (pi / 2.0 -
                         std::atan(pi * (2.0 * K - 1.0) / (2.0 * lambda_))));
    }
    bool smooth_tail() const override { return true; }
    double value_at(double x) const override {
        double u = pi * (2.0 * x - 1.0);
        return 4.0 * lambda_ * lambda_ / (u * u + 4.0 * lambda_ * lambda_);
    }
    double dvalue_at(double x) const override {
        double u = pi * (2.0 * x - 1.0);
        double d = u * u + 4.0 * lambda_ * lambda_;
        return -4.0 * lambda_ * lambda_ * 2.0 * u * 2.0 * pi / (d * d);
    }
    double tail_coeff() const override { return lambda_ * lambda_ / (pi * pi); }
    double tail_power() const override { return 2.0; }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"lambda", lambda_}};
    }
    double lambda() const { return lambda_; }
};

// ---- r_k = P{Gamma(k,1) <= t} (decoupled renewal counts) ---------------

class GinibreGammaSeq final : public Sequence {
    double t_;

public:
    explicit GinibreGammaSeq(double t) : t_(t) {
        if (t <= 0.0)
            throw parameter_domain_error("GinibreGamma: t > 0 required");
    }
    const char* family() const override { return "ginibre-gamma"; }
    double value(long k) const override {
        check_index(k);
        return reg_lower_gamma(static_cast<double>(k), t_);
    }
    double log_value(long k) const override {
        check_index(k);
        return log_reg_lower_gamma(static_cast<double>(k), t_);
    }
    long k0() const override { return 1; }
    long tail_bound_min() const override {
        return std::max<long>(1, static_cast<long>(std::ceil(2.0 * t_)));
    }
    double log_tail_bound(long K) const override {
        // P{Poisson(t) >= k} <= 2 pi_t(k) for k >= 2t, geometric beyond
        return std::log(4.0) - t_ + (K + 1) * std::log(t_) -
               std::lgamma(K + 2.0);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"t", t_}};
    }
};

// ---- explicit finite list ----------------------------------------------

class ExplicitListSeq final : public Sequence {
    std::vector<double> r_;
    std::vector<double> suffix_;

public:
    explicit ExplicitListSeq(std::vector<double> values) : r_(std::move(values)) {
        if (r_.empty())
            throw parameter_domain_error("ExplicitList: empty list");
        for (double v : r_)
            if (v <= 0.0 || v > 1.0)
                throw parameter_domain_error(
                    "ExplicitList: values must lie in (0,1]");
        suffix_.assign(r_.size() + 1, 0.0);
        for (long i = static_cast<long>(r_.size()) - 1; i >= 0; --i)
            suffix_[i] = suffix_[i + 1] + r_[i];
    }
    const char* family() const override { return "explicit-list"; }
    double value(long k) const override {
        check_index(k);
        if (k > static_cast<long>(r_.size()))
            throw parameter_domain_error("ExplicitList: index beyond support");
        return r_[k - 1];
    }
    long k0() const override { return static_cast<long>(r_.size()); }
    long tail_bound_min() const override { return 1; }
    long support() const override { return static_cast<long>(r_.size()); }
    double log_tail_bound(long K) const override {
        if (K >= static_cast<long>(r_.size())) return neg_inf;
        return std::log(suffix_[K]);
    }
    std::vector<std::pair<std::string, double>> params() const override {
        return {{"m", static_cast<double>(r_.size())}};
    }
    const std::vector<double>& values() const { return r_; }
};

// ---- u_k = r_k (1 + eps_k) ---------------------------------------------

class PerturbedSeq final : public Sequence {
    SequencePtr base_;
    std::function<double(long)> eps_;
    std::function<double(long)> eps_abs_tail_;  // bound on sum_{k>K} |eps_k|
    long eps_k0_;

public:
    PerturbedSeq(SequencePtr base, std::function<double(long)> eps,
                 std::function<double(long)> eps_abs_tail, long eps_k0)
        : base_(std::move(base)),
          eps_(std::move(eps)),
          eps_abs_tail_(std::move(eps_abs_tail)),
          eps_k0_(eps_k0) {
        for (long k = 1; k <= 200; ++k) {
            if (base_->support() >= 0 && k > base_->support()) break;
            (void)value(k);  // validates range
        }
    }
    const char* family() const override { return "perturbed"; }
    double value(long k) const override {
        check_index(k);
        double u = base_->value(k) * (1.0 + eps_(k));
        if (!(u > 0.0) || u > 1.0)
            throw invalid_perturbation_error(
                "perturb: u_k outside (0,1] at k=" + std::to_string(k));
        return u;
    }
    long k0() const override { return std::max(base_->k0(), eps_k0_); }
    long support() const override { return base_->support(); }
    double log_tail_bound(long K) const override {
        // sum u_k <= sum r_k + sum |eps_k| r_k <= base tail + eps tail
        return log_add(base_->log_tail_bound(K), std::log(eps_abs_tail_(K)));
    }
    long tail_bound_min() const override { return base_->tail_bound_min(); }
    std::vector<std::pair<std::string, double>> params() const override {
        return base_->params();
    }
    const Sequence& base() const { return *base_; }
    SequencePtr base_ptr() const { return base_; }
    double epsilon(long k) const { return eps_(k); }
    double epsilon_abs_tail(long K) const { return eps_abs_tail_(K); }
};

inline SequencePtr perturb(SequencePtr base, std::function<double(long)> eps,
                           std::function<double(long)> eps_abs_tail,
                           long eps_k0) {
    return std::make_shared<PerturbedSeq>(std::move(base), std::move(eps),
                                          std::move(eps_abs_tail), eps_k0);
}

inline SequencePtr perturb(SequencePtr base, std::vector<double> epsilons) {
    auto eps_vec = std::make_shared<std::vector<double>>(std::move(epsilons));
    std::vector<double> suffix(eps_vec->size() + 1, 0.0);
    for (long i = static_cast<long>(eps_vec->size()) - 1; i >= 0; --i)
        suffix[i] = suffix[i + 1] + std::fabs((*eps_vec)[i]);
    auto suffix_sh = std::make_shared<std::vector<double>>(std::move(suffix));
    long m = static_cast<long>(eps_vec->size());
    return perturb(
        std::move(base),
        [eps_vec](long k) {
            return k <= static_cast<long>(eps_vec->size()) ? (*eps_vec)[k - 1]
                                                           : 0.0;
        },
        [suffix_sh, m](long K) {
            return K >= m ? 0.0 : (*suffix_sh)[K];
        },
        m + 1);
}

}  // namespace tailforge
