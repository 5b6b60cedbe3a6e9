#pragma once

// Two-arm trial simulation from a principal-strata scenario, marginal
// estimation, Wald inference on the ATE, and the side-by-side report that
// contrasts average-effect inference with ITE prediction sets.

#include <cstdint>
#include <map>
#include <random>

#include "itebounds/binary.hpp"
#include "itebounds/core.hpp"

namespace iteb {

struct TypeScenario {
    double nr = 0.0;
    double he = 0.0;
    double hu = 0.0;
    double ar = 0.0;
    std::size_t n = 0;
    double assign_prob = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (nr < 0 || he < 0 || hu < 0 || ar < 0) {
            throw std::domain_error("scenario: negative type proportion");
        }
        if (std::abs(nr + he + hu + ar - 1.0) > tolerance()) {
            throw std::domain_error("scenario: type proportions must sum to 1");
        }
        if (!(assign_prob > 0.0 && assign_prob < 1.0)) {
            throw std::domain_error("scenario: assignment probability must be in (0,1)");
        }
        if (n == 0) throw std::domain_error("scenario: n must be positive");
    }
};

struct ArmCounts {
    std::size_t n = 0;          // subjects in the arm
    std::size_t successes = 0;  // Y = 1 outcomes
};

struct TrialResult {
    ArmCounts treated;
    ArmCounts control;
    TypeDistribution realized;  // realized type frequencies over all subjects
};

namespace detail {

// Uniform in [0, 1) with 53 random bits; identical across platforms for a
// given seed, unlike the distribution adaptors.
inline double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Each subject draws a type, then an arm; the outcome is the deterministic
// potential outcome of that type under that arm.
inline TrialResult simulate_trial(const TypeScenario& sc) {
    sc.validate();
    std::mt19937_64 rng(sc.seed);
    TrialResult result;
    std::size_t counts[4] = {0, 0, 0, 0};
    const double c1 = sc.nr, c2 = sc.nr + sc.he, c3 = sc.nr + sc.he + sc.hu;
    for (std::size_t i = 0; i < sc.n; ++i) {
        const double u = detail::next_uniform(rng);
        int type = u < c1 ? 0 : u < c2 ? 1 : u < c3 ? 2 : 3;  // NR, HE, HU, AR
        ++counts[type];
        const bool treated = detail::next_uniform(rng) < sc.assign_prob;
        // potential outcomes: NR -> (0,0), HE -> (1,0), HU -> (0,1), AR -> (1,1)
        const bool y = treated ? (type == 1 || type == 3) : (type == 2 || type == 3);
        ArmCounts& arm = treated ? result.treated : result.control;
        ++arm.n;
        arm.successes += y ? 1 : 0;
    }
    const double inv_n = 1.0 / static_cast<double>(sc.n);
    result.realized.nr = counts[0] * inv_n;
    result.realized.he = counts[1] * inv_n;
    result.realized.hu = counts[2] * inv_n;
    result.realized.ar = counts[3] * inv_n;
    return result;
}

inline BinaryMarginals estimate_marginals(const TrialResult& trial,
                                          const std::string& label = "") {
    if (trial.treated.n == 0 || trial.control.n == 0) {
        std::string where = label.empty() ? "" : " in stratum " + label;
        throw std::runtime_error("estimate_marginals: empty arm" + where);
    }
    double p1 = static_cast<double>(trial.treated.successes) / trial.treated.n;
    double p0 = static_cast<double>(trial.control.successes) / trial.control.n;
    return BinaryMarginals{Probability(p0), Probability(p1)};
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile;
// absolute error below 1.2e-9 on (0, 1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("inverse_normal_cdf: p must be in (0,1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

struct WaldCI {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double x) const { return x >= lower && x <= upper; }
};

// Two-sample Wald interval for p1 - p0 at confidence 1 - alpha.
inline WaldCI ate_wald_ci(const TrialResult& trial, Alpha alpha) {
    if (trial.treated.n == 0 || trial.control.n == 0) {
        throw std::runtime_error("ate_wald_ci: empty arm");
    }
    const double n1 = static_cast<double>(trial.treated.n);
    const double n0 = static_cast<double>(trial.control.n);
    const double p1 = trial.treated.successes / n1;
    const double p0 = trial.control.successes / n0;
    const double se = std::sqrt(p1 * (1.0 - p1) / n1 + p0 * (1.0 - p0) / n0);
    const double z = detail::inverse_normal_cdf(1.0 - alpha.value() / 2.0);
    WaldCI ci;
    ci.estimate = p1 - p0;
    ci.lower = ci.estimate - z * se;
    ci.upper = ci.estimate + z * se;
    return ci;
}

struct AteIteReport {
    WaldCI ate;
    BinaryMarginals marginals{Probability(0.0), Probability(0.0)};
    std::vector<BinarySet> ite_sets;   // best prediction sets, tie order preserved
    bool neyman_rejected = false;      // 0 outside the Wald CI: average effect found
    bool fisher_consistent = false;    // best ITE set is exactly {0}: no unit moved
    // Both at once: a nonzero average effect coexists with a prediction set
    // saying every individual effect is 0.
    bool paradox = false;
};

inline AteIteReport ate_ite_report(const TrialResult& trial, Alpha alpha,
                                   const std::string& label = "") {
    AteIteReport report;
    report.marginals = estimate_marginals(trial, label);  // labels empty-arm errors
    report.ate = ate_wald_ci(trial, alpha);
    report.ite_sets = classify_best(report.marginals, alpha);
    report.neyman_rejected = !report.ate.contains(0.0);
    report.fisher_consistent =
        report.ite_sets.size() == 1 && report.ite_sets.front() == BinarySet::Zero;
    report.paradox = report.neyman_rejected && report.fisher_consistent;
    return report;
}

// Covariate cell of a stratified two-binary-covariate trial.
struct StratumKey {
    int x1 = 0;
    int x2 = 0;

    bool operator<(const StratumKey& o) const {
        return x1 != o.x1 ? x1 < o.x1 : x2 < o.x2;
    }
};

struct StratifiedTrial {
    std::map<StratumKey, TrialResult> cells;
};

namespace detail {

inline TrialResult merge(const TrialResult& a, const TrialResult& b) {
    TrialResult out;
    out.treated.n = a.treated.n + b.treated.n;
    out.treated.successes = a.treated.successes + b.treated.successes;
    out.control.n = a.control.n + b.control.n;
    out.control.successes = a.control.successes + b.control.successes;
    return out;
}

}  // namespace detail

struct StratifiedReport {
    AteIteReport pooled;
    std::map<int, AteIteReport> by_x1;
    std::map<StratumKey, AteIteReport> by_cell;
};

inline StratifiedReport stratified_report(const StratifiedTrial& trial, Alpha alpha) {
    if (trial.cells.empty()) {
        throw std::invalid_argument("stratified_report: no strata");
    }
    StratifiedReport report;
    TrialResult pooled;
    std::map<int, TrialResult> x1_groups;
    for (const auto& [key, cell] : trial.cells) {
        pooled = detail::merge(pooled, cell);
        auto [it, fresh] = x1_groups.try_emplace(key.x1, cell);
        if (!fresh) it->second = detail::merge(it->second, cell);
        std::ostringstream os;
        os << "(x1=" << key.x1 << ", x2=" << key.x2 << ")";
        report.by_cell.emplace(key, ate_ite_report(cell, alpha, os.str()));
    }
    report.pooled = ate_ite_report(pooled, alpha, "pooled");
    for (const auto& [x1, group] : x1_groups) {
        report.by_x1.emplace(x1, ate_ite_report(group, alpha, "x1=" + std::to_string(x1)));
    }
    return report;
}

struct MixtureCheck {
    double pooled_lower = 0.0;
    double pooled_upper = 0.0;
    double mixture_lower = 0.0;
    double mixture_upper = 0.0;
    double residual = 0.0;  // how far the mixture interval escapes the pooled one
};

// Law-of-total-probability check for P(ITE = delta): the population-weighted
// mixture of per-stratum sharp bounds must sit inside the pooled sharp
// bounds. A positive residual flags an inconsistent input.
inline MixtureCheck total_probability_check(const StratifiedTrial& trial, int delta) {
    if (trial.cells.empty()) {
        throw std::invalid_argument("total_probability_check: no strata");
    }
    auto bound_at = [&](const BinaryMarginals& m) {
        auto bounds = binary_pmf_bounds(m);
        auto it = bounds.find(delta);
        if (it == bounds.end()) {
            throw std::domain_error("total_probability_check: delta must be -1, 0, or 1");
        }
        return std::make_pair(it->second.lower, it->second.upper);
    };
    TrialResult pooled;
    double total = 0.0;
    for (const auto& [key, cell] : trial.cells) {
        pooled = detail::merge(pooled, cell);
        total += static_cast<double>(cell.treated.n + cell.control.n);
    }
    MixtureCheck check;
    for (const auto& [key, cell] : trial.cells) {
        std::ostringstream os;
        os << "(x1=" << key.x1 << ", x2=" << key.x2 << ")";
        auto [lo, hi] = bound_at(estimate_marginals(cell, os.str()));
        const double w = (cell.treated.n + cell.control.n) / total;
        check.mixture_lower += w * lo;
        check.mixture_upper += w * hi;
    }
    std::tie(check.pooled_lower, check.pooled_upper) =
        bound_at(estimate_marginals(pooled, "pooled"));
    check.residual = std::max({0.0, check.pooled_lower - check.mixture_lower,
                               check.mixture_upper - check.pooled_upper});
    return check;
}

}  // namespace iteb
