#pragma once

// Prediction-interval construction beyond the binary case: conservative
// quantile intervals, must-include points, ordinal trivial/zero-exclusion
// checks, and minimal-length valid intervals for discrete supports.

#include "itebounds/core.hpp"
#include "itebounds/makarov.hpp"
#include "itebounds/oracle.hpp"

namespace iteb {

struct RealInterval {
    double lo = 0.0;
    double hi = 0.0;

    RealInterval() = default;
    RealInterval(double l, double h) : lo(l), hi(h) {
        if (lo > hi + kClampWindow) {
            throw std::invalid_argument("interval: lo exceeds hi");
        }
    }
    double length() const { return hi - lo; }
    bool contains(double x) const {
        return x >= lo - kValueMatchTol && x <= hi + kValueMatchTol;
    }
};

// Alpha-level quantile anchors L', R' per arm: L' is the smallest support
// value with P(Y <= L') > alpha, R' the largest with P(Y >= R') > alpha.
struct QuantileAnchors {
    double l0 = 0.0, r0 = 0.0;
    double l1 = 0.0, r1 = 0.0;
};

namespace detail {

inline double lower_anchor(const StepCDF& f, double alpha) {
    for (std::size_t k = 0; k < f.jump_points().size(); ++k) {
        if (f.cdf_values()[k] > alpha) return f.jump_points()[k];
    }
    return f.jump_points().back();
}

inline double upper_anchor(const StepCDF& f, double alpha) {
    const auto& pts = f.jump_points();
    for (std::size_t k = pts.size(); k-- > 0;) {
        double tail = 1.0 - f.left_limit(pts[k]);  // P(Y >= pts[k])
        if (tail > alpha) return pts[k];
    }
    return pts.front();
}

// Shortest interval with P(Y < L) <= tail_lo and P(Y > R) <= tail_hi.
inline RealInterval central_marginal_interval(const StepCDF& f, double tail_lo,
                                              double tail_hi) {
    const auto& pts = f.jump_points();
    double lo = pts.front();
    for (std::size_t k = pts.size(); k-- > 0;) {
        if (f.left_limit(pts[k]) <= tail_lo + kClampWindow) {
            lo = pts[k];
            break;
        }
    }
    double hi = pts.back();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (1.0 - f.cdf_values()[k] <= tail_hi + kClampWindow) {
            hi = pts[k];
            break;
        }
    }
    return RealInterval(std::min(lo, hi), std::max(lo, hi));
}

}  // namespace detail

inline QuantileAnchors quantile_anchors(const StepCDF& f1, const StepCDF& f0,
                                        Alpha alpha) {
    QuantileAnchors q;
    q.l0 = detail::lower_anchor(f0, alpha);
    q.r0 = detail::upper_anchor(f0, alpha);
    q.l1 = detail::lower_anchor(f1, alpha);
    q.r1 = detail::upper_anchor(f1, alpha);
    return q;
}

// Union-bound interval [L1 - R0, R1 - L0] built from per-arm central
// intervals, each holding mass >= 1 - alpha/2. `lower_tail_share` splits the
// per-arm alpha/2 budget between the two tails (0.5 = equal tails).
inline RealInterval conservative_interval(const StepCDF& f1, const StepCDF& f0,
                                          Alpha alpha, double lower_tail_share = 0.5) {
    if (!(lower_tail_share > 0.0 && lower_tail_share < 1.0)) {
        throw std::domain_error("conservative_interval: tail share must be in (0,1)");
    }
    const double per_arm = alpha.value() / 2.0;
    RealInterval arm1 = detail::central_marginal_interval(
        f1, per_arm * lower_tail_share, per_arm * (1.0 - lower_tail_share));
    RealInterval arm0 = detail::central_marginal_interval(
        f0, per_arm * lower_tail_share, per_arm * (1.0 - lower_tail_share));
    return RealInterval(arm1.lo - arm0.hi, arm1.hi - arm0.lo);
}

// The two points every valid (1 - alpha) interval must contain:
// {L1' - R0', R1' - L0'}, returned as (low, high).
inline std::pair<double, double> must_include_points(const StepCDF& f1,
                                                     const StepCDF& f0, Alpha alpha) {
    QuantileAnchors q = quantile_anchors(f1, f0, alpha);
    return {q.l1 - q.r0, q.r1 - q.l0};
}

// Ordinal outcomes on a shared scale: true iff both extreme ITE values can
// carry mass above alpha, so only the trivial interval is certain to be valid.
inline bool ordinal_trivial_check(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                  Alpha alpha) {
    bool overlap = false;
    for (double y : pmf1.support()) {
        if (pmf0.index_of(y)) {
            overlap = true;
            break;
        }
    }
    if (!overlap) {
        throw std::invalid_argument("ordinal_trivial_check: supports share no value");
    }
    const double lo = std::min(pmf1.support().front(), pmf0.support().front());
    const double hi = std::max(pmf1.support().back(), pmf0.support().back());
    return std::min(pmf1.prob_at(lo), pmf0.prob_at(hi)) > alpha.value() &&
           std::min(pmf1.prob_at(hi), pmf0.prob_at(lo)) > alpha.value();
}

// Necessary condition to exclude 0 from a prediction set: the sharp upper
// bound on P(Delta = 0) falls below alpha.
inline bool ordinal_zero_pmf_check(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                   Alpha alpha) {
    double upper = 0.0;
    for (std::size_t i = 0; i < pmf1.size(); ++i) {
        auto j = pmf0.index_of(pmf1.support()[i]);
        if (j) upper += std::min(pmf1.probs()[i], pmf0.probs()[*j]);
    }
    return upper < alpha.value();
}

enum class CoverageMode { Sharp, Conservative };

struct IntervalResult {
    RealInterval interval;
    double worst_case_coverage = 0.0;
    std::vector<RealInterval> co_optimal;  // all minimal-length co-optimal intervals
    std::pair<double, double> must_include{0.0, 0.0};
    CoverageMode mode = CoverageMode::Sharp;
};

namespace detail {

// Guaranteed coverage of [a, b]: exact polytope minimum in sharp mode, the
// valid Makarov difference max{0, F^L(b) - F^U(a-)} in conservative mode.
// The Makarov difference is valid for two-sided events but not proven sharp.
inline double interval_coverage(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                const StepCDF& f1, const StepCDF& f0,
                                const std::vector<double>& grid, double a, double b,
                                CoverageMode mode) {
    if (mode == CoverageMode::Sharp) {
        return worst_case_interval_probability(pmf1, pmf0, a, b).lower;
    }
    double fu_prev = 0.0;  // F^U(a-): upper bound of P(Delta <= previous grid atom)
    for (std::size_t k = grid.size(); k-- > 0;) {
        if (grid[k] < a - kValueMatchTol) {
            fu_prev = makarov_upper(f1, f0, grid[k]);
            break;
        }
    }
    return std::max(0.0, makarov_lower(f1, f0, b) - fu_prev);
}

}  // namespace detail

// Shortest interval over the Delta-support grid whose guaranteed worst-case
// coverage reaches 1 - alpha; coverage breaks length ties, and all co-optimal
// intervals are reported (left endpoints descending).
inline IntervalResult minimal_valid_interval(const DiscretePMF& pmf1,
                                             const DiscretePMF& pmf0, Alpha alpha,
                                             CoverageMode mode) {
    if (mode == CoverageMode::Sharp && pmf1.size() * pmf0.size() > 400) {
        throw std::domain_error(
            "minimal_valid_interval: sharp mode limited to 400 support pairs; "
            "use conservative mode");
    }
    StepCDF f1 = pmf1.to_cdf(), f0 = pmf0.to_cdf();
    std::vector<double> grid = delta_support(pmf1, pmf0);

    struct Candidate {
        double a, b, len;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            candidates.push_back({grid[i], grid[j], grid[j] - grid[i]});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x,
                                                       const Candidate& y) {
        if (std::abs(x.len - y.len) > kValueMatchTol) return x.len < y.len;
        return x.a > y.a;
    });

    const double need = 1.0 - alpha.value() - tolerance();
    IntervalResult result;
    result.mode = mode;
    result.must_include = must_include_points(f1, f0, alpha);

    std::size_t k = 0;
    while (k < candidates.size()) {
        // process one length group at a time
        std::size_t end = k;
        while (end < candidates.size() &&
               candidates[end].len - candidates[k].len <= kValueMatchTol) {
            ++end;
        }
        double best_cov = -1.0;
        std::vector<std::pair<Candidate, double>> feasible;
        for (std::size_t c = k; c < end; ++c) {
            double cov = detail::interval_coverage(pmf1, pmf0, f1, f0, grid,
                                                   candidates[c].a, candidates[c].b,
                                                   mode);
            if (cov >= need) {
                feasible.emplace_back(candidates[c], cov);
                best_cov = std::max(best_cov, cov);
            }
        }
        if (!feasible.empty()) {
            for (const auto& [cand, cov] : feasible) {
                if (cov >= best_cov - tolerance()) {
                    result.co_optimal.emplace_back(cand.a, cand.b);
                }
            }
            const auto& first = *std::find_if(feasible.begin(), feasible.end(),
                                              [&](const auto& fc) {
                                                  return fc.second >=
                                                         best_cov - tolerance();
                                              });
            result.interval = RealInterval(first.first.a, first.first.b);
            result.worst_case_coverage = first.second;
            return result;
        }
        k = end;
    }
    // Unreachable: the full Delta-support interval always has coverage 1.
    throw std::logic_error("minimal_valid_interval: no valid interval found");
}

}  // namespace iteb
