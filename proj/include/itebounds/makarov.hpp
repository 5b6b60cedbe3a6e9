#pragma once

// Sharp cdf bounds on Delta = Y1 - Y0 for step-cdf margins, the cdf-to-pmf
// conversion, and zero-exclusion tests.
//
// The sup/inf over all real y reduce to a finite candidate set: the objective
// y -> F1(y) - P(Y0 < y - delta) is piecewise constant between jump points of
// either term, so evaluating each candidate point and the open interval just
// to its right covers every constancy piece.

#include "itebounds/core.hpp"
#include "itebounds/frechet_pmf.hpp"

namespace iteb {

namespace detail {

inline std::vector<double> makarov_candidates(const StepCDF& f1, const StepCDF& f0,
                                              double delta) {
    std::vector<double> ys = f1.jump_points();
    for (double j : f0.jump_points()) ys.push_back(j + delta);
    std::sort(ys.begin(), ys.end());
    return ys;
}

}  // namespace detail

// F^L(delta) = sup_y max{F1(y) - P(Y0 < y - delta), 0}.
inline double makarov_lower(const StepCDF& f1, const StepCDF& f0, double delta) {
    double best = 0.0;
    for (double y : detail::makarov_candidates(f1, f0, delta)) {
        best = std::max(best, f1.at(y) - f0.left_limit(y - delta));
    }
    return std::clamp(best, 0.0, 1.0);
}

// F^U(delta) = 1 + inf_y min{F1(y) - P(Y0 < y - delta), 0}.
inline double makarov_upper(const StepCDF& f1, const StepCDF& f0, double delta) {
    double worst = 0.0;
    for (double y : detail::makarov_candidates(f1, f0, delta)) {
        // value at y, and on the piece just right of y where the atom of Y0
        // at y - delta (if any) has entered the strict inequality
        worst = std::min(worst, f1.at(y) - f0.left_limit(y - delta));
        worst = std::min(worst, f1.at(y) - f0.at(y - delta));
    }
    return std::clamp(1.0 + worst, 0.0, 1.0);
}

struct CdfBoundCurve {
    std::vector<double> delta_grid;
    std::vector<double> lower;
    std::vector<double> upper;
};

// Curve over a delta grid; defaults to the exact Minkowski difference of the
// two supports.
inline CdfBoundCurve makarov_curve(const StepCDF& f1, const StepCDF& f0,
                                   std::vector<double> grid = {}) {
    if (grid.empty()) {
        grid = delta_support(f1.to_pmf(), f0.to_pmf());
    }
    CdfBoundCurve curve;
    curve.delta_grid = std::move(grid);
    for (double d : curve.delta_grid) {
        curve.lower.push_back(makarov_lower(f1, f0, d));
        curve.upper.push_back(makarov_upper(f1, f0, d));
    }
    return curve;
}

// Valid (not sharp in general) pmf interval from cdf intervals at i and i-1:
// F(i) in [a, b], F(i-1) in [c, d] gives P(Delta = i) in [a - d, b - c].
inline BoundPair cdf_to_pmf_bounds(const BoundPair& bounds_at_i,
                                   const BoundPair& bounds_at_prev) {
    double lo = std::max(bounds_at_i.lower - bounds_at_prev.upper, 0.0);
    double hi = std::min(bounds_at_i.upper - bounds_at_prev.lower, 1.0);
    return BoundPair(lo, hi);
}

struct ZeroExclusionReport {
    bool left_endpoint_must_be_leq_0 = false;
    bool right_endpoint_must_be_geq_0 = false;
    double upper_bound_at_0 = 0.0;    // F^U(0)
    double lower_bound_at_0m = 0.0;   // F^L(0-)
};

// Whether any valid (1 - alpha) prediction interval can exclude zero. Both
// flags true means every valid interval contains 0.
inline ZeroExclusionReport zero_exclusion(const StepCDF& f1, const StepCDF& f0,
                                          Alpha alpha) {
    ZeroExclusionReport report;
    report.upper_bound_at_0 = makarov_upper(f1, f0, 0.0);
    double best = 0.0;
    std::vector<double> ys = f1.jump_points();
    ys.insert(ys.end(), f0.jump_points().begin(), f0.jump_points().end());
    for (double y : ys) {
        best = std::max(best, f1.at(y) - f0.at(y));
    }
    report.lower_bound_at_0m = std::clamp(best, 0.0, 1.0);
    report.left_endpoint_must_be_leq_0 = report.upper_bound_at_0 > alpha.value();
    report.right_endpoint_must_be_geq_0 = 1.0 - report.lower_bound_at_0m > alpha.value();
    return report;
}

}  // namespace iteb
