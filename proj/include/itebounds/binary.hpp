#pragma once

// Complete analysis of the binary-treatment binary-outcome model: type
// parameterization by t = P(AR), feasible joint set, validity of each of the
// six prediction sets, best-set classification, and necessary conditions for
// a set to be valid and best.

#include <array>
#include <map>

#include "itebounds/core.hpp"
#include "itebounds/frechet_pmf.hpp"

namespace iteb {

struct BinaryMarginals {
    Probability p0;  // P(Y=1 | D=0)
    Probability p1;  // P(Y=1 | D=1)
};

// Principal-strata proportions: Never Recover, Helped, Hurt, Always Recover.
struct TypeDistribution {
    double nr = 0.0;
    double he = 0.0;
    double hu = 0.0;
    double ar = 0.0;
};

enum class BinarySet { NegOne, Zero, One, ZeroToOne, NegToZero, Full };

inline constexpr std::array<BinarySet, 6> kAllBinarySets = {
    BinarySet::NegOne,   BinarySet::Zero,      BinarySet::One,
    BinarySet::ZeroToOne, BinarySet::NegToZero, BinarySet::Full};

inline int set_length(BinarySet s) {
    switch (s) {
        case BinarySet::NegOne:
        case BinarySet::Zero:
        case BinarySet::One:
            return 0;
        case BinarySet::ZeroToOne:
        case BinarySet::NegToZero:
            return 1;
        case BinarySet::Full:
            return 2;
    }
    return 2;
}

inline const char* set_tag(BinarySet s) {
    switch (s) {
        case BinarySet::NegOne: return "{-1}";
        case BinarySet::Zero: return "{0}";
        case BinarySet::One: return "{1}";
        case BinarySet::ZeroToOne: return "[0,1]";
        case BinarySet::NegToZero: return "[-1,0]";
        case BinarySet::Full: return "[-1,1]";
    }
    return "?";
}

inline bool set_contains(BinarySet s, int ite) {
    switch (s) {
        case BinarySet::NegOne: return ite == -1;
        case BinarySet::Zero: return ite == 0;
        case BinarySet::One: return ite == 1;
        case BinarySet::ZeroToOne: return ite == 0 || ite == 1;
        case BinarySet::NegToZero: return ite == -1 || ite == 0;
        case BinarySet::Full: return ite >= -1 && ite <= 1;
    }
    return false;
}

// Mirror across p0 <-> p1: {1} <-> {-1}, [0,1] <-> [-1,0]; {0} and [-1,1] fixed.
inline BinarySet set_reflection(BinarySet s) {
    switch (s) {
        case BinarySet::NegOne: return BinarySet::One;
        case BinarySet::One: return BinarySet::NegOne;
        case BinarySet::ZeroToOne: return BinarySet::NegToZero;
        case BinarySet::NegToZero: return BinarySet::ZeroToOne;
        default: return s;
    }
}

// Boole-Fréchet range for t = P(AR).
inline std::pair<double, double> feasible_t_range(const BinaryMarginals& m) {
    double t_min = std::max(0.0, m.p0 + m.p1 - 1.0);
    double t_max = std::min(m.p0.value(), m.p1.value());
    return {t_min, t_max};
}

inline TypeDistribution type_distribution(const BinaryMarginals& m, double t) {
    auto [t_min, t_max] = feasible_t_range(m);
    if (t < t_min - kClampWindow || t > t_max + kClampWindow) {
        std::ostringstream os;
        os << "t = " << t << " violates the Frechet bound ["
           << t_min << ", " << t_max << "]";
        throw std::domain_error(os.str());
    }
    t = std::clamp(t, t_min, t_max);
    TypeDistribution d;
    d.ar = t;
    d.hu = std::max(m.p0 - t, 0.0);
    d.he = std::max(m.p1 - t, 0.0);
    d.nr = std::max(1.0 - m.p0 - m.p1 + t, 0.0);
    return d;
}

// Minimum over feasible t of P(ITE in s).
inline double worst_case_coverage(const BinaryMarginals& m, BinarySet s) {
    auto [t_min, t_max] = feasible_t_range(m);
    double cov = 1.0;
    switch (s) {
        case BinarySet::Full: cov = 1.0; break;
        case BinarySet::Zero: cov = 1.0 - m.p0 - m.p1 + 2.0 * t_min; break;
        case BinarySet::One: cov = m.p1 - t_max; break;
        case BinarySet::NegOne: cov = m.p0 - t_max; break;
        case BinarySet::ZeroToOne: cov = 1.0 - (m.p0 - t_min); break;
        case BinarySet::NegToZero: cov = 1.0 - (m.p1 - t_min); break;
    }
    return std::clamp(cov, 0.0, 1.0);
}

// Sets whose worst-case coverage meets 1 - alpha; the trivial set always does.
inline std::vector<BinarySet> valid_sets(const BinaryMarginals& m, Alpha alpha) {
    std::vector<BinarySet> result;
    for (BinarySet s : kAllBinarySets) {
        if (worst_case_coverage(m, s) >= 1.0 - alpha.value() - tolerance()) {
            result.push_back(s);
        }
    }
    return result;
}

// Among valid sets, keep the minimal-length ones, then the ones maximizing
// worst-case coverage. Ties are real on the p0 = p1 diagonal, so all
// co-optimal sets are returned ([0,1] listed before [-1,0]).
inline std::vector<BinarySet> classify_best(const BinaryMarginals& m, Alpha alpha) {
    std::vector<BinarySet> valid = valid_sets(m, alpha);
    int min_len = 2;
    for (BinarySet s : valid) min_len = std::min(min_len, set_length(s));
    double best_cov = 0.0;
    for (BinarySet s : valid) {
        if (set_length(s) == min_len) {
            best_cov = std::max(best_cov, worst_case_coverage(m, s));
        }
    }
    std::vector<BinarySet> best;
    for (BinarySet s : valid) {
        if (set_length(s) == min_len &&
            worst_case_coverage(m, s) >= best_cov - tolerance()) {
            best.push_back(s);
        }
    }
    return best;
}

// Closed-form inequality systems for the existence of a compatible joint
// making s valid (and, for the one-unit intervals, best).
inline bool necessary_condition_valid_best(BinarySet s, const BinaryMarginals& m,
                                           Alpha alpha) {
    const double p0 = m.p0, p1 = m.p1, a = alpha.value();
    switch (s) {
        case BinarySet::One:
            return p1 >= 1.0 - a && p0 <= a;
        case BinarySet::NegOne:
            return p0 >= 1.0 - a && p1 <= a;
        case BinarySet::Zero:
            return std::abs(p1 - p0) <= a;
        case BinarySet::Full:
            return p0 >= a && p0 <= 1.0 - a && p1 >= a && p1 <= 1.0 - a;
        case BinarySet::NegToZero:
            return p0 >= p1 && 1.0 - p0 + p1 > a && p0 + p1 > a &&
                   2.0 - p0 - p1 > a;
        case BinarySet::ZeroToOne:
            return p1 >= p0 && 1.0 - p1 + p0 > a && p0 + p1 > a &&
                   2.0 - p0 - p1 > a;
    }
    return false;
}

namespace detail {

inline DiscretePMF binary_outcome_pmf(double prob_one) {
    if (prob_one <= 0.0) return DiscretePMF::point_mass(0.0);
    if (prob_one >= 1.0) return DiscretePMF::point_mass(1.0);
    return DiscretePMF({0.0, 1.0}, {1.0 - prob_one, prob_one});
}

// Joint at a given t = P(AR), restricted to the nonzero support of each arm.
inline Coupling binary_coupling_at(const BinaryMarginals& m, double t) {
    DiscretePMF pmf1 = binary_outcome_pmf(m.p1);
    DiscretePMF pmf0 = binary_outcome_pmf(m.p0);
    // full 2x2 layout: rows Y1 in {0,1}, cols Y0 in {0,1}
    const double nr = 1.0 - m.p0 - m.p1 + t;  // (Y1=0, Y0=0)
    const double hu = m.p0 - t;               // (Y1=0, Y0=1)
    const double he = m.p1 - t;               // (Y1=1, Y0=0)
    const double ar = t;                      // (Y1=1, Y0=1)
    const double full[2][2] = {{nr, hu}, {he, ar}};
    std::vector<double> mass;
    for (double y1 : pmf1.support()) {
        for (double y0 : pmf0.support()) {
            mass.push_back(std::max(full[y1 > 0.5][y0 > 0.5], 0.0));
        }
    }
    return Coupling(pmf1.support(), pmf0.support(), std::move(mass));
}

}  // namespace detail

// Sharp pmf bounds on the ITE values {-1, 0, 1}, each attained at one of the
// two Fréchet-Hoeffding extreme couplings.
//
// Note on parameterization: the two-way outcome table can be written with
// p = P(Y0=0) = 1-p0, q = P(Y1=0) = 1-p1 and its own cell parameter
// t' = P(Y1=0, Y0=0) = P(NR) = 1 - p0 - p1 + t_AR. Both conventions give the
// same feasible family; everything below is expressed in t = P(AR).
inline std::map<int, BoundPair> binary_pmf_bounds(const BinaryMarginals& m) {
    auto [t_min, t_max] = feasible_t_range(m);
    Coupling counter = detail::binary_coupling_at(m, t_min);   // countermonotone
    Coupling comono = detail::binary_coupling_at(m, t_max);    // comonotone
    std::map<int, BoundPair> bounds;
    // P(ITE=-1) = hu = p0 - t; P(ITE=0) = nr + ar = 1-p0-p1+2t; P(ITE=1) = he.
    bounds.emplace(-1, BoundPair(m.p0 - t_max, m.p0 - t_min, comono, counter));
    bounds.emplace(0, BoundPair(1.0 - m.p0 - m.p1 + 2.0 * t_min,
                                1.0 - m.p0 - m.p1 + 2.0 * t_max, counter, comono));
    bounds.emplace(1, BoundPair(m.p1 - t_max, m.p1 - t_min, comono, counter));
    return bounds;
}

// Sharp cdf bounds at delta in {-1, 0}; F(1) = 1 is fixed.
inline std::map<int, BoundPair> binary_cdf_bounds(const BinaryMarginals& m) {
    auto [t_min, t_max] = feasible_t_range(m);
    Coupling counter = detail::binary_coupling_at(m, t_min);
    Coupling comono = detail::binary_coupling_at(m, t_max);
    std::map<int, BoundPair> bounds;
    // F(-1) = p0 - t, decreasing in t; F(0) = 1 - p1 + t, increasing in t.
    bounds.emplace(-1, BoundPair(m.p0 - t_max, m.p0 - t_min, comono, counter));
    bounds.emplace(0, BoundPair(1.0 - m.p1 + t_min, 1.0 - m.p1 + t_max, counter, comono));
    return bounds;
}

}  // namespace iteb
