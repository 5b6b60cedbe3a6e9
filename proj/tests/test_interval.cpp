#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "itebounds/binary.hpp"
#include "itebounds/interval.hpp"
#include "itebounds/oracle.hpp"

using namespace iteb;
using test_helpers::random_pmf;
using test_helpers::uniform01;

namespace {

DiscretePMF uniform_on(int lo, int hi) {
    std::vector<double> support, probs;
    for (int v = lo; v <= hi; ++v) {
        support.push_back(v);
        probs.push_back(1.0 / (hi - lo + 1));
    }
    return DiscretePMF(std::move(support), std::move(probs));
}

DiscretePMF arm_pmf(double prob_one) {
    if (prob_one <= 0.0) return DiscretePMF::point_mass(0.0);
    if (prob_one >= 1.0) return DiscretePMF::point_mass(1.0);
    return DiscretePMF({0.0, 1.0}, {1.0 - prob_one, prob_one});
}

}  // namespace

TEST_CASE("conservative interval: point-mass margins collapse to a point") {
    StepCDF f1 = DiscretePMF::point_mass(5.0).to_cdf();
    StepCDF f0 = DiscretePMF::point_mass(2.0).to_cdf();
    RealInterval r = conservative_interval(f1, f0, Alpha(0.1));
    CHECK(r.lo == 3.0);
    CHECK(r.hi == 3.0);
}

TEST_CASE("conservative interval: uniform{1..20} margins at alpha 0.1") {
    // each arm needs central mass >= 1 - alpha/2 = 0.95, i.e. 19 of 20 points;
    // equal tails of alpha/4 = 0.025 < 1/20 keep both extremes, giving [1,20]
    // per arm and [-19, 19] for the difference
    StepCDF f = uniform_on(1, 20).to_cdf();
    RealInterval r = conservative_interval(f, f, Alpha(0.1));
    CHECK(r.lo == -19.0);
    CHECK(r.hi == 19.0);
}

TEST_CASE("conservative interval: tails wide enough to trim both ends") {
    // alpha = 0.4: per arm budget 0.2, equal tails 0.1 = 2 points on each side
    StepCDF f = uniform_on(1, 20).to_cdf();
    RealInterval r = conservative_interval(f, f, Alpha(0.4));
    CHECK(r.lo == -15.0);
    CHECK(r.hi == 15.0);
    CHECK_THROWS_AS(conservative_interval(f, f, Alpha(0.4), 0.0), std::domain_error);
}

TEST_CASE("conservative interval: oracle-verified coverage on small supports") {
    std::mt19937_64 rng(112358);
    for (int rep = 0; rep < 60; ++rep) {
        DiscretePMF pmf1 = random_pmf(rng, 2 + rng() % 5, 0, 1);
        DiscretePMF pmf0 = random_pmf(rng, 2 + rng() % 5, 0, 1);
        Alpha a(0.05 + 0.4 * uniform01(rng));
        RealInterval r = conservative_interval(pmf1.to_cdf(), pmf0.to_cdf(), a);
        BoundPair outside = worst_case_event_probability(
            pmf1, pmf0,
            [&](double d) { return d < r.lo - kValueMatchTol || d > r.hi + kValueMatchTol; });
        CHECK(outside.upper <= a.value() + 1e-9);
    }
}

TEST_CASE("quantile anchors and must-include points on a 3-point uniform") {
    StepCDF f = uniform_on(0, 2).to_cdf();
    QuantileAnchors q = quantile_anchors(f, f, Alpha(0.3));
    CHECK(q.l0 == 0.0);
    CHECK(q.r0 == 2.0);
    CHECK(q.l1 == 0.0);
    CHECK(q.r1 == 2.0);
    auto [lo, hi] = must_include_points(f, f, Alpha(0.3));
    CHECK(lo == -2.0);
    CHECK(hi == 2.0);
}

TEST_CASE("must-include points with a degenerate control arm") {
    StepCDF f1 = uniform_on(0, 4).to_cdf();
    StepCDF f0 = DiscretePMF::point_mass(0.0).to_cdf();
    QuantileAnchors q = quantile_anchors(f1, f0, Alpha(0.1));
    auto [lo, hi] = must_include_points(f1, f0, Alpha(0.1));
    CHECK(lo == q.l1);
    CHECK(hi == q.r1);
}

TEST_CASE("must-include necessity: a coupling pushes mass beyond any shorter interval") {
    std::mt19937_64 rng(101010);
    for (int rep = 0; rep < 40; ++rep) {
        DiscretePMF pmf1 = random_pmf(rng, 3 + rng() % 3);
        DiscretePMF pmf0 = random_pmf(rng, 3 + rng() % 3);
        Alpha a(0.05 + 0.3 * uniform01(rng));
        StepCDF f1 = pmf1.to_cdf(), f0 = pmf0.to_cdf();
        QuantileAnchors q = quantile_anchors(f1, f0, a);
        // corner tail masses exceed alpha by the anchor definitions
        double tail1 = 1.0 - f1.left_limit(q.r1);
        double tail0 = f0.at(q.l0);
        CHECK(tail1 > a.value());
        CHECK(tail0 > a.value());
        BoundPair corner = worst_case_event_probability(
            pmf1, pmf0, [&](double d) { return d >= q.r1 - q.l0 - kValueMatchTol; });
        CHECK(corner.upper >= std::min(tail1, tail0) - 1e-9);
    }
}

TEST_CASE("ordinal trivial check: corner masses against alpha") {
    DiscretePMF u3 = uniform_on(0, 2);
    CHECK(ordinal_trivial_check(u3, u3, Alpha(0.05)));
    CHECK_FALSE(ordinal_trivial_check(u3, u3, Alpha(0.34)));
    // one corner impossible: P(Y1 = max) = 0
    DiscretePMF top_missing({0.0, 1.0, 2.0}, {0.5, 0.5, 0.0});
    CHECK_FALSE(ordinal_trivial_check(top_missing, u3, Alpha(0.05)));
    DiscretePMF far({10.0, 11.0}, {0.5, 0.5});
    CHECK_THROWS_AS(ordinal_trivial_check(u3, far, Alpha(0.05)), std::invalid_argument);
}

TEST_CASE("ordinal zero-pmf check matches the sharp upper bound at zero") {
    DiscretePMF u3 = uniform_on(0, 2);
    CHECK_FALSE(ordinal_zero_pmf_check(u3, u3, Alpha(0.4)));  // identical: sum = 1
    DiscretePMF shifted({5.0, 6.0}, {0.5, 0.5});
    CHECK(ordinal_zero_pmf_check(u3, shifted, Alpha(0.05)));  // disjoint: sum = 0
    std::mt19937_64 rng(5417);
    for (int rep = 0; rep < 60; ++rep) {
        DiscretePMF pmf1 = random_pmf(rng, 2 + rng() % 4, 0, 1);
        DiscretePMF pmf0 = random_pmf(rng, 2 + rng() % 4, 0, 1);
        Alpha a(0.05 + 0.4 * uniform01(rng));
        const double upper = ite_pmf_bounds(pmf1, pmf0, 0.0).upper;
        CHECK(ordinal_zero_pmf_check(pmf1, pmf0, a) == (upper < a.value()));
    }
}

TEST_CASE("minimal valid interval: point-mass margins give a degenerate interval") {
    DiscretePMF a = DiscretePMF::point_mass(4.0), b = DiscretePMF::point_mass(1.0);
    for (CoverageMode mode : {CoverageMode::Sharp, CoverageMode::Conservative}) {
        IntervalResult res = minimal_valid_interval(a, b, Alpha(0.05), mode);
        CHECK(res.interval.lo == 3.0);
        CHECK(res.interval.hi == 3.0);
        CHECK(res.worst_case_coverage >= 0.95);
    }
}

TEST_CASE("minimal valid interval: binary supports reproduce classify_best") {
    std::mt19937_64 rng(9182736);
    for (int rep = 0; rep < 200; ++rep) {
        const double p0 = 0.01 + 0.98 * uniform01(rng);
        const double p1 = 0.01 + 0.98 * uniform01(rng);
        Alpha a(0.01 + 0.48 * uniform01(rng));
        auto best = classify_best(BinaryMarginals{Probability(p0), Probability(p1)}, a);
        IntervalResult res =
            minimal_valid_interval(arm_pmf(p1), arm_pmf(p0), a, CoverageMode::Sharp);
        REQUIRE(res.co_optimal.size() == best.size());
        for (std::size_t k = 0; k < best.size(); ++k) {
            double lo = 0, hi = 0;
            switch (best[k]) {
                case BinarySet::NegOne: lo = hi = -1; break;
                case BinarySet::Zero: lo = hi = 0; break;
                case BinarySet::One: lo = hi = 1; break;
                case BinarySet::ZeroToOne: lo = 0; hi = 1; break;
                case BinarySet::NegToZero: lo = -1; hi = 0; break;
                case BinarySet::Full: lo = -1; hi = 1; break;
            }
            CHECK(res.co_optimal[k].lo == lo);
            CHECK(res.co_optimal[k].hi == hi);
        }
    }
}

TEST_CASE("minimal valid interval: 3-point uniform at alpha 0.4") {
    DiscretePMF u3 = uniform_on(0, 2);
    // oracle worst case of P(delta = 0) for identical uniform margins is 0,
    // so {0} is invalid and the search must widen
    IntervalResult res = minimal_valid_interval(u3, u3, Alpha(0.4), CoverageMode::Sharp);
    CHECK(res.interval.length() >= 1.0);
    CHECK(res.worst_case_coverage >= 0.6 - 1e-9);
    BoundPair check = worst_case_interval_probability(u3, u3, res.interval.lo,
                                                      res.interval.hi);
    CHECK(std::abs(check.lower - res.worst_case_coverage) < 1e-9);
}

TEST_CASE("sharp mode size guard points at conservative mode") {
    std::vector<double> support(25), probs(25, 1.0 / 25);
    for (int k = 0; k < 25; ++k) support[k] = k;
    DiscretePMF big(support, probs);
    CHECK_THROWS_WITH(minimal_valid_interval(big, big, Alpha(0.1), CoverageMode::Sharp),
                      Catch::Matchers::ContainsSubstring("conservative"));
    CHECK_NOTHROW(minimal_valid_interval(big, big, Alpha(0.1), CoverageMode::Conservative));
}

TEST_CASE("random instances: interval properties hold in both modes") {
    std::mt19937_64 rng(777001);
    for (int rep = 0; rep < 80; ++rep) {
        DiscretePMF pmf1 = random_pmf(rng, 2 + rng() % 4, 0, 1);
        DiscretePMF pmf0 = random_pmf(rng, 2 + rng() % 4, 0, 1);
        Alpha a(0.05 + 0.4 * uniform01(rng));
        IntervalResult sharp = minimal_valid_interval(pmf1, pmf0, a, CoverageMode::Sharp);
        IntervalResult cons =
            minimal_valid_interval(pmf1, pmf0, a, CoverageMode::Conservative);

        // conservative never shorter than sharp
        CHECK(cons.interval.length() >= sharp.interval.length() - 1e-12);

        // both contain the must-include points
        for (const IntervalResult* res : {&sharp, &cons}) {
            CHECK(res->interval.contains(res->must_include.first));
            CHECK(res->interval.contains(res->must_include.second));
            CHECK(res->worst_case_coverage >= 1.0 - a.value() - 1e-9);
        }

        // conservative coverage claim is valid: true worst case is at least it
        BoundPair truth = worst_case_interval_probability(pmf1, pmf0, cons.interval.lo,
                                                          cons.interval.hi);
        CHECK(truth.lower >= cons.worst_case_coverage - 1e-9);

        // atom-inclusion: any atom with oracle-min mass above alpha is inside
        for (double d : delta_support(pmf1, pmf0)) {
            double atom_min = worst_case_delta_probability(pmf1, pmf0, d).lower;
            if (atom_min > a.value() + 1e-9) {
                CHECK(sharp.interval.contains(d));
                CHECK(cons.interval.contains(d));
            }
        }
    }
}

TEST_CASE("co-optimal list is ordered with left endpoints descending") {
    DiscretePMF pmf1({0.0, 1.0}, {0.96, 0.04});
    DiscretePMF pmf0({0.0, 1.0}, {0.96, 0.04});
    IntervalResult res =
        minimal_valid_interval(pmf1, pmf0, Alpha(0.05), CoverageMode::Sharp);
    REQUIRE(res.co_optimal.size() == 2);
    CHECK(res.co_optimal[0].lo == 0.0);
    CHECK(res.co_optimal[0].hi == 1.0);
    CHECK(res.co_optimal[1].lo == -1.0);
    CHECK(res.co_optimal[1].hi == 0.0);
}
