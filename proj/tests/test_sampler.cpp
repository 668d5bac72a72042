#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "evidence/errors.hpp"
#include "evidence/sampler.hpp"

using namespace evidence;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ReplicationSetup point_setup(double w = 0.5) {
    const GaussianMeanModel model(1.0);
    const HypothesisPair hyps(ParameterRegion::point(0.0), ParameterRegion::point(1.0));
    const TwoLevelPrior prior(w, RegionDistribution::point_mass(hyps.theta1),
                              RegionDistribution::point_mass(hyps.theta2));
    MeasureSuite suite;
    suite.measures = {MeasureId::pvalue, MeasureId::rl, MeasureId::erl, MeasureId::bf,
                      MeasureId::posterior_odds};
    ReplicationSetup setup{model, hyps, prior, suite, {}, 16, true};
    setup.evidence_prior = PriorWithinRegions(prior.within1(), prior.within2(), 0.5);
    return setup;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        ks = std::max(ks, std::abs(static_cast<double>(i) / a.size() -
                                   static_cast<double>(j) / b.size()));
    }
    return ks;
}

} // namespace

TEST_CASE("TwoLevelPrior validates its inputs") {
    const auto w1 = RegionDistribution::point_mass(ParameterRegion::point(0.0));
    const auto w2 = RegionDistribution::point_mass(ParameterRegion::point(1.0));
    CHECK_THROWS_AS(TwoLevelPrior(0.0, w1, w2), DomainError);
    CHECK_THROWS_AS(TwoLevelPrior(1.0, w1, w2), DomainError);
    CHECK_THROWS_AS(TwoLevelPrior(-0.5, w1, w2), DomainError);
    CHECK_THROWS_AS(TwoLevelPrior(0.5, w1, w1), DomainError);
    CHECK_NOTHROW(TwoLevelPrior(0.5, w1, w2));
}

TEST_CASE("draw_theta hits region one with probability w") {
    const auto w1 = RegionDistribution::point_mass(ParameterRegion::point(0.0));
    const auto w2 = RegionDistribution::point_mass(ParameterRegion::point(1.0));

    {
        const TwoLevelPrior prior(0.5, w1, w2);
        RandomStream stream(51, 0);
        const int reps = 100000;
        int hits = 0;
        for (int i = 0; i < reps; ++i) {
            const auto draw = draw_theta(prior, stream);
            if (draw.region == RegionLabel::theta1) {
                ++hits;
                CHECK(draw.theta == 0.0);
            } else {
                CHECK(draw.theta == 1.0);
            }
        }
        const double frac = static_cast<double>(hits) / reps;
        CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / reps));
    }

    {
        const TwoLevelPrior prior(0.999, w1, w2);
        RandomStream stream(52, 0);
        const int reps = 1000000;
        int hits2 = 0;
        for (int i = 0; i < reps; ++i)
            if (draw_theta(prior, stream).region == RegionLabel::theta2) ++hits2;
        const double frac2 = static_cast<double>(hits2) / reps;
        CHECK(std::abs(frac2 - 0.001) < 3.0 * std::sqrt(0.001 * 0.999 / reps));
    }
}

TEST_CASE("draw_theta samples the within distribution of the chosen region") {
    const auto region1 = ParameterRegion::interval(-2.0, -1.0, true, true);
    const auto region2 = ParameterRegion::interval(1.0, 2.0, true, true);
    const TwoLevelPrior prior(0.4, RegionDistribution::uniform(region1),
                              RegionDistribution::uniform(region2));
    RandomStream stream(53, 0);
    for (int i = 0; i < 2000; ++i) {
        const auto draw = draw_theta(prior, stream);
        if (draw.region == RegionLabel::theta1) {
            CHECK(region1.contains(draw.theta));
        } else {
            CHECK(region2.contains(draw.theta));
        }
    }
}

TEST_CASE("golden single replication record") {
    const auto setup = point_setup();
    const auto records = run_replications(setup, 1, 9001, 1, 0);
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.replication_id == 0);
    CHECK(r.true_region == RegionLabel::theta1);
    CHECK(r.theta == 0.0);
    CHECK(r.n == 16);
    REQUIRE(r.evidence.size() == 5);

    CHECK(r.evidence[0].measure_id == MeasureId::pvalue);
    CHECK(r.evidence[0].value == 0.55252370316409849);
    CHECK_FALSE(r.evidence[0].in_strong_region);

    // Point hypotheses with matching point priors: all ratio measures agree.
    for (int i = 1; i < 5; ++i) {
        CHECK(r.evidence[i].value == -8.5281603014933793);
        CHECK_FALSE(r.evidence[i].in_strong_region);
    }
    CHECK(r.evidence[1].measure_id == MeasureId::rl);
    CHECK(r.evidence[2].measure_id == MeasureId::erl);
    CHECK(r.evidence[3].measure_id == MeasureId::bf);
    CHECK(r.evidence[4].measure_id == MeasureId::posterior_odds);
}

TEST_CASE("replications are a pure function of (seed, stream)") {
    const auto setup = point_setup();
    const auto batch = run_replications(setup, 100, 77, 4, 0);
    for (const std::int64_t i : {0, 1, 17, 42, 99}) {
        const auto solo = run_replications(setup, 1, 77, 1, static_cast<std::uint64_t>(i));
        CHECK(solo[0].theta == batch[i].theta);
        CHECK(solo[0].true_region == batch[i].true_region);
        REQUIRE(solo[0].evidence.size() == batch[i].evidence.size());
        for (std::size_t k = 0; k < solo[0].evidence.size(); ++k) {
            CHECK(solo[0].evidence[k].value == batch[i].evidence[k].value);
            CHECK(solo[0].evidence[k].in_strong_region == batch[i].evidence[k].in_strong_region);
        }
        const auto direct = simulate_replication(setup, 77, i, static_cast<std::uint64_t>(i));
        CHECK(direct.theta == batch[i].theta);
        CHECK(direct.evidence[0].value == batch[i].evidence[0].value);
    }
}

TEST_CASE("worker count never changes the results") {
    const auto setup = point_setup();
    const auto one = run_replications(setup, 10000, 31337, 1, 0);
    const auto eight = run_replications(setup, 10000, 31337, 8, 0);
    REQUIRE(one.size() == eight.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].replication_id == eight[i].replication_id);
        CHECK(one[i].theta == eight[i].theta);
        CHECK(one[i].true_region == eight[i].true_region);
        for (std::size_t k = 0; k < one[i].evidence.size(); ++k)
            CHECK(one[i].evidence[k].value == eight[i].evidence[k].value);
    }

    const auto counts_one = count_strong_evidence(setup, 10000, 31337, 1, 0);
    const auto counts_eight = count_strong_evidence(setup, 10000, 31337, 8, 0);
    REQUIRE(counts_one.size() == counts_eight.size());
    for (std::size_t k = 0; k < counts_one.size(); ++k) {
        CHECK(counts_one[k].replications == counts_eight[k].replications);
        CHECK(counts_one[k].count_S == counts_eight[k].count_S);
        CHECK(counts_one[k].count_S_and_H1 == counts_eight[k].count_S_and_H1);
    }
}

TEST_CASE("streaming counters match a record-level recount") {
    const auto setup = point_setup();
    const auto records = run_replications(setup, 5000, 99, 3, 0);
    const auto counters = count_strong_evidence(setup, 5000, 99, 3, 0);
    REQUIRE(counters.size() == setup.suite.measures.size());
    for (std::size_t k = 0; k < counters.size(); ++k) {
        std::int64_t in_s = 0;
        std::int64_t in_s_and_h1 = 0;
        for (const auto& r : records) {
            if (!r.evidence[k].in_strong_region) continue;
            ++in_s;
            if (r.true_region == RegionLabel::theta1) ++in_s_and_h1;
        }
        CHECK(counters[k].replications == 5000);
        CHECK(counters[k].count_S == in_s);
        CHECK(counters[k].count_S_and_H1 == in_s_and_h1);
    }
}

TEST_CASE("fast path and full path agree in distribution per measure") {
    auto fast_setup = point_setup();
    auto full_setup = point_setup();
    full_setup.use_sufficient_fast_path = false;
    fast_setup.n = 16;
    full_setup.n = 16;

    const int reps = 10000;
    const auto fast = run_replications(fast_setup, reps, 1001, 1, 0);
    const auto full = run_replications(full_setup, reps, 2002, 1, 0);

    for (std::size_t k = 0; k < fast_setup.suite.measures.size(); ++k) {
        std::vector<double> a(reps);
        std::vector<double> b(reps);
        for (int i = 0; i < reps; ++i) {
            a[i] = fast[i].evidence[k].value;
            b[i] = full[i].evidence[k].value;
        }
        CHECK(two_sample_ks(std::move(a), std::move(b)) < 0.023); // 1% level at 1e4 vs 1e4
    }
}

TEST_CASE("strong flags match the configured regions") {
    auto setup = point_setup();
    setup.suite.alpha_s = 0.05;
    setup.suite.k_s = 10.0;
    setup.suite.bf_threshold = 20.0;
    const auto records = run_replications(setup, 2000, 12, 1, 0);
    for (const auto& r : records) {
        for (std::size_t k = 0; k < r.evidence.size(); ++k) {
            const auto region = setup.suite.strong_region(setup.suite.measures[k]);
            CHECK(r.evidence[k].in_strong_region == categorize(r.evidence[k].value, region));
        }
    }
}

TEST_CASE("validate_setup rejects unusable configurations") {
    {
        auto setup = point_setup();
        setup.n = 0;
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    {
        auto setup = point_setup();
        setup.suite.measures = {};
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    {
        auto setup = point_setup();
        setup.suite.measures = {MeasureId::rl, MeasureId::rl};
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    {
        auto setup = point_setup();
        setup.suite.alpha_s = 1.5;
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    {
        auto setup = point_setup();
        setup.evidence_prior.reset();
        CHECK_THROWS_AS(validate_setup(setup), UnsupportedConfiguration);
        setup.suite.measures = {MeasureId::pvalue, MeasureId::rl, MeasureId::erl};
        CHECK_NOTHROW(validate_setup(setup));
    }
    {
        // Interval hypotheses: rl undefined, pvalue needs Theta1 bounded above.
        const GaussianMeanModel model(1.0);
        const HypothesisPair hyps(ParameterRegion::interval(0.0, kInf, true, false),
                                  ParameterRegion::interval(-kInf, 0.0, false, false));
        const TwoLevelPrior prior(
            0.5, RegionDistribution::truncated_gaussian(hyps.theta1, 0.0, 1.0),
            RegionDistribution::truncated_gaussian(hyps.theta2, 0.0, 1.0));
        MeasureSuite suite;
        suite.measures = {MeasureId::rl};
        ReplicationSetup setup{model, hyps, prior, suite, {}, 4, true};
        CHECK_THROWS_AS(validate_setup(setup), UnsupportedConfiguration);
        setup.suite.measures = {MeasureId::pvalue};
        CHECK_THROWS_AS(validate_setup(setup), UnsupportedConfiguration);
        setup.suite.measures = {MeasureId::erl};
        CHECK_NOTHROW(validate_setup(setup));
    }
    {
        // Within support escaping its hypothesis region.
        const GaussianMeanModel model(1.0);
        const HypothesisPair hyps(ParameterRegion::interval(-1.0, 0.0, true, true),
                                  ParameterRegion::interval(1.0, 2.0, true, true));
        const TwoLevelPrior prior(
            0.5, RegionDistribution::uniform(ParameterRegion::interval(-1.0, 0.5, true, true)),
            RegionDistribution::uniform(hyps.theta2));
        MeasureSuite suite;
        suite.measures = {MeasureId::erl};
        const ReplicationSetup setup{model, hyps, prior, suite, {}, 4, true};
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    {
        // Evidence prior regions must match the hypotheses.
        auto setup = point_setup();
        setup.evidence_prior = PriorWithinRegions(
            RegionDistribution::point_mass(ParameterRegion::point(0.0)),
            RegionDistribution::point_mass(ParameterRegion::point(2.0)), 0.5);
        CHECK_THROWS_AS(validate_setup(setup), DomainError);
    }
    CHECK_NOTHROW(validate_setup(point_setup()));
}

TEST_CASE("run_replications rejects invalid worker or size arguments") {
    const auto setup = point_setup();
    CHECK_THROWS_AS(run_replications(setup, -1, 0, 1, 0), DomainError);
    CHECK_THROWS_AS(run_replications(setup, 0, 0, 1, 0), DomainError);
    CHECK_THROWS_AS(run_replications(setup, 10, 0, 0, 0), DomainError);
    CHECK_THROWS_AS(count_strong_evidence(setup, 0, 0, 1, 0), DomainError);
}

TEST_CASE("EvidenceCounters merge adds componentwise") {
    EvidenceCounters a{10, 3, 2};
    const EvidenceCounters b{5, 1, 1};
    a.merge(b);
    CHECK(a.replications == 15);
    CHECK(a.count_S == 4);
    CHECK(a.count_S_and_H1 == 3);
}
