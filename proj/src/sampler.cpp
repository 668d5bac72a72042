#include "evidence/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

namespace evidence {

ThetaDraw draw_theta(const TwoLevelPrior& prior, RandomStream& stream) {
    // Region choice consumes one uniform before any within-region draw, so
    // the stream layout is the same for every within-distribution kind.
    const double u = stream.uniform01();
    if (u < prior.w()) return {prior.within1().sample(stream), RegionLabel::theta1};
    return {prior.within2().sample(stream), RegionLabel::theta2};
}

namespace {

std::vector<StrongEvidenceRegion> strong_regions_for(const MeasureSuite& suite) {
    std::vector<StrongEvidenceRegion> out;
    out.reserve(suite.measures.size());
    for (MeasureId id : suite.measures) out.push_back(suite.strong_region(id));
    return out;
}

void evaluate_evidence(const ReplicationSetup& setup,
                       const std::vector<StrongEvidenceRegion>& regions, const Sample& sample,
                       std::vector<EvidenceResult>& out) {
    const HypothesisPair& hyp = setup.hypotheses;
    out.clear();
    double bf21_log = 0.0;
    bool bf21_ready = false;
    const auto bf21 = [&]() {
        if (!bf21_ready) {
            bf21_log = -bayes_factor_log(setup.model, sample, *setup.evidence_prior, hyp.theta1,
                                         hyp.theta2);
            bf21_ready = true;
        }
        return bf21_log;
    };
    for (std::size_t i = 0; i < setup.suite.measures.size(); ++i) {
        const MeasureId id = setup.suite.measures[i];
        double value = 0.0;
        switch (id) {
            case MeasureId::pvalue:
                value = p_value(setup.model, sample, hyp.theta1);
                break;
            case MeasureId::rl:
                value = ratio_of_likelihoods_log(setup.model, sample, hyp.theta2.point_value(),
                                                 hyp.theta1.point_value());
                break;
            case MeasureId::erl:
                value = extended_ratio_of_likelihoods_log(setup.model, sample, hyp.theta2,
                                                          hyp.theta1);
                break;
            case MeasureId::bf:
                value = bf21();
                break;
            case MeasureId::posterior_odds:
                value = posterior_odds_log(bf21(), *setup.evidence_prior);
                break;
        }
        out.push_back(make_evidence_result(id, value, regions[i]));
    }
}

void replicate_into(const ReplicationSetup& setup, const std::vector<StrongEvidenceRegion>& regions,
                    std::uint64_t master_seed, std::int64_t replication_id,
                    std::uint64_t stream_id, ReplicationRecord& out) {
    RandomStream stream(master_seed, stream_id);
    const ThetaDraw draw = draw_theta(setup.prior, stream);
    const Sample sample =
        setup.use_sufficient_fast_path
            ? simulate_sufficient_stat(setup.model, draw.theta, setup.n, stream)
            : simulate_sample(setup.model, draw.theta, setup.n, stream);
    out.replication_id = replication_id;
    out.true_region = draw.region;
    out.theta = draw.theta;
    out.n = setup.n;
    evaluate_evidence(setup, regions, sample, out.evidence);
}

/// Partitions [0, m) into contiguous blocks, one per worker. block(k, b, e)
/// runs on worker k; the first worker exception (by worker index) wins.
void run_blocks(std::int64_t m, int workers,
                const std::function<void(int, std::int64_t, std::int64_t)>& block) {
    if (workers < 1) throw DomainError("run_blocks: workers must be >= 1");
    const int used = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(m, 1)));
    if (used == 1) {
        block(0, 0, m);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(used);
    std::vector<std::exception_ptr> errors(used);
    const std::int64_t quot = m / used;
    const std::int64_t rem = m % used;
    std::int64_t begin = 0;
    for (int k = 0; k < used; ++k) {
        const std::int64_t end = begin + quot + (k < rem ? 1 : 0);
        threads.emplace_back([&block, &errors, k, begin, end] {
            try {
                block(k, begin, end);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : threads) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace

void validate_setup(const ReplicationSetup& setup) {
    if (setup.n < 1) throw DomainError("ReplicationSetup: n must be >= 1");
    if (setup.suite.measures.empty())
        throw DomainError("ReplicationSetup: at least one measure must be configured");
    for (std::size_t i = 0; i < setup.suite.measures.size(); ++i)
        for (std::size_t j = i + 1; j < setup.suite.measures.size(); ++j)
            if (setup.suite.measures[i] == setup.suite.measures[j])
                throw DomainError("ReplicationSetup: duplicate measure " +
                                  to_string(setup.suite.measures[i]));
    // Calibration ranges are enforced by the factories.
    for (MeasureId id : setup.suite.measures) (void)setup.suite.strong_region(id);

    const HypothesisPair& hyp = setup.hypotheses;
    if (!setup.prior.within1().region().subset_of(hyp.theta1))
        throw DomainError("ReplicationSetup: within1 support must lie inside the Theta1 region");
    if (!setup.prior.within2().region().subset_of(hyp.theta2))
        throw DomainError("ReplicationSetup: within2 support must lie inside the Theta2 region");

    for (MeasureId id : setup.suite.measures) {
        switch (id) {
            case MeasureId::pvalue:
                if (!hyp.theta1.is_point() && !hyp.theta1.bounded_above())
                    throw UnsupportedConfiguration(
                        "ReplicationSetup: pvalue needs Theta1 bounded above (sup is degenerate)");
                break;
            case MeasureId::rl:
                if (!hyp.theta1.is_point() || !hyp.theta2.is_point())
                    throw UnsupportedConfiguration(
                        "ReplicationSetup: rl needs point hypotheses; use erl for regions");
                break;
            case MeasureId::erl:
                break;
            case MeasureId::bf:
            case MeasureId::posterior_odds:
                if (!setup.evidence_prior.has_value())
                    throw UnsupportedConfiguration("ReplicationSetup: " + to_string(id) +
                                                   " needs an evidence prior");
                if (!(setup.evidence_prior->q1().region() == hyp.theta1) ||
                    !(setup.evidence_prior->q2().region() == hyp.theta2))
                    throw DomainError(
                        "ReplicationSetup: evidence prior regions must match the hypotheses");
                break;
        }
    }
}

ReplicationRecord simulate_replication(const ReplicationSetup& setup, std::uint64_t master_seed,
                                       std::int64_t replication_id, std::uint64_t stream_id) {
    const std::vector<StrongEvidenceRegion> regions = strong_regions_for(setup.suite);
    ReplicationRecord rec;
    replicate_into(setup, regions, master_seed, replication_id, stream_id, rec);
    return rec;
}

std::vector<ReplicationRecord> run_replications(const ReplicationSetup& setup, std::int64_t m,
                                                std::uint64_t master_seed, int workers,
                                                std::uint64_t stream_base) {
    if (m < 1) throw DomainError("run_replications: M must be >= 1");
    validate_setup(setup);
    const std::vector<StrongEvidenceRegion> regions = strong_regions_for(setup.suite);
    std::vector<ReplicationRecord> records(static_cast<std::size_t>(m));
    run_blocks(m, workers, [&](int, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i)
            replicate_into(setup, regions, master_seed, i, stream_base + static_cast<std::uint64_t>(i),
                           records[static_cast<std::size_t>(i)]);
    });
    return records;
}

std::vector<EvidenceCounters> count_strong_evidence(const ReplicationSetup& setup, std::int64_t m,
                                                    std::uint64_t master_seed, int workers,
                                                    std::uint64_t stream_base) {
    if (m < 1) throw DomainError("count_strong_evidence: M must be >= 1");
    validate_setup(setup);
    const std::vector<StrongEvidenceRegion> regions = strong_regions_for(setup.suite);
    const std::size_t n_measures = setup.suite.measures.size();
    const int max_workers = std::max(workers, 1);
    std::vector<std::vector<EvidenceCounters>> local(
        static_cast<std::size_t>(max_workers), std::vector<EvidenceCounters>(n_measures));

    run_blocks(m, workers, [&](int worker, std::int64_t begin, std::int64_t end) {
        std::vector<EvidenceCounters>& mine = local[static_cast<std::size_t>(worker)];
        ReplicationRecord scratch;
        for (std::int64_t i = begin; i < end; ++i) {
            replicate_into(setup, regions, master_seed, i,
                           stream_base + static_cast<std::uint64_t>(i), scratch);
            const bool h1 = scratch.true_region == RegionLabel::theta1;
            for (std::size_t j = 0; j < n_measures; ++j) {
                EvidenceCounters& c = mine[j];
                c.replications += 1;
                if (scratch.evidence[j].in_strong_region) {
                    c.count_S += 1;
                    if (h1) c.count_S_and_H1 += 1;
                }
            }
        }
    });

    std::vector<EvidenceCounters> totals(n_measures);
    for (const auto& worker_counts : local)
        for (std::size_t j = 0; j < n_measures; ++j) totals[j].merge(worker_counts[j]);
    return totals;
}

} // namespace evidence
