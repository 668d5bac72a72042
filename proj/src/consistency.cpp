#include "evidence/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evidence/normal.hpp"

namespace evidence {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kStreamBlockShift = 40;
} // namespace

ConsistencyEstimate make_consistency_estimate(MeasureId id, std::int64_t n, std::int64_t m,
                                              std::int64_t count_S, std::int64_t count_S_and_H1) {
    if (n < 1) throw DomainError("ConsistencyEstimate: n must be >= 1");
    if (!(0 <= count_S_and_H1 && count_S_and_H1 <= count_S && count_S <= m))
        throw DomainError("ConsistencyEstimate: counts must satisfy 0 <= S&H1 <= S <= M");
    ConsistencyEstimate est;
    est.measure_id = id;
    est.n = n;
    est.replications = m;
    est.count_S = count_S;
    est.count_S_and_H1 = count_S_and_H1;
    est.defined = count_S > 0;
    if (est.defined) {
        const double p = static_cast<double>(count_S_and_H1) / static_cast<double>(count_S);
        est.estimate = p;
        est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(count_S));
    } else {
        est.estimate = kNaN;
        est.std_error = kNaN;
    }
    return est;
}

ConsistencyEstimate estimate_conditional_prob(const std::vector<ReplicationRecord>& records,
                                              MeasureId measure_id) {
    if (records.empty()) throw DomainError("estimate_conditional_prob: no records");
    const std::int64_t n = records.front().n;
    std::int64_t count_S = 0;
    std::int64_t count_S_and_H1 = 0;
    for (const ReplicationRecord& rec : records) {
        if (rec.n != n)
            throw DomainError("estimate_conditional_prob: records mix sample sizes");
        const EvidenceResult* found = nullptr;
        for (const EvidenceResult& ev : rec.evidence)
            if (ev.measure_id == measure_id) {
                found = &ev;
                break;
            }
        if (found == nullptr)
            throw DomainError("estimate_conditional_prob: records lack measure " +
                              to_string(measure_id));
        if (found->in_strong_region) {
            ++count_S;
            if (rec.true_region == RegionLabel::theta1) ++count_S_and_H1;
        }
    }
    return make_consistency_estimate(measure_id, n,
                                     static_cast<std::int64_t>(records.size()), count_S,
                                     count_S_and_H1);
}

double pvalue_limit(double alpha_s, double w) {
    if (!(alpha_s > 0.0) || !(alpha_s < 1.0))
        throw DomainError("pvalue_limit: alpha_S must lie in (0,1)");
    if (!(w >= 0.0) || !(w <= 1.0)) throw DomainError("pvalue_limit: w must lie in [0,1]");
    return alpha_s * w / (1.0 - w * (1.0 - alpha_s));
}

double gaussian_pvalue_strong_prob(RegionLabel region, std::int64_t n, double delta,
                                   double alpha_s) {
    if (!(delta > 0.0)) throw DomainError("gaussian_pvalue_strong_prob: delta must be > 0");
    if (!(alpha_s > 0.0) || !(alpha_s < 1.0))
        throw DomainError("gaussian_pvalue_strong_prob: alpha_S must lie in (0,1)");
    if (n < 1) throw DomainError("gaussian_pvalue_strong_prob: n must be >= 1");
    if (region == RegionLabel::theta1) return alpha_s;
    const double z_crit = std_normal_quantile(1.0 - alpha_s);
    return std_normal_cdf(std::sqrt(static_cast<double>(n)) * delta - z_crit);
}

namespace {

double rl_strong_prob_at(double log_k, std::int64_t n, double delta, double sign_half) {
    const double root_n = std::sqrt(static_cast<double>(n));
    const double z = log_k / (delta * root_n) + sign_half * root_n * delta / 2.0;
    return std_normal_cdf(-z);
}

} // namespace

double gaussian_rl_strong_prob(RegionLabel region, std::int64_t n, double delta, double k_s) {
    if (!(delta > 0.0)) throw DomainError("gaussian_rl_strong_prob: delta must be > 0");
    if (!(k_s > 1.0)) throw DomainError("gaussian_rl_strong_prob: k_S must exceed 1");
    if (n < 1) throw DomainError("gaussian_rl_strong_prob: n must be >= 1");
    const double sign_half = region == RegionLabel::theta1 ? 1.0 : -1.0;
    return rl_strong_prob_at(std::log(k_s), n, delta, sign_half);
}

double exact_conditional_prob(double strong_prob_h1, double strong_prob_h2, double w) {
    if (!(w > 0.0) || !(w < 1.0)) throw DomainError("exact_conditional_prob: w must lie in (0,1)");
    if (!(strong_prob_h1 >= 0.0) || !(strong_prob_h1 <= 1.0) || !(strong_prob_h2 >= 0.0) ||
        !(strong_prob_h2 <= 1.0))
        throw DomainError("exact_conditional_prob: probabilities must lie in [0,1]");
    const double numer = w * strong_prob_h1;
    const double denom = numer + (1.0 - w) * strong_prob_h2;
    if (denom == 0.0)
        throw NumericalError(
            "exact_conditional_prob: both strong-evidence probabilities are zero; "
            "the conditional is undefined");
    return numer / denom;
}

std::uint64_t curve_stream_base(std::size_t n_index) {
    return static_cast<std::uint64_t>(n_index) << kStreamBlockShift;
}

std::optional<double> closed_form_oracle(const ReplicationSetup& setup, MeasureId measure_id,
                                         std::int64_t n) {
    const HypothesisPair& hyp = setup.hypotheses;
    if (!hyp.theta1.is_point() || !hyp.theta2.is_point()) return std::nullopt;
    if (setup.prior.within1().kind() != WithinKind::point ||
        setup.prior.within2().kind() != WithinKind::point)
        return std::nullopt;
    const double theta1 = hyp.theta1.point_value();
    const double theta2 = hyp.theta2.point_value();
    const double delta = (theta2 - theta1) / setup.model.sd();
    if (!(delta > 0.0)) return std::nullopt;
    const double w = setup.prior.w();
    const MeasureSuite& suite = setup.suite;

    switch (measure_id) {
        case MeasureId::pvalue:
            return exact_conditional_prob(
                suite.alpha_s, gaussian_pvalue_strong_prob(RegionLabel::theta2, n, delta, suite.alpha_s),
                w);
        case MeasureId::rl:
        case MeasureId::erl: // identical to rl on point regions
            return exact_conditional_prob(
                gaussian_rl_strong_prob(RegionLabel::theta1, n, delta, suite.k_s),
                gaussian_rl_strong_prob(RegionLabel::theta2, n, delta, suite.k_s), w);
        case MeasureId::bf: {
            // b21 with point priors is exactly r21, thresholded at bf_threshold.
            return exact_conditional_prob(
                gaussian_rl_strong_prob(RegionLabel::theta1, n, delta, suite.bf_threshold),
                gaussian_rl_strong_prob(RegionLabel::theta2, n, delta, suite.bf_threshold), w);
        }
        case MeasureId::posterior_odds: {
            if (!setup.evidence_prior.has_value()) return std::nullopt;
            // log p21 >= log T  <=>  log b21 >= log(T q1 / (1 - q1)).
            const double q1 = setup.evidence_prior->q_theta1_mass();
            const double log_k_eff = std::log(suite.bf_threshold) + std::log(q1) - std::log1p(-q1);
            return exact_conditional_prob(rl_strong_prob_at(log_k_eff, n, delta, 1.0),
                                          rl_strong_prob_at(log_k_eff, n, delta, -1.0), w);
        }
    }
    return std::nullopt;
}

std::vector<ConvergenceCurve> build_convergence_curves(const ReplicationSetup& base,
                                                       const CurveGrid& grid,
                                                       std::uint64_t master_seed, int workers) {
    if (grid.n_grid.empty()) throw DomainError("build_convergence_curves: empty n grid");
    for (std::size_t i = 1; i < grid.n_grid.size(); ++i)
        if (!(grid.n_grid[i - 1] < grid.n_grid[i]))
            throw DomainError("build_convergence_curves: n grid must be strictly increasing");
    if (grid.replications_per_n < 1)
        throw DomainError("build_convergence_curves: M must be >= 1");
    if (static_cast<std::uint64_t>(grid.replications_per_n) > (std::uint64_t{1} << kStreamBlockShift))
        throw DomainError("build_convergence_curves: M exceeds the per-n stream block");

    std::vector<ConvergenceCurve> curves(base.suite.measures.size());
    for (std::size_t j = 0; j < curves.size(); ++j) curves[j].measure_id = base.suite.measures[j];

    for (std::size_t idx = 0; idx < grid.n_grid.size(); ++idx) {
        ReplicationSetup setup = base;
        setup.n = grid.n_grid[idx];
        const std::vector<EvidenceCounters> counts = count_strong_evidence(
            setup, grid.replications_per_n, master_seed, workers, curve_stream_base(idx));
        for (std::size_t j = 0; j < curves.size(); ++j) {
            ConvergenceRow row;
            row.n = setup.n;
            row.estimate =
                make_consistency_estimate(curves[j].measure_id, setup.n, counts[j].replications,
                                          counts[j].count_S, counts[j].count_S_and_H1);
            row.oracle = closed_form_oracle(setup, curves[j].measure_id, setup.n);
            curves[j].rows.push_back(row);
        }
    }
    return curves;
}

ConvergenceCurve build_convergence_curve(const ReplicationSetup& base, MeasureId measure_id,
                                         const CurveGrid& grid, std::uint64_t master_seed,
                                         int workers) {
    ReplicationSetup setup = base;
    setup.suite.measures = {measure_id};
    return build_convergence_curves(setup, grid, master_seed, workers).front();
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent_with_limit: return "consistent-with-limit";
        case Verdict::inconsistent_with_limit: return "inconsistent-with-limit";
        case Verdict::inconclusive: return "inconclusive";
    }
    throw DomainError("to_string: unknown Verdict");
}

Verdict verdict(const ConvergenceCurve& curve, double oracle_limit,
                const TolerancePolicy& policy) {
    if (curve.rows.empty()) throw DomainError("verdict: empty curve");
    const ConsistencyEstimate& last = curve.rows.back().estimate;
    if (!last.defined) return Verdict::inconclusive;

    const double final_tol = std::max(policy.se_multiplier * last.std_error, policy.abs_slack);
    if (!(std::abs(last.estimate - oracle_limit) <= final_tol))
        return Verdict::inconsistent_with_limit;

    // Trend: within its band plus the predecessor's, no defined estimate may
    // sit farther from the limit than the defined estimate before it.
    const ConsistencyEstimate* prev = nullptr;
    for (const ConvergenceRow& row : curve.rows) {
        if (!row.estimate.defined) continue;
        if (prev != nullptr) {
            const double allowed =
                std::abs(prev->estimate - oracle_limit) +
                policy.se_multiplier * (prev->std_error + row.estimate.std_error) +
                policy.abs_slack;
            if (std::abs(row.estimate.estimate - oracle_limit) > allowed)
                return Verdict::inconsistent_with_limit;
        }
        prev = &row.estimate;
    }
    return Verdict::consistent_with_limit;
}

} // namespace evidence
