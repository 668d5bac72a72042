#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evidence/errors.hpp"
#include "evidence/measures.hpp"
#include "evidence/sampler.hpp"

namespace evidence {

// ---------------------------------------------------------------------------
// Conditional-probability estimates
// ---------------------------------------------------------------------------

/// Estimate of Pr(H1 | evidence in S) at one sample size: conditional
/// relative frequency over the replications, with the binomial standard
/// error of the conditioned count. Undefined (NaN fields, defined=false)
/// when no replication produced strong evidence.
struct ConsistencyEstimate {
    MeasureId measure_id = MeasureId::pvalue;
    std::int64_t n = 0;
    std::int64_t replications = 0; // M
    std::int64_t count_S = 0;
    std::int64_t count_S_and_H1 = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    bool defined = false;
};

ConsistencyEstimate make_consistency_estimate(MeasureId id, std::int64_t n, std::int64_t m,
                                              std::int64_t count_S, std::int64_t count_S_and_H1);

/// Folds a record batch (one shared n) into the estimate for one measure.
ConsistencyEstimate estimate_conditional_prob(const std::vector<ReplicationRecord>& records,
                                              MeasureId measure_id);

// ---------------------------------------------------------------------------
// Closed forms for the Gaussian point/point experiment
// ---------------------------------------------------------------------------

/// Limit of Pr(H1 | pi in S) as n grows: alpha_S * w / (1 - w (1 - alpha_S)).
double pvalue_limit(double alpha_s, double w);

/// Pr(pi in S | region) at finite n: alpha_S under Theta1 (the p-value is
/// uniform there); the test's power 1 - Phi(z_{1-alpha_S} - sqrt(n) delta)
/// under Theta2. delta is the standardized separation (theta2 - theta1) / sd.
double gaussian_pvalue_strong_prob(RegionLabel region, std::int64_t n, double delta,
                                   double alpha_s);

/// Pr(log r21 in S | region) at finite n:
/// 1 - Phi(ln k_S / (delta sqrt(n)) + sqrt(n) delta / 2) under Theta1 and
/// the -sqrt(n) delta / 2 analogue under Theta2.
double gaussian_rl_strong_prob(RegionLabel region, std::int64_t n, double delta, double k_s);

/// Bayes combination w p1 / (w p1 + (1 - w) p2) of per-region strong-evidence
/// probabilities. Both probabilities zero leaves the conditional undefined.
double exact_conditional_prob(double strong_prob_h1, double strong_prob_h2, double w);

// ---------------------------------------------------------------------------
// Convergence curves
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    std::int64_t n = 0;
    ConsistencyEstimate estimate;
    std::optional<double> oracle;
};

struct ConvergenceCurve {
    MeasureId measure_id = MeasureId::pvalue;
    std::vector<ConvergenceRow> rows; // strictly increasing n
};

struct CurveGrid {
    std::vector<std::int64_t> n_grid;
    std::int64_t replications_per_n = 1;
};

/// Stream ids for the batch at n_grid[n_index] start here; 2^40 ids per n
/// keep per-n batches disjoint and reproducible for any M up to 2^40.
std::uint64_t curve_stream_base(std::size_t n_index);

/// Finite-n oracle for the estimate, when the configuration has one: point
/// hypotheses with point within-distributions at the hypothesis values and
/// theta2 > theta1. Empty otherwise.
std::optional<double> closed_form_oracle(const ReplicationSetup& setup, MeasureId measure_id,
                                         std::int64_t n);

/// One curve per configured measure, all folded from the same replication
/// sweep; per-n batches use disjoint stream-id ranges.
std::vector<ConvergenceCurve> build_convergence_curves(const ReplicationSetup& base,
                                                       const CurveGrid& grid,
                                                       std::uint64_t master_seed, int workers = 1);

/// Single-measure convenience wrapper over build_convergence_curves.
ConvergenceCurve build_convergence_curve(const ReplicationSetup& base, MeasureId measure_id,
                                         const CurveGrid& grid, std::uint64_t master_seed,
                                         int workers = 1);

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Verdict { consistent_with_limit, inconsistent_with_limit, inconclusive };

std::string to_string(Verdict v);

struct TolerancePolicy {
    double se_multiplier = 3.0;
    double abs_slack = 0.0;
};

/// consistent_with_limit iff the largest-n estimate lies within
/// max(se_multiplier * SE, abs_slack) of the limit and no defined estimate
/// moves away from the limit beyond the combined bands of its predecessor.
/// Undefined largest-n estimate: inconclusive.
Verdict verdict(const ConvergenceCurve& curve, double oracle_limit,
                const TolerancePolicy& policy);

} // namespace evidence
