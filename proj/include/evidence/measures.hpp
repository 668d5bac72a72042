#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "evidence/distributions.hpp"
#include "evidence/errors.hpp"
#include "evidence/model.hpp"
#include "evidence/normal.hpp"
#include "evidence/quadrature.hpp"

namespace evidence {

// ---------------------------------------------------------------------------
// Measure identities and calibration
// ---------------------------------------------------------------------------

enum class MeasureId { pvalue, rl, erl, bf, posterior_odds };

std::string to_string(MeasureId id);
MeasureId measure_from_string(const std::string& name);

enum class Orientation { low_is_strong, high_is_strong };

/// The calibration category S of most extreme evidence values. The threshold
/// lives on the same scale as the values handed to categorize: probability
/// scale for p-values, log scale for the ratio measures.
struct StrongEvidenceRegion {
    Orientation orientation;
    double threshold;

    /// S = [0, alpha_s), half-open at alpha_s.
    static StrongEvidenceRegion for_pvalue(double alpha_s);
    /// S = [log k_s, inf), closed at the threshold, on the log scale.
    static StrongEvidenceRegion for_log_ratio(double k_s);
};

/// Membership in S per the orientation and endpoint conventions:
/// low-is-strong is strict (value < threshold), high-is-strong is closed
/// (value >= threshold).
bool categorize(double value, const StrongEvidenceRegion& region);

struct EvidenceResult {
    MeasureId measure_id;
    double value; // log scale for rl / erl / bf / posterior_odds
    bool in_strong_region;
};

inline EvidenceResult make_evidence_result(MeasureId id, double value,
                                           const StrongEvidenceRegion& region) {
    return {id, value, categorize(value, region)};
}

/// Prior q over the parameter space as seen by the Bayes factor and the
/// posterior odds: mass q(Theta1) plus one distribution per region.
class PriorWithinRegions {
public:
    PriorWithinRegions(RegionDistribution q1, RegionDistribution q2, double q_theta1_mass)
        : q1_(std::move(q1)), q2_(std::move(q2)), q_theta1_mass_(q_theta1_mass) {
        if (!(q_theta1_mass > 0.0) || !(q_theta1_mass < 1.0))
            throw DomainError("PriorWithinRegions: q(Theta1) must lie in (0,1)");
        if (!q1_.region().disjoint_with(q2_.region()))
            throw DomainError("PriorWithinRegions: prior regions must be disjoint");
    }

    const RegionDistribution& q1() const { return q1_; }
    const RegionDistribution& q2() const { return q2_; }
    double q_theta1_mass() const { return q_theta1_mass_; }

private:
    RegionDistribution q1_;
    RegionDistribution q2_;
    double q_theta1_mass_;
};

// ---------------------------------------------------------------------------
// p-value (one-sided Gaussian mean test, reject for large T)
// ---------------------------------------------------------------------------

/// T(X1n) = sqrt(n) * (xbar - theta1).
double test_statistic(const Sample& sample, double theta1);

/// pi = sup over theta in Theta1 of Pr(T > t | theta). The tail probability
/// increases in theta, so the sup sits at the region's upper end; regions
/// unbounded above make the sup degenerate (1) and are rejected.
double p_value(const GaussianMeanModel& model, const Sample& sample,
               const ParameterRegion& theta1_region);

/// Grid-search fallback for the sup (points, then a x10 refinement around
/// the argmax). Agrees with p_value to 1e-9 on supported regions.
double p_value_grid_sup(const GaussianMeanModel& model, const Sample& sample,
                        const ParameterRegion& theta1_region, int points = 1000);

// ---------------------------------------------------------------------------
// Likelihood-ratio family (log scale throughout; exp(log r) overflows at
// the sample sizes the convergence runs use)
// ---------------------------------------------------------------------------

/// log r12 = log f(X | theta1) - log f(X | theta2).
template <Model M>
double ratio_of_likelihoods_log(const M& model, const Sample& sample, double theta1,
                                double theta2) {
    if (theta1 == theta2)
        throw DomainError("ratio_of_likelihoods_log: hypotheses must be distinct");
    return log_likelihood(model, theta1, sample) - log_likelihood(model, theta2, sample);
}

/// log r12e = sup over Theta1 of log f - sup over Theta2 of log f, suprema
/// taken over region closures via the restricted MLE.
template <Model M>
double extended_ratio_of_likelihoods_log(const M& model, const Sample& sample,
                                         const ParameterRegion& theta1_region,
                                         const ParameterRegion& theta2_region) {
    if (!theta1_region.disjoint_with(theta2_region))
        throw DomainError("extended_ratio_of_likelihoods_log: regions must be disjoint");
    const double sup1 = log_likelihood(model, restricted_mle(model, sample, theta1_region).theta_hat, sample);
    const double sup2 = log_likelihood(model, restricted_mle(model, sample, theta2_region).theta_hat, sample);
    return sup1 - sup2;
}

// ---------------------------------------------------------------------------
// Bayes factor and posterior odds
// ---------------------------------------------------------------------------

inline constexpr int kQuadratureOrder = 64;
inline constexpr double kQuadratureLogTol = 1e-8;
inline constexpr int kMaxQuadraturePanels = 512;

/// Scale in theta over which log f(x|theta) varies by O(1); sizes the
/// quadrature panels so the likelihood peak is always resolved.
inline double likelihood_theta_scale(const GaussianMeanModel& model, const Sample& sample) {
    return model.sd() / std::sqrt(static_cast<double>(sample.size()));
}

namespace detail {

inline int panel_count(double width, double scale) {
    const int raw = static_cast<int>(std::ceil(width / (6.0 * scale)));
    return std::clamp(raw, 1, kMaxQuadraturePanels);
}

/// log integral over [win.lower, win.upper] of exp(log_term(theta)) dtheta
/// by composite Gauss-Legendre, panels keyed to the likelihood scale.
template <class LogTerm>
double log_integral(const LogTerm& log_term, double lower, double upper, double scale,
                    int order) {
    const int panels = panel_count(upper - lower, scale);
    Eigen::ArrayXd terms(static_cast<Eigen::Index>(panels) * order);
    Eigen::Index k = 0;
    const double panel_width = (upper - lower) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lower + p * panel_width;
        const double b = (p + 1 == panels) ? upper : a + panel_width;
        const GaussLegendreRule rule = gauss_legendre_on(order, a, b);
        for (int i = 0; i < order; ++i, ++k)
            terms[k] = log_term(rule.nodes[i]) + std::log(rule.weights[i]);
    }
    return log_sum_exp(terms, Eigen::ArrayXd::Ones(terms.size()));
}

/// log marginal likelihood over one region: log integral of
/// f(x|theta) q(theta) dtheta, order-doubled as an error estimate.
template <Model M>
double log_marginal(const M& model, const Sample& sample, const RegionDistribution& prior) {
    if (prior.kind() == WithinKind::point)
        return log_likelihood(model, prior.region().point_value(), sample);
    const RegionDistribution::Window win = prior.quadrature_window();
    const double scale = likelihood_theta_scale(model, sample);
    const auto log_term = [&](double theta) {
        return log_likelihood(model, theta, sample) + prior.log_density(theta);
    };
    const double coarse = log_integral(log_term, win.lower, win.upper, scale, kQuadratureOrder);
    const double fine = log_integral(log_term, win.lower, win.upper, scale, 2 * kQuadratureOrder);
    if (!std::isfinite(fine))
        throw NumericalError("bayes_factor_log: marginal likelihood underflowed on region " +
                             prior.region().to_string());
    if (std::abs(coarse - fine) > kQuadratureLogTol) {
        char diag[160];
        std::snprintf(diag, sizeof(diag),
                      "order %d -> %.17g, order %d -> %.17g, window [%g, %g]",
                      kQuadratureOrder, coarse, 2 * kQuadratureOrder, fine, win.lower, win.upper);
        throw NumericalError(std::string("bayes_factor_log: order-doubling disagreement beyond "
                                         "tolerance; ") + diag);
    }
    return fine;
}

} // namespace detail

/// log b12 = log of the ratio of prior-weighted marginal likelihoods.
/// Point-mass priors reduce to the plain ratio of likelihoods.
template <Model M>
double bayes_factor_log(const M& model, const Sample& sample, const PriorWithinRegions& prior,
                        const ParameterRegion& theta1_region,
                        const ParameterRegion& theta2_region) {
    if (!(prior.q1().region() == theta1_region) || !(prior.q2().region() == theta2_region))
        throw DomainError("bayes_factor_log: prior regions must match the hypothesis regions");
    return detail::log_marginal(model, sample, prior.q1()) -
           detail::log_marginal(model, sample, prior.q2());
}

/// log p21 = log b21 + log(q(Theta2) / q(Theta1)).
double posterior_odds_log(double bf21_log, const PriorWithinRegions& prior);

// ---------------------------------------------------------------------------
// Coherence audit
// ---------------------------------------------------------------------------

/// Evidence for a nested pair of hypothesis regions, one sample at a time:
/// counts samples where the measure gives strictly more evidence to the
/// inner region than to the outer one. Evidence for a region R is measured
/// against its complement within an ambient window W (outer region padded by
/// kAuditWindowPad on both sides, uniform ambient prior): posterior log odds
/// of R vs W \ R, or the restricted-sup log ratio for the extended RL. Both
/// evidences are assembled from shared integral / sup pieces, so set
/// monotonicity survives rounding.
template <Model M>
std::int64_t coherence_audit(const M& model, MeasureId measure_id,
                             const ParameterRegion& inner, const ParameterRegion& outer,
                             const std::vector<Sample>& samples);

inline constexpr double kAuditWindowPad = 8.0;

namespace detail {

inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// log integral of the likelihood over [a, b]; -inf on empty intervals.
template <Model M>
double log_likelihood_piece(const M& model, const Sample& sample, double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    const double scale = likelihood_theta_scale(model, sample);
    const auto log_term = [&](double theta) { return log_likelihood(model, theta, sample); };
    return log_integral(log_term, a, b, scale, kQuadratureOrder);
}

/// sup of the log-likelihood over [a, b] (closure); -inf on empty intervals.
template <Model M>
double sup_loglik_piece(const M& model, const Sample& sample, double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    const double theta = std::min(std::max(sample.mean(), a), b);
    return log_likelihood(model, theta, sample);
}

} // namespace detail

template <Model M>
std::int64_t coherence_audit(const M& model, MeasureId measure_id,
                             const ParameterRegion& inner, const ParameterRegion& outer,
                             const std::vector<Sample>& samples) {
    if (measure_id == MeasureId::pvalue)
        throw UnsupportedConfiguration(
            "coherence_audit: the one-sided mean test's p-value cannot express nested "
            "region comparisons; no audit is defined for it");
    if (measure_id != MeasureId::posterior_odds && measure_id != MeasureId::erl)
        throw UnsupportedConfiguration("coherence_audit: only posterior_odds and erl audits "
                                       "are defined; got " + to_string(measure_id));
    if (inner.is_point() || outer.is_point())
        throw UnsupportedConfiguration("coherence_audit: regions must be intervals");
    if (!inner.subset_of(outer) || inner == outer)
        throw DomainError("coherence_audit: inner region must be strictly contained in outer");
    if (!outer.bounded_below() || !outer.bounded_above())
        throw UnsupportedConfiguration("coherence_audit: outer region must be bounded");

    const double w_lo = outer.lower() - kAuditWindowPad;
    const double w_hi = outer.upper() + kAuditWindowPad;

    std::int64_t violations = 0;
    for (const Sample& sample : samples) {
        double evidence_inner = 0.0;
        double evidence_outer = 0.0;
        if (measure_id == MeasureId::posterior_odds) {
            // Disjoint pieces: inner, outer \ inner, W \ outer.
            const double a = detail::log_likelihood_piece(model, sample, inner.lower(), inner.upper());
            const double b = detail::log_add(
                detail::log_likelihood_piece(model, sample, outer.lower(), inner.lower()),
                detail::log_likelihood_piece(model, sample, inner.upper(), outer.upper()));
            const double c = detail::log_add(
                detail::log_likelihood_piece(model, sample, w_lo, outer.lower()),
                detail::log_likelihood_piece(model, sample, outer.upper(), w_hi));
            evidence_inner = a - detail::log_add(b, c);
            evidence_outer = detail::log_add(a, b) - c;
        } else {
            const double s_inner = detail::sup_loglik_piece(model, sample, inner.lower(), inner.upper());
            const double gap = std::max(
                detail::sup_loglik_piece(model, sample, outer.lower(), inner.lower()),
                detail::sup_loglik_piece(model, sample, inner.upper(), outer.upper()));
            const double d_outer = std::max(
                detail::sup_loglik_piece(model, sample, w_lo, outer.lower()),
                detail::sup_loglik_piece(model, sample, outer.upper(), w_hi));
            const double s_outer = std::max(s_inner, gap);
            const double d_inner = std::max(d_outer, gap);
            evidence_inner = s_inner - d_inner;
            evidence_outer = s_outer - d_outer;
        }
        if (evidence_inner > evidence_outer) ++violations;
    }
    return violations;
}

} // namespace evidence
