#include "evidence/measures.hpp"

#include <cmath>

namespace evidence {

std::string to_string(MeasureId id) {
    switch (id) {
        case MeasureId::pvalue: return "pvalue";
        case MeasureId::rl: return "rl";
        case MeasureId::erl: return "erl";
        case MeasureId::bf: return "bf";
        case MeasureId::posterior_odds: return "posterior_odds";
    }
    throw DomainError("to_string: unknown MeasureId");
}

MeasureId measure_from_string(const std::string& name) {
    if (name == "pvalue") return MeasureId::pvalue;
    if (name == "rl") return MeasureId::rl;
    if (name == "erl") return MeasureId::erl;
    if (name == "bf") return MeasureId::bf;
    if (name == "posterior_odds") return MeasureId::posterior_odds;
    throw DomainError("measure_from_string: unknown measure '" + name + "'");
}

StrongEvidenceRegion StrongEvidenceRegion::for_pvalue(double alpha_s) {
    if (!(alpha_s > 0.0) || !(alpha_s < 1.0))
        throw DomainError("StrongEvidenceRegion: alpha_S must lie in (0,1)");
    return {Orientation::low_is_strong, alpha_s};
}

StrongEvidenceRegion StrongEvidenceRegion::for_log_ratio(double k_s) {
    if (!(k_s > 1.0))
        throw DomainError("StrongEvidenceRegion: k_S must exceed 1");
    return {Orientation::high_is_strong, std::log(k_s)};
}

bool categorize(double value, const StrongEvidenceRegion& region) {
    if (region.orientation == Orientation::low_is_strong) return value < region.threshold;
    return value >= region.threshold;
}

double test_statistic(const Sample& sample, double theta1) {
    return std::sqrt(static_cast<double>(sample.size())) * (sample.mean() - theta1);
}

namespace {

// Pr(T > t | theta) for the one-sided mean test: Phi(sqrt(n)(theta - xbar)/sd),
// written as the lower tail so small p-values keep full relative accuracy.
double tail_prob(const GaussianMeanModel& model, const Sample& sample, double theta) {
    const double root_n = std::sqrt(static_cast<double>(sample.size()));
    return std_normal_cdf(root_n * (theta - sample.mean()) / model.sd());
}

} // namespace

double p_value(const GaussianMeanModel& model, const Sample& sample,
               const ParameterRegion& theta1_region) {
    if (theta1_region.is_point()) return tail_prob(model, sample, theta1_region.point_value());
    if (!theta1_region.bounded_above())
        throw UnsupportedConfiguration(
            "p_value: theta1 region unbounded above makes the sup degenerate (1)");
    return tail_prob(model, sample, theta1_region.upper());
}

double p_value_grid_sup(const GaussianMeanModel& model, const Sample& sample,
                        const ParameterRegion& theta1_region, int points) {
    if (points < 3) throw DomainError("p_value_grid_sup: needs at least 3 grid points");
    if (theta1_region.is_point())
        return tail_prob(model, sample, theta1_region.point_value());
    if (!theta1_region.bounded_above())
        throw UnsupportedConfiguration(
            "p_value_grid_sup: theta1 region unbounded above makes the sup degenerate (1)");

    const double hi = theta1_region.upper();
    // Unbounded-below regions are clipped far into the no-contribution tail.
    const double clip = 40.0 * likelihood_theta_scale(model, sample);
    const double lo = theta1_region.bounded_below()
                          ? theta1_region.lower()
                          : std::min(hi, sample.mean()) - clip;

    const auto scan = [&](double a, double b, int count, int& argmax) {
        double best = -1.0;
        argmax = 0;
        for (int i = 0; i < count; ++i) {
            const double theta = (i == count - 1) ? b : a + (b - a) * i / (count - 1);
            const double p = tail_prob(model, sample, theta);
            if (p > best) {
                best = p;
                argmax = i;
            }
        }
        return best;
    };

    int argmax = 0;
    const double coarse = scan(lo, hi, points, argmax);
    const double step = (hi - lo) / (points - 1);
    const double refined_lo = std::max(lo, lo + (argmax - 1) * step);
    const double refined_hi = std::min(hi, lo + (argmax + 1) * step);
    int refined_argmax = 0;
    const double fine = scan(refined_lo, refined_hi, 21, refined_argmax);
    return std::max(coarse, fine);
}

double posterior_odds_log(double bf21_log, const PriorWithinRegions& prior) {
    const double q1 = prior.q_theta1_mass();
    if (!(q1 > 0.0) || !(q1 < 1.0))
        throw DomainError("posterior_odds_log: q(Theta1) must lie in (0,1)");
    return bf21_log + std::log1p(-q1) - std::log(q1);
}

} // namespace evidence
