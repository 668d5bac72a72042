#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string>

#include "evidence/errors.hpp"
#include "evidence/normal.hpp"
#include "evidence/random.hpp"

namespace evidence {

// ---------------------------------------------------------------------------
// Parameter regions and hypotheses
// ---------------------------------------------------------------------------

enum class RegionKind { point, interval };

/// A point set {v} or an interval with per-endpoint closure flags.
/// Infinite endpoints are allowed on intervals (necessarily open there).
class ParameterRegion {
public:
    static ParameterRegion point(double value) {
        if (!std::isfinite(value)) throw DomainError("ParameterRegion: point value must be finite");
        ParameterRegion r;
        r.kind_ = RegionKind::point;
        r.lower_ = r.upper_ = value;
        r.lower_closed_ = r.upper_closed_ = true;
        return r;
    }

    static ParameterRegion interval(double lower, double upper,
                                    bool lower_closed, bool upper_closed) {
        if (std::isnan(lower) || std::isnan(upper) || !(lower < upper))
            throw DomainError("ParameterRegion: interval requires lower < upper");
        ParameterRegion r;
        r.kind_ = RegionKind::interval;
        r.lower_ = lower;
        r.upper_ = upper;
        r.lower_closed_ = lower_closed && std::isfinite(lower);
        r.upper_closed_ = upper_closed && std::isfinite(upper);
        return r;
    }

    RegionKind kind() const { return kind_; }
    bool is_point() const { return kind_ == RegionKind::point; }
    double point_value() const {
        if (!is_point()) throw DomainError("ParameterRegion: not a point region");
        return lower_;
    }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool lower_closed() const { return lower_closed_; }
    bool upper_closed() const { return upper_closed_; }
    bool bounded_above() const { return std::isfinite(upper_); }
    bool bounded_below() const { return std::isfinite(lower_); }

    bool contains(double theta) const {
        if (is_point()) return theta == lower_;
        const bool above_lower = lower_closed_ ? theta >= lower_ : theta > lower_;
        const bool below_upper = upper_closed_ ? theta <= upper_ : theta < upper_;
        return above_lower && below_upper;
    }

    /// theta projected onto the closure of the region.
    double clamp(double theta) const {
        if (is_point()) return lower_;
        return std::min(std::max(theta, lower_), upper_);
    }

    bool disjoint_with(const ParameterRegion& other) const {
        const ParameterRegion& a = lower_ <= other.lower_ ? *this : other;
        const ParameterRegion& b = lower_ <= other.lower_ ? other : *this;
        if (a.upper_ < b.lower_) return true;
        if (a.upper_ > b.lower_) return false;
        // Touching endpoints overlap only when both sides are closed there.
        return !(a.upper_closed_ && b.lower_closed_);
    }

    /// True when this region is a subset of other (closure flags honored).
    bool subset_of(const ParameterRegion& other) const {
        if (other.is_point()) return is_point() && lower_ == other.lower_;
        const bool low_ok = lower_ > other.lower_ ||
                            (lower_ == other.lower_ && (other.lower_closed_ || !effective_lower_closed()));
        const bool high_ok = upper_ < other.upper_ ||
                             (upper_ == other.upper_ && (other.upper_closed_ || !effective_upper_closed()));
        return low_ok && high_ok;
    }

    std::string to_string() const;

    friend bool operator==(const ParameterRegion& a, const ParameterRegion& b) {
        return a.kind_ == b.kind_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
               a.lower_closed_ == b.lower_closed_ && a.upper_closed_ == b.upper_closed_;
    }

private:
    ParameterRegion() = default;
    bool effective_lower_closed() const { return is_point() || lower_closed_; }
    bool effective_upper_closed() const { return is_point() || upper_closed_; }

    RegionKind kind_ = RegionKind::point;
    double lower_ = 0.0;
    double upper_ = 0.0;
    bool lower_closed_ = true;
    bool upper_closed_ = true;
};

/// The partition pieces backing H1 and H2. Regions must be disjoint;
/// point/point pairs must be distinct.
struct HypothesisPair {
    ParameterRegion theta1;
    ParameterRegion theta2;

    HypothesisPair(ParameterRegion t1, ParameterRegion t2)
        : theta1(std::move(t1)), theta2(std::move(t2)) {
        if (!theta1.disjoint_with(theta2))
            throw DomainError("HypothesisPair: regions must be disjoint");
        if (theta1.is_point() && theta2.is_point() &&
            theta1.point_value() == theta2.point_value())
            throw DomainError("HypothesisPair: point hypotheses must differ");
    }
};

// ---------------------------------------------------------------------------
// Gaussian mean model
// ---------------------------------------------------------------------------

/// N(theta, variance) observations, univariate, variance fixed and known.
class GaussianMeanModel {
public:
    explicit GaussianMeanModel(double variance = 1.0) : variance_(variance) {
        if (!(variance > 0.0) || !std::isfinite(variance))
            throw DomainError("GaussianMeanModel: variance must be positive and finite");
    }

    double variance() const { return variance_; }
    double sd() const { return std::sqrt(variance_); }
    static constexpr int sample_space_dim() { return 1; }

private:
    double variance_;
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

/// An i.i.d. sample, held as cached sufficient statistics (n, mean, sum of
/// squares) plus, on the full simulation path, the raw observations.
/// The sufficient-statistic fast path stores the representative sample with
/// every observation equal to the drawn mean, so n * mean^2 is its exact
/// sum of squares and every statistic of (n, mean) is unchanged.
class Sample {
public:
    static Sample from_observations(Eigen::ArrayXd observations) {
        if (observations.size() == 0) throw DomainError("Sample: needs at least one observation");
        Sample s;
        s.n_ = observations.size();
        s.mean_ = observations.mean();
        s.sum_sq_ = observations.square().sum();
        s.observations_ = std::move(observations);
        s.has_observations_ = true;
        return s;
    }

    static Sample from_mean(std::int64_t n, double mean) {
        if (n < 1) throw DomainError("Sample: needs at least one observation");
        Sample s;
        s.n_ = n;
        s.mean_ = mean;
        s.sum_sq_ = static_cast<double>(n) * mean * mean;
        s.has_observations_ = false;
        return s;
    }

    std::int64_t size() const { return n_; }
    double mean() const { return mean_; }
    double sum_sq() const { return sum_sq_; }
    bool has_observations() const { return has_observations_; }
    const Eigen::ArrayXd& observations() const {
        if (!has_observations_)
            throw DomainError("Sample: observations were not materialized (sufficient-statistic path)");
        return observations_;
    }

private:
    Sample() = default;
    Eigen::ArrayXd observations_;
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double sum_sq_ = 0.0;
    bool has_observations_ = false;
};

// ---------------------------------------------------------------------------
// Model operations (this free-function surface is the model interface;
// a second model plugs in by providing the same overload set)
// ---------------------------------------------------------------------------

inline Sample simulate_sample(const GaussianMeanModel& model, double theta,
                              std::int64_t n, RandomStream& stream) {
    if (n < 1) throw DomainError("simulate_sample: n must be >= 1");
    Eigen::ArrayXd x(n);
    const double sd = model.sd();
    for (std::int64_t i = 0; i < n; ++i) {
        x[i] = theta + sd * sample_standard_normal(stream);
    }
    return Sample::from_observations(std::move(x));
}

/// Fast path: xbar ~ N(theta, variance / n) in one draw.
inline Sample simulate_sufficient_stat(const GaussianMeanModel& model, double theta,
                                       std::int64_t n, RandomStream& stream) {
    if (n < 1) throw DomainError("simulate_sufficient_stat: n must be >= 1");
    const double xbar =
        theta + model.sd() / std::sqrt(static_cast<double>(n)) * sample_standard_normal(stream);
    return Sample::from_mean(n, xbar);
}

/// Sum of per-observation log densities, computed from (n, mean, sum_sq).
inline double log_likelihood(const GaussianMeanModel& model, double theta, const Sample& sample) {
    const double n = static_cast<double>(sample.size());
    const double v = model.variance();
    const double quad = sample.sum_sq() - 2.0 * theta * n * sample.mean() + n * theta * theta;
    return -0.5 * n * (kLogTwoPi + std::log(v)) - quad / (2.0 * v);
}

struct RestrictedMle {
    double theta_hat;
    /// False when the supremum sits on an open endpoint: the value is then
    /// the supremum over the closure, not an attained maximum.
    bool attained;
};

/// Maximizer of the likelihood over a region. The Gaussian mean
/// log-likelihood is concave in theta with unrestricted maximizer xbar, so
/// the restricted maximizer is the projection of xbar onto the region.
inline RestrictedMle restricted_mle(const GaussianMeanModel& /*model*/, const Sample& sample,
                                    const ParameterRegion& region) {
    if (region.is_point()) return {region.point_value(), true};
    const double xbar = sample.mean();
    const double theta_hat = region.clamp(xbar);
    const bool attained = region.contains(theta_hat);
    return {theta_hat, attained};
}

/// The surface the measures build on.
template <class M>
concept Model = requires(const M& m, double theta, const Sample& s, const ParameterRegion& r,
                         RandomStream& stream, std::int64_t n) {
    { log_likelihood(m, theta, s) } -> std::convertible_to<double>;
    { simulate_sample(m, theta, n, stream) } -> std::convertible_to<Sample>;
    { simulate_sufficient_stat(m, theta, n, stream) } -> std::convertible_to<Sample>;
    { restricted_mle(m, s, r) } -> std::convertible_to<RestrictedMle>;
};

} // namespace evidence
