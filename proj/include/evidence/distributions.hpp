#pragma once

#include <cstdint>
#include <string>

#include "evidence/errors.hpp"
#include "evidence/model.hpp"
#include "evidence/random.hpp"

namespace evidence {

enum class WithinKind { point, uniform, truncated_gaussian };

/// A probability distribution supported on one parameter region: the
/// within-region component of the two-level prior, and the prior weight
/// density used by the Bayes factor marginals.
class RegionDistribution {
public:
    /// Point mass at the region's single value (point regions only).
    static RegionDistribution point_mass(const ParameterRegion& region);

    /// Uniform over a bounded interval region.
    static RegionDistribution uniform(const ParameterRegion& region);

    /// N(center, sd^2) conditioned on the region; the region may be
    /// unbounded on either side.
    static RegionDistribution truncated_gaussian(const ParameterRegion& region,
                                                 double center, double sd);

    WithinKind kind() const { return kind_; }
    const ParameterRegion& region() const { return region_; }
    double center() const { return center_; }
    double sd() const { return sd_; }

    /// Log density w.r.t. Lebesgue measure on the region (point mass: log 1
    /// at the atom). -inf outside the region.
    double log_density(double theta) const;

    double sample(RandomStream& stream) const;

    /// Finite interval carrying all but `mass_outside` of the distribution,
    /// for quadrature over unbounded or heavy-tailed regions. Not defined
    /// for point masses.
    struct Window {
        double lower;
        double upper;
        double mass_outside;
    };
    Window quadrature_window() const;

    std::string to_string() const;

private:
    RegionDistribution(WithinKind kind, ParameterRegion region, double center, double sd,
                       double log_norm, double cdf_lo, double cdf_hi)
        : kind_(kind), region_(std::move(region)), center_(center), sd_(sd),
          log_norm_(log_norm), cdf_lo_(cdf_lo), cdf_hi_(cdf_hi) {}

    WithinKind kind_;
    ParameterRegion region_;
    double center_ = 0.0;      // truncated_gaussian only
    double sd_ = 1.0;          // truncated_gaussian only
    double log_norm_ = 0.0;    // log of the density normalizer
    double cdf_lo_ = 0.0;      // Phi at standardized endpoints, cached
    double cdf_hi_ = 1.0;
};

/// Number of standard deviations kept by truncated-Gaussian quadrature
/// windows; the discarded tail mass is below 1.3e-15 of the total.
inline constexpr double kQuadratureWindowSds = 8.0;

} // namespace evidence
