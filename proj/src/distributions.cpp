#include "evidence/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "evidence/normal.hpp"

namespace evidence {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double cdf_ext(double z) {
    if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
    return std_normal_cdf(z);
}

// Pr(za < Z < zb), evaluated in whichever tail keeps the subtraction stable.
double mass_between(double za, double zb) {
    if (za > 0.0) return cdf_ext(-za) - cdf_ext(-zb);
    return cdf_ext(zb) - cdf_ext(za);
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RegionDistribution RegionDistribution::point_mass(const ParameterRegion& region) {
    if (!region.is_point())
        throw DomainError("RegionDistribution: point_mass requires a point region");
    return RegionDistribution(WithinKind::point, region, region.point_value(), 0.0, 0.0, 0.0, 1.0);
}

RegionDistribution RegionDistribution::uniform(const ParameterRegion& region) {
    if (region.is_point())
        throw DomainError("RegionDistribution: uniform requires an interval region");
    if (!region.bounded_below() || !region.bounded_above())
        throw DomainError("RegionDistribution: uniform requires a bounded region");
    const double log_norm = std::log(region.upper() - region.lower());
    return RegionDistribution(WithinKind::uniform, region, 0.0, 0.0, log_norm, 0.0, 1.0);
}

RegionDistribution RegionDistribution::truncated_gaussian(const ParameterRegion& region,
                                                          double center, double sd) {
    if (region.is_point())
        throw DomainError("RegionDistribution: truncated_gaussian requires an interval region");
    if (!std::isfinite(center)) throw DomainError("RegionDistribution: center must be finite");
    if (!(sd > 0.0) || !std::isfinite(sd))
        throw DomainError("RegionDistribution: sd must be positive and finite");
    const double za = (region.lower() - center) / sd;
    const double zb = (region.upper() - center) / sd;
    const double mass = mass_between(za, zb);
    if (!(mass > 0.0))
        throw NumericalError("RegionDistribution: truncated Gaussian mass underflows on " +
                             region.to_string());
    const double log_norm = std::log(sd) + std::log(mass);
    return RegionDistribution(WithinKind::truncated_gaussian, region, center, sd, log_norm,
                              cdf_ext(za), cdf_ext(zb));
}

double RegionDistribution::log_density(double theta) const {
    if (!region_.contains(theta)) return kNegInf;
    switch (kind_) {
        case WithinKind::point:
            return 0.0;
        case WithinKind::uniform:
            return -log_norm_;
        case WithinKind::truncated_gaussian: {
            const double z = (theta - center_) / sd_;
            return -0.5 * (kLogTwoPi + z * z) - log_norm_;
        }
    }
    throw DomainError("RegionDistribution: unknown kind");
}

double RegionDistribution::sample(RandomStream& stream) const {
    switch (kind_) {
        case WithinKind::point:
            return region_.point_value();
        case WithinKind::uniform: {
            const double u = stream.uniform01();
            return region_.lower() + u * (region_.upper() - region_.lower());
        }
        case WithinKind::truncated_gaussian: {
            // Inverse CDF: map u through the Gaussian restricted to the region.
            const double u = stream.uniform01();
            const double p = cdf_lo_ + u * (cdf_hi_ - cdf_lo_);
            const double theta = center_ + sd_ * std_normal_quantile(p);
            return region_.clamp(theta);
        }
    }
    throw DomainError("RegionDistribution: unknown kind");
}

RegionDistribution::Window RegionDistribution::quadrature_window() const {
    switch (kind_) {
        case WithinKind::point:
            throw DomainError("RegionDistribution: point masses have no quadrature window");
        case WithinKind::uniform:
            return {region_.lower(), region_.upper(), 0.0};
        case WithinKind::truncated_gaussian: {
            const double lo = std::max(region_.lower(), center_ - kQuadratureWindowSds * sd_);
            const double hi = std::min(region_.upper(), center_ + kQuadratureWindowSds * sd_);
            if (!(lo < hi))
                throw NumericalError(
                    "RegionDistribution: quadrature window empty; region lies beyond " +
                    format_value(kQuadratureWindowSds) + " prior sds");
            const double za = (region_.lower() - center_) / sd_;
            const double zb = (region_.upper() - center_) / sd_;
            const double zlo = (lo - center_) / sd_;
            const double zhi = (hi - center_) / sd_;
            const double total = mass_between(za, zb);
            const double kept = mass_between(zlo, zhi);
            const double outside = std::max(0.0, (total - kept) / total);
            return {lo, hi, outside};
        }
    }
    throw DomainError("RegionDistribution: unknown kind");
}

std::string RegionDistribution::to_string() const {
    switch (kind_) {
        case WithinKind::point:
            return "point(" + format_value(region_.point_value()) + ")";
        case WithinKind::uniform:
            return "uniform()";
        case WithinKind::truncated_gaussian:
            return "trunc_gaussian(" + format_value(center_) + ", " + format_value(sd_) + ")";
    }
    throw DomainError("RegionDistribution: unknown kind");
}

} // namespace evidence
