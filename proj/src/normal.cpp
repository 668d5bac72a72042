#include "evidence/normal.hpp"

namespace evidence {

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");

    // Every representable p in (0,1) has its quantile inside (-42, 42).
    double lo = -42.0, hi = 42.0;
    for (int i = 0; i < 48; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std_normal_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double z = 0.5 * (lo + hi);

    // Newton polish; skipped in the extreme tail where the density underflows.
    const double pdf = std_normal_pdf(z);
    if (pdf > 0.0) {
        z -= (std_normal_cdf(z) - p) / pdf;
    }
    return z;
}

} // namespace evidence
