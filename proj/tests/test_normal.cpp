#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "evidence/normal.hpp"
#include "evidence/random.hpp"

namespace {

// Independent check for the normal CDF: Taylor series for erf on the core,
// Lentz continued fraction for erfc in the tail. Shares no code with the
// library implementation.
double oracle_erfc_positive(double x) {
    if (x <= 1.5) {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        double term = x;
        double sum = x;
        for (int n = 1; n < 200; ++n) {
            term *= -x * x / n;
            const double contrib = term / (2 * n + 1);
            sum += contrib;
            if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
        }
        return 1.0 - 2.0 / std::sqrt(std::numbers::pi) * sum;
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const double tiny = 1e-300;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int j = 1; j < 400; ++j) {
        const double a = (j == 1) ? 1.0 : (j - 1) / 2.0;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) / std::sqrt(std::numbers::pi) * f;
}

double oracle_cdf(double z) {
    const double x = -z / std::numbers::sqrt2;
    if (x >= 0.0) return 0.5 * oracle_erfc_positive(x);
    return 0.5 * (2.0 - oracle_erfc_positive(-x));
}

} // namespace

TEST_CASE("std_normal_cdf matches an independent series/continued-fraction oracle") {
    for (double z = -8.0; z <= 8.0 + 1e-9; z += 0.25) {
        const double got = evidence::std_normal_cdf(z);
        const double want = oracle_cdf(z);
        const double scale = std::min(want, 1.0 - want);
        CHECK(std::abs(got - want) <= 1e-12 * std::max(scale, 1e-300));
    }
}

TEST_CASE("std_normal_cdf frozen values") {
    CHECK(evidence::std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(evidence::std_normal_cdf(2.0) == doctest::Approx(0.97724986805182079).epsilon(1e-14));
    CHECK(evidence::std_normal_cdf(-2.0) == doctest::Approx(0.022750131948179207).epsilon(1e-14));
    // Far tails stay positive as long as erfc has range (true value ~1e-268).
    CHECK(evidence::std_normal_cdf(-35.0) > 0.0);
    CHECK(evidence::std_normal_cdf(-35.0) < 1e-200);
    CHECK(evidence::std_normal_cdf(40.0) == 1.0);
}

TEST_CASE("std_normal_cdf symmetry") {
    for (double z = 0.0; z <= 10.0 + 1e-9; z += 0.125) {
        const double lo = evidence::std_normal_cdf(-z);
        const double hi = evidence::std_normal_cdf(z);
        CHECK(std::abs(lo + hi - 1.0) <= 1e-12);
    }
}

TEST_CASE("std_normal_pdf frozen values") {
    CHECK(evidence::std_normal_pdf(0.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(evidence::std_normal_pdf(1.0) == evidence::std_normal_pdf(-1.0));
}

TEST_CASE("std_normal_quantile frozen values and round trip") {
    CHECK(evidence::std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(evidence::std_normal_quantile(0.99) ==
          doctest::Approx(2.3263478740408411).epsilon(1e-12));
    CHECK(evidence::std_normal_quantile(0.975) ==
          doctest::Approx(1.9599639845400542).epsilon(1e-12));
    CHECK(evidence::std_normal_quantile(0.01) ==
          doctest::Approx(-2.3263478740408411).epsilon(1e-12));

    for (double z = -6.0; z <= 6.0 + 1e-9; z += 0.25) {
        const double p = evidence::std_normal_cdf(z);
        CHECK(evidence::std_normal_quantile(p) == doctest::Approx(z).epsilon(1e-9));
    }
}

TEST_CASE("std_normal_quantile rejects p outside (0, 1)") {
    CHECK_THROWS(evidence::std_normal_quantile(0.0));
    CHECK_THROWS(evidence::std_normal_quantile(1.0));
    CHECK_THROWS(evidence::std_normal_quantile(-0.1));
    CHECK_THROWS(evidence::std_normal_quantile(std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("gaussian_log_density frozen values") {
    CHECK(evidence::gaussian_log_density(0.0, 0.0, 1.0) ==
          doctest::Approx(-0.91893853320467274).epsilon(1e-14));
    CHECK(evidence::gaussian_log_density(1.0, 0.0, 1.0) ==
          doctest::Approx(-1.4189385332046727).epsilon(1e-14));
    CHECK(evidence::gaussian_log_density(3.0, 1.0, 4.0) ==
          doctest::Approx(-2.1120857137646181).epsilon(1e-14));
}

TEST_CASE("log_sum_exp is shift invariant and handles extreme inputs") {
    Eigen::ArrayXd v(2);
    Eigen::ArrayXd w = Eigen::ArrayXd::Ones(2);

    v << -1000.0, -1001.0;
    CHECK(evidence::log_sum_exp(v, w) ==
          doctest::Approx(-999.68673831248178).epsilon(1e-14));

    v << 0.0, 0.0;
    CHECK(evidence::log_sum_exp(v, w) ==
          doctest::Approx(0.69314718055994531).epsilon(1e-14));

    v << 700.0, 700.0;
    CHECK(evidence::log_sum_exp(v, w) ==
          doctest::Approx(700.0 + 0.69314718055994531).epsilon(1e-14));

    // Weighted form: log(w1 e^{v1} + w2 e^{v2}).
    Eigen::ArrayXd wt(2);
    wt << 2.0, 6.0;
    v << 0.0, 0.0;
    CHECK(evidence::log_sum_exp(v, wt) ==
          doctest::Approx(std::log(8.0)).epsilon(1e-14));

    // All -inf stays -inf rather than producing NaN.
    v << -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity();
    CHECK(evidence::log_sum_exp(v, w) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("sample_standard_normal consumes two uniforms per draw") {
    evidence::RandomStream a(1, 0);
    evidence::RandomStream b(1, 0);
    (void)evidence::sample_standard_normal(a);
    (void)b.uniform01();
    (void)b.uniform01();
    // After one normal draw both streams sit at the same position.
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("sample_standard_normal moments over a large sample") {
    evidence::RandomStream stream(2024, 5);
    const int n = 100000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = evidence::sample_standard_normal(stream);
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // 4 sigma bounds: sd(mean) ~ 1/sqrt(n), sd(var) ~ sqrt(2/n).
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
