#include "evidence/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace evidence {

namespace {

GaussLegendreRule compute_rule(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th root of P_order.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence: evaluates P_order(x) and P'_order(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

} // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

GaussLegendreRule gauss_legendre_on(int order, double a, double b) {
    const GaussLegendreRule& base = gauss_legendre(order);
    GaussLegendreRule rule;
    const double mid = 0.5 * (a + b);
    const double halfwidth = 0.5 * (b - a);
    rule.nodes = mid + halfwidth * base.nodes;
    rule.weights = halfwidth * base.weights;
    return rule;
}

} // namespace evidence
