#pragma once

#include <Eigen/Dense>

namespace evidence {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Nodes and weights for the given order, computed once by Newton iteration
/// on the Legendre recurrence and cached. Thread-safe.
const GaussLegendreRule& gauss_legendre(int order);

/// Nodes/weights mapped onto [a, b].
GaussLegendreRule gauss_legendre_on(int order, double a, double b);

} // namespace evidence
