#include "fracext/exact.hpp"

#include <cmath>

namespace fracext {

double ball_rhs_constant(const FractionalOrder& order) {
    const double s = order.s;
    const double N = order.dim;
    return std::pow(2.0, 2.0 * s) * std::tgamma(s + 0.5 * N) * std::tgamma(s + 1.0) /
           std::tgamma(0.5 * N);
}

double benchmark_exact(const FractionalOrder& order, const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    const double c = 1.0 / ball_rhs_constant(order);
    double v = 0.0;
    if (r2 < 1.0) v += std::pow(1.0 - r2, order.s);
    if (r2 < 0.25) v += std::pow(0.25 - r2, order.s);
    return c * v;
}

double benchmark_datum(const FractionalOrder& order, const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    if (r2 >= 1.0) return 0.0;
    return std::pow(1.0 - r2, order.s) / ball_rhs_constant(order);
}

} // namespace fracext
