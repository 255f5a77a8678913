#pragma once

#include "fracext/kernel.hpp"

#include <Eigen/Dense>

namespace fracext {

/// Closed-form benchmark on the ball: with lambda = 2^{2s} Gamma(s + N/2)
/// Gamma(s+1) / Gamma(N/2) one has (-Delta)^s (1 - |x|^2)_+^s = lambda on the
/// unit ball, so u = (1/lambda) [ (1-|x|^2)_+^s + (1/4-|x|^2)_+^s ] solves
/// (-Delta)^s u = 2 on B(0, 1/2) with exterior datum (1/lambda)(1-|x|^2)_+^s.
double ball_rhs_constant(const FractionalOrder& order);

double benchmark_exact(const FractionalOrder& order, const Eigen::Vector2d& x);
double benchmark_datum(const FractionalOrder& order, const Eigen::Vector2d& x);
inline double benchmark_rhs(const Eigen::Vector2d&) { return 2.0; }

} // namespace fracext
