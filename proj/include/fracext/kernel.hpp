#pragma once

#include "fracext/mesh.hpp"

namespace fracext {

/// Fractional order s in (0,1) with the spatial dimension it acts in.
struct FractionalOrder {
    double s = 0.5;
    int dim = 2;

    FractionalOrder() = default;
    FractionalOrder(double s_, int dim_);

    /// kernel exponent N + 2s
    double exponent() const { return dim + 2.0 * s; }
};

/// Normalization constant C_{N,s} = s 4^s Gamma((2s+N)/2) / (pi^{N/2} Gamma(1-s)).
double normalization_constant(const FractionalOrder& order);

enum class TailPolicy { None, Analytic };

/// Density of the truncated far field: rho(x) = int_{|y| > R} |x-y|^{-(N+2s)} dy
/// for the ball of radius R (2D), or the complement of (lo,hi) in 1D.
double tail_density_1d(double x, double lo, double hi, double s);
double tail_density_disk(double r, double R, double s);

/// 2 * int phi_i(x)^2 rho(x) dx over the node's support.  Requires the basis
/// support to stay clear of the outer boundary; returns 0 under TailPolicy::None.
double tail_integral(const Mesh& mesh, int node, const FractionalOrder& order, TailPolicy policy);

} // namespace fracext
