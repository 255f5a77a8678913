#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fracext {

/// Quadrature rule on a reference element: the unit interval [0,1] in 1D
/// or the unit triangle {x,y >= 0, x+y <= 1} in 2D.  Points are stored in
/// reference coordinates, weights sum to the reference measure (1 resp. 1/2).
struct QuadratureRule {
    Eigen::MatrixXd points;   // dim x npoints
    Eigen::VectorXd weights;
    int exactness_degree = 0;

    int dim() const { return static_cast<int>(points.rows()); }
    int size() const { return static_cast<int>(points.cols()); }
};

/// Gauss-Legendre nodes/weights on [0,1], exact for degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Symmetric rule on the reference triangle, exact at least to `degree`.
/// Available degrees: 2, 4, 5, 8.
QuadratureRule triangle_rule(int degree);

/// Rule of exactness >= degree on the reference element of dimension dim.
QuadratureRule reference_rule(int dim, int degree);

/// Raw Gauss-Legendre nodes/weights on [0,1] (cached).
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace fracext
