#pragma once

// Test-only reference implementations, kept independent of the production
// integration paths: plain recursive subdivision with tensor Gauss rules and
// a Lanczos Gamma evaluation.

#include "fracext/mesh.hpp"

#include <Eigen/Dense>
#include <functional>

namespace fracext::oracle {

/// Lanczos approximation, |relative error| < 1e-13 on (0, 3].
double lanczos_gamma(double x);

/// Hat-pair integral over two 1D cells by dyadic subdivision toward the
/// singular set; i and j are global node indices of the mesh.
double pair_integral_1d(const Mesh& mesh, int cell_a, int cell_b, int i, int j, double s,
                        int max_depth = 48);

/// Hat-pair integral over two triangles by recursive outer/inner adaptive
/// quadrature.  Slow; intended for single-pair verification at ~1e-5.
double pair_integral_2d(const Mesh& mesh, int cell_a, int cell_b, int i, int j, double s,
                        double tol = 1e-6);

/// Dense stiffness over the truncated pair region (no tail, no C_{N,s}/2
/// prefactor applied -> multiplied in, matching assemble_stiffness).
Eigen::MatrixXd dense_stiffness_1d(const Mesh& mesh, double s);

/// Pointwise (-Delta)^s of v at x0 (1D) by symmetric principal-value
/// quadrature; v must be supported in [-1, 1] and twice differentiable
/// near x0.
double fractional_laplacian_1d(const std::function<double(double)>& v, double x0, double s);

/// Numeric check value for the disk tail density.
double tail_density_disk_numeric(double r, double R, double s);

} // namespace fracext::oracle
