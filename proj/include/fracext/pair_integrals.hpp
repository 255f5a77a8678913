#pragma once

#include "fracext/kernel.hpp"
#include "fracext/mesh.hpp"

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace fracext {

struct QuadratureError : std::runtime_error {
    int cell_a = -1, cell_b = -1;
    QuadratureError(const std::string& msg, int a, int b)
        : std::runtime_error(msg), cell_a(a), cell_b(b) {}
};

/// Quadrature controls for element-pair integrals of the fractional kernel.
/// Touching and identical pairs go through singularity-removing coordinate
/// transformations with the radial direction integrated in closed form;
/// disjoint pairs use tensorized Gauss rules graded by separation, with an
/// adaptive subdivision fallback for nearly-touching pairs.
struct PairQuadratureConfig {
    double far_threshold = 3.0;   // centroid separation / sum of cell radii
    double near_threshold = 1.6;
    int far_degree = 4;
    int mid_degree = 8;
    double adaptive_tol = 1e-8;
    int adaptive_max_depth = 10;
    // points per direction in the transformed (bounded) coordinates
    int gauss_identical = 16;
    int gauss_edge = 10;
    int gauss_vertex = 8;
    int gauss_touch_1d = 16;
};

/// Pair contribution over the union of the two cells' nodes:
///   values(i,j) = int_{T_a} int_{T_b} (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y))
///                 |x-y|^{-(N+2s)} dy dx
/// with global P1 hat functions phi.  Without the C_{N,s}/2 prefactor.
struct PairLocalMatrix {
    std::array<int, 6> dofs{};
    int ndofs = 0;
    Eigen::Matrix<double, 6, 6> values = Eigen::Matrix<double, 6, 6>::Zero();

    int local_index(int global_dof) const {
        for (int k = 0; k < ndofs; ++k)
            if (dofs[k] == global_dof) return k;
        return -1;
    }
};

PairLocalMatrix pair_local_matrix(const Mesh& mesh, int cell_a, int cell_b,
                                  const FractionalOrder& order,
                                  const PairQuadratureConfig& config = {});

/// Single-entry convenience wrapper; i and j are global node indices.
double pair_integral(const Mesh& mesh, int cell_a, int cell_b, int i, int j,
                     const FractionalOrder& order,
                     const PairQuadratureConfig& config = {});

} // namespace fracext
