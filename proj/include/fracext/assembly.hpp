#pragma once

#include "fracext/kernel.hpp"
#include "fracext/mesh.hpp"
#include "fracext/pair_integrals.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

namespace fracext {

using SparseMat = Eigen::SparseMatrix<double>;

/// Continuous piecewise-linear function given by nodal coefficients.
struct FemFunction {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd values;

    FemFunction() = default;
    FemFunction(const Mesh& m, Eigen::VectorXd v);

    double eval(const Eigen::Vector2d& x) const;  // throws outside the mesh
};

FemFunction interpolate(const Mesh& mesh, const std::function<double(const Eigen::Vector2d&)>& f);

/// Nonnegative weight kappa on the exterior: piecewise constant per cell or
/// nodal P1; identically zero on interior cells.
struct CoefficientField {
    Eigen::VectorXd cell_values;  // per cell (piecewise constant) when !is_nodal
    Eigen::VectorXd node_values;  // per node (P1) when is_nodal
    bool is_nodal = false;

    enum class Support { ExteriorAll, ControlOnly };
    static CoefficientField indicator(const Mesh& mesh, Support support, double value = 1.0);
    static CoefficientField nodal(const Mesh& mesh, Eigen::VectorXd node_values);

    void validate(const Mesh& mesh) const;  // throws on negative values
    bool is_zero() const;
};

struct AssemblyOptions {
    int workers = 2;  // fixed default keeps outputs reproducible across hosts
    PairQuadratureConfig quad;
    double drop_tol = 1e-14;  // relative to the largest entry
};

/// Nonlocal stiffness over the truncated region R^{2N} \ (R^N \ Omega)^2:
/// A(i,j) = (C_{N,s}/2) * sum over cell pairs not both exterior of the pair
/// integrals, plus the analytic far-field tail on diagonal entries of dofs
/// supported inside Omega.  Exactly symmetric by construction.
SparseMat assemble_stiffness(const Mesh& mesh, const FractionalOrder& order, TailPolicy tail,
                             const AssemblyOptions& options = {});

/// M(i,j) = int_{exterior} kappa phi_i phi_j dx (no penalty factor n).
SparseMat assemble_exterior_mass(const Mesh& mesh, const CoefficientField& kappa);

/// Mass matrix restricted to cells of one region (or the whole mesh).
SparseMat assemble_region_mass(const Mesh& mesh, Region region);
SparseMat assemble_full_mass(const Mesh& mesh);

/// b_i = int_Omega f phi_i dx, degree-4 quadrature per interior cell.
Eigen::VectorXd assemble_interior_load(const Mesh& mesh,
                                       const std::function<double(const Eigen::Vector2d&)>& f);

/// b_i = int_Omega f phi_i + int kappa z phi_i (penalty factor applied by caller).
Eigen::VectorXd assemble_load(const Mesh& mesh, const std::function<double(const Eigen::Vector2d&)>& f,
                              const CoefficientField& kappa, const Eigen::VectorXd& z_nodal);

/// Interaction operator N_s u at exterior sample points:
///   N_s u(x) = C_{N,s} int_Omega (u(x) - u(y)) |x-y|^{-(N+2s)} dy.
/// Points must lie in the open exterior at distance >= one local cell size
/// from the observation boundary.
Eigen::VectorXd eval_interaction(const Mesh& mesh, const FemFunction& u, const FractionalOrder& order,
                                 const std::vector<Eigen::Vector2d>& points);

/// L2 norms over one region; degree-4 quadrature against a callable reference.
double l2_norm(const Mesh& mesh, Region region, const Eigen::VectorXd& u_nodal);
double l2_error(const Mesh& mesh, Region region, const Eigen::VectorXd& u_nodal,
                const std::function<double(const Eigen::Vector2d&)>& reference);

} // namespace fracext
