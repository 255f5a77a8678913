#pragma once

#include "fracext/assembly.hpp"

#include <Eigen/Sparse>
#include <memory>

namespace fracext {

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;
    double wall_seconds = 0.0;
};

struct NonConvergenceError : std::runtime_error {
    SolveReport report;
    NonConvergenceError(const std::string& msg, SolveReport r) : std::runtime_error(msg), report(r) {}
};

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete Robin system (A + n M) u = rhs.
struct RobinSystem {
    SparseMat A;
    SparseMat M;
    double n = 1.0;
    Eigen::VectorXd rhs;
};

/// Preconditioned CG with diagonal preconditioning; dense direct
/// factorization below 2000 dofs.  Throws SingularSystemError when the
/// constant vector is detected in the kernel and the load is nonzero.
std::pair<Eigen::VectorXd, SolveReport> solve_robin(const RobinSystem& system, double tol = 1e-10);

struct PenalizedSolveInputs {
    TailPolicy tail = TailPolicy::Analytic;
    AssemblyOptions assembly;
    const SparseMat* prebuilt_A = nullptr;  // reuse a stiffness assembled elsewhere
    const SparseMat* prebuilt_M = nullptr;
};

/// Robin-penalized nonhomogeneous Dirichlet problem:
///   N_s u + n kappa u = n kappa z outside, (-Delta)^s u = f inside.
std::pair<Eigen::VectorXd, SolveReport> solve_dirichlet_penalized(
    const Mesh& mesh, const FractionalOrder& order, const CoefficientField& kappa, double n,
    const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::VectorXd& z_nodal,
    double tol = 1e-10, const PenalizedSolveInputs& inputs = {});

/// Exact discrete Dirichlet solve: exterior dofs pinned to z by elimination.
Eigen::VectorXd solve_dirichlet_eliminated(const Mesh& mesh, const FractionalOrder& order,
                                           const std::function<double(const Eigen::Vector2d&)>& f,
                                           const Eigen::VectorXd& z_nodal, double tol = 1e-10,
                                           const PenalizedSolveInputs& inputs = {});

/// Homogeneous-exterior adjoint: A restricted to dofs supported inside Omega,
/// exterior dofs eliminated to zero.  `load` is an (already integrated) load
/// vector; only its strictly-interior entries are read.
Eigen::VectorXd solve_dirichlet_adjoint(const Mesh& mesh, const FractionalOrder& order,
                                        const Eigen::VectorXd& load, double tol = 1e-10,
                                        const PenalizedSolveInputs& inputs = {});

/// Cached sparse factorization of a symmetric positive definite operator,
/// used where one system is solved against many right-hand sides.
class FactorizedOperator {
  public:
    explicit FactorizedOperator(const SparseMat& K);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  private:
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> ldlt_;
};

} // namespace fracext
