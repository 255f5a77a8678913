#pragma once

#include "fracext/solver.hpp"

namespace fracext {

enum class ControlVariant { DirichletViaRobin, Robin };

struct ControlBounds {
    Eigen::VectorXd lower, upper;
    static ControlBounds nonnegative(int m);
    static ControlBounds box_free(int m);
};

/// External control problem over the control-support dofs:
///   min 1/2 || u(z) - u_d ||^2_{L2(Omega)} + xi/2 ||z||^2
/// subject to the penalized state equation and componentwise bounds.
/// The Tikhonov norm is the unweighted exterior L2 norm for the
/// Dirichlet-via-Robin variant and the kappa-weighted norm for Robin.
struct ControlProblem {
    const Mesh* mesh = nullptr;
    FractionalOrder order;
    double n = 1e5;  // Robin penalty (1 for the plain Robin variant)
    CoefficientField kappa;
    double xi = 0.0;
    Eigen::VectorXd u_d;  // nodal, read on the observation domain only
    ControlBounds bounds;
    ControlVariant variant = ControlVariant::DirichletViaRobin;
    TailPolicy tail = TailPolicy::Analytic;
    AssemblyOptions assembly;
    double solve_tol = 1e-10;
};

/// Assembled and factorized machinery shared by all evaluations of one
/// problem: state and adjoint solves reuse a single factorization of the
/// symmetric operator A + n M.
class ReducedProblem {
  public:
    explicit ReducedProblem(const ControlProblem& problem);

    const std::vector<int>& control_dofs() const { return control_dofs_; }
    int num_controls() const { return static_cast<int>(control_dofs_.size()); }

    /// Tikhonov weight and observations can change without re-assembly; the
    /// factorized operator depends on neither.
    void set_xi(double xi);
    void set_observations(const Eigen::VectorXd& u_d);

    Eigen::VectorXd state(const Eigen::VectorXd& z) const;
    /// adjoint of the state operator applied to the tracking residual of u
    Eigen::VectorXd adjoint(const Eigen::VectorXd& u) const;

    double objective(const Eigen::VectorXd& z) const;
    /// Riesz representative of the reduced gradient in the control inner product
    Eigen::VectorXd reduced_gradient(const Eigen::VectorXd& z) const;
    /// control-space inner product (variant norm)
    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    double control_norm(const Eigen::VectorXd& z) const { return std::sqrt(inner(z, z)); }

    const ControlProblem& problem() const { return *problem_; }
    const SparseMat& stiffness() const { return A_; }
    const SparseMat& exterior_mass() const { return Mk_; }
    Eigen::VectorXd extend(const Eigen::VectorXd& z) const;  // control dofs -> full nodal
    Eigen::VectorXd state_rhs(const Eigen::VectorXd& z) const;

  private:
    ControlProblem problem_storage_;
    const ControlProblem* problem_;
    std::vector<int> control_dofs_;
    SparseMat A_, Mk_, Momega_;
    // lumped control metric (variant Tikhonov norm): diagonal, so the
    // componentwise clamp is the exact metric projection and the discrete
    // complementarity conditions hold in the Riesz gradient itself
    Eigen::VectorXd lumped_metric_;
    std::unique_ptr<FactorizedOperator> K_;
};

struct OptimizeOptions {
    double tol = 1e-8;  // relative to the first projected-gradient norm
    int max_iterations = 500;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int memory = 10;
    double min_step = 1e-14;
    double curvature_eps = 1e-12;
};

enum class OptimizeStatus { Converged, MaxIterations, LineSearchFailure };

struct OptimizerState {
    Eigen::VectorXd z, g;
    std::vector<Eigen::VectorXd> s_pairs, y_pairs;  // limited-memory curvature pairs
    double step = 1.0;
    int iteration = 0;
    int state_solves = 0;
};

struct HistoryRow {
    int iteration;
    double objective;
    double pg_norm;
    double step;
    int state_iterations;
};

struct OptimizeResult {
    Eigen::VectorXd z;       // control dofs
    Eigen::VectorXd u, p;    // optimal state and adjoint (nodal)
    std::vector<HistoryRow> history;
    OptimizeStatus status = OptimizeStatus::Converged;
};

double objective(const ControlProblem& problem, const Eigen::VectorXd& z);
Eigen::VectorXd reduced_gradient(const ControlProblem& problem, const Eigen::VectorXd& z);

/// componentwise clamp onto the admissible box
Eigen::VectorXd project(const Eigen::VectorXd& z, const ControlBounds& bounds);

OptimizeResult optimize(const ControlProblem& problem, const Eigen::VectorXd& z0,
                        const OptimizeOptions& options = {});
OptimizeResult optimize(const ReducedProblem& reduced, const Eigen::VectorXd& z0,
                        const OptimizeOptions& options = {});

} // namespace fracext
