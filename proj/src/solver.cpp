#include "fracext/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <chrono>
#include <cmath>

namespace fracext {

namespace {

constexpr int kDirectThreshold = 2000;

double max_abs_entry(const SparseMat& K) {
    double m = 0.0;
    for (int k = 0; k < K.outerSize(); ++k)
        for (SparseMat::InnerIterator it(K, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

std::pair<Eigen::VectorXd, SolveReport> solve_spd(const SparseMat& K, const Eigen::VectorXd& rhs,
                                                  double tol) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report;
    Eigen::VectorXd u;

    // singular up to constants (kappa == 0, no far-field tail)
    const double scale = max_abs_entry(K);
    Eigen::VectorXd k1 = K * Eigen::VectorXd::Ones(K.rows());
    if (k1.lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(scale, 1e-300)) {
        if (rhs.lpNorm<Eigen::Infinity>() > 0.0)
            throw SingularSystemError("solve_robin: constant null vector detected (kappa vanishes)");
        u = Eigen::VectorXd::Zero(K.rows());
        report.final_residual = 0.0;
        return {u, report};
    }

    if (K.rows() < kDirectThreshold) {
        Eigen::MatrixXd Kd(K);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Kd);
        u = ldlt.solve(rhs);
        report.iterations = 1;
    } else {
        Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(tol);
        cg.setMaxIterations(10 * static_cast<int>(K.rows()));
        cg.compute(K);
        u = cg.solve(rhs);
        report.iterations = static_cast<int>(cg.iterations());
    }
    double rhs_norm = rhs.norm();
    report.final_residual = rhs_norm > 0.0 ? (K * u - rhs).norm() / rhs_norm : (K * u).norm();
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report.final_residual > std::max(tol * 50.0, 1e-9))
        throw NonConvergenceError("linear solve did not reach the requested tolerance", report);
    return {u, report};
}

std::vector<int> strict_interior_dofs(const Mesh& mesh) {
    DofPartition p = partition_dofs(mesh);
    return p.interior_only_dofs;
}

// K restricted to rows/cols in `keep` (sorted); `slot` maps global -> local.
SparseMat restrict_matrix(const SparseMat& K, const std::vector<int>& keep, std::vector<int>& slot) {
    slot.assign(K.rows(), -1);
    for (size_t i = 0; i < keep.size(); ++i) slot[keep[i]] = static_cast<int>(i);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < K.outerSize(); ++k)
        for (SparseMat::InnerIterator it(K, k); it; ++it)
            if (slot[it.row()] >= 0 && slot[it.col()] >= 0)
                trips.emplace_back(slot[it.row()], slot[it.col()], it.value());
    SparseMat R(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
    R.setFromTriplets(trips.begin(), trips.end());
    R.makeCompressed();
    return R;
}

} // namespace

std::pair<Eigen::VectorXd, SolveReport> solve_robin(const RobinSystem& system, double tol) {
    if (system.A.rows() != system.M.rows() || system.A.rows() != system.rhs.size())
        throw std::invalid_argument("solve_robin: inconsistent system sizes");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_robin: tol must be positive");
    SparseMat K = system.A + system.n * system.M;
    return solve_spd(K, system.rhs, tol);
}

std::pair<Eigen::VectorXd, SolveReport> solve_dirichlet_penalized(
    const Mesh& mesh, const FractionalOrder& order, const CoefficientField& kappa, double n,
    const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::VectorXd& z_nodal,
    double tol, const PenalizedSolveInputs& inputs) {
    if (n < 1.0) throw std::invalid_argument("solve_dirichlet_penalized: penalty n must be >= 1");
    RobinSystem sys;
    sys.A = inputs.prebuilt_A ? *inputs.prebuilt_A
                              : assemble_stiffness(mesh, order, inputs.tail, inputs.assembly);
    sys.M = inputs.prebuilt_M ? *inputs.prebuilt_M : assemble_exterior_mass(mesh, kappa);
    sys.n = n;
    sys.rhs = assemble_interior_load(mesh, f) + n * (sys.M * z_nodal);
    return solve_robin(sys, tol);
}

Eigen::VectorXd solve_dirichlet_eliminated(const Mesh& mesh, const FractionalOrder& order,
                                           const std::function<double(const Eigen::Vector2d&)>& f,
                                           const Eigen::VectorXd& z_nodal, double tol,
                                           const PenalizedSolveInputs& inputs) {
    if (z_nodal.size() != mesh.num_nodes())
        throw std::invalid_argument("solve_dirichlet_eliminated: z size mismatch");
    SparseMat A = inputs.prebuilt_A ? *inputs.prebuilt_A
                                    : assemble_stiffness(mesh, order, inputs.tail, inputs.assembly);
    const std::vector<int> free = strict_interior_dofs(mesh);
    std::vector<int> slot;
    SparseMat Aff = restrict_matrix(A, free, slot);

    // boundary value: z on every dof outside the strict interior
    Eigen::VectorXd u = z_nodal;
    for (int i : free) u[i] = 0.0;
    Eigen::VectorXd b = assemble_interior_load(mesh, f) - A * u;
    Eigen::VectorXd bf(free.size());
    for (size_t i = 0; i < free.size(); ++i) bf[static_cast<int>(i)] = b[free[i]];

    auto [uf, report] = solve_spd(Aff, bf, tol);
    (void)report;
    for (size_t i = 0; i < free.size(); ++i) u[free[i]] = uf[static_cast<int>(i)];
    return u;
}

Eigen::VectorXd solve_dirichlet_adjoint(const Mesh& mesh, const FractionalOrder& order,
                                        const Eigen::VectorXd& load, double tol,
                                        const PenalizedSolveInputs& inputs) {
    if (load.size() != mesh.num_nodes())
        throw std::invalid_argument("solve_dirichlet_adjoint: load size mismatch");
    SparseMat A = inputs.prebuilt_A ? *inputs.prebuilt_A
                                    : assemble_stiffness(mesh, order, inputs.tail, inputs.assembly);
    const std::vector<int> free = strict_interior_dofs(mesh);
    std::vector<int> slot;
    SparseMat Aff = restrict_matrix(A, free, slot);
    Eigen::VectorXd bf(free.size());
    for (size_t i = 0; i < free.size(); ++i) bf[static_cast<int>(i)] = load[free[i]];
    auto [pf, report] = solve_spd(Aff, bf, tol);
    (void)report;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(mesh.num_nodes());
    for (size_t i = 0; i < free.size(); ++i) p[free[i]] = pf[static_cast<int>(i)];
    return p;
}

FactorizedOperator::FactorizedOperator(const SparseMat& K)
    : ldlt_(std::make_shared<Eigen::SimplicialLDLT<SparseMat>>()) {
    ldlt_->compute(K);
    if (ldlt_->info() != Eigen::Success)
        throw std::runtime_error("FactorizedOperator: factorization failed");
}

Eigen::VectorXd FactorizedOperator::solve(const Eigen::VectorXd& rhs) const {
    return ldlt_->solve(rhs);
}

} // namespace fracext
