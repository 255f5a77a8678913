#include "fracext/control.hpp"

#include <cmath>
#include <limits>

namespace fracext {

namespace {

// row-sum lumping of a mass matrix restricted to the control dofs
Eigen::VectorXd lumped_control_metric(const SparseMat& M, const std::vector<int>& dofs) {
    Eigen::VectorXd rowsum = M * Eigen::VectorXd::Ones(M.rows());
    Eigen::VectorXd out(static_cast<int>(dofs.size()));
    for (size_t i = 0; i < dofs.size(); ++i) out[static_cast<int>(i)] = rowsum[dofs[i]];
    return out;
}

} // namespace

ControlBounds ControlBounds::nonnegative(int m) {
    ControlBounds b;
    b.lower = Eigen::VectorXd::Zero(m);
    b.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    return b;
}

ControlBounds ControlBounds::box_free(int m) {
    ControlBounds b;
    b.lower = Eigen::VectorXd::Constant(m, -std::numeric_limits<double>::infinity());
    b.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    return b;
}

ReducedProblem::ReducedProblem(const ControlProblem& problem)
    : problem_storage_(problem), problem_(&problem_storage_) {
    const Mesh& mesh = *problem.mesh;
    if (problem.xi < 0.0) throw std::invalid_argument("ControlProblem: xi must be nonnegative");
    problem.kappa.validate(mesh);
    DofPartition part = partition_dofs(mesh);
    control_dofs_ = part.control_dofs;
    if (control_dofs_.empty())
        throw std::invalid_argument("ControlProblem: mesh carries no control-support cells");
    if (problem.bounds.lower.size() != num_controls() || problem.bounds.upper.size() != num_controls())
        throw std::invalid_argument("ControlProblem: bounds size mismatch");
    for (int i = 0; i < num_controls(); ++i)
        if (problem.bounds.lower[i] > problem.bounds.upper[i])
            throw std::invalid_argument("ControlProblem: lower bound exceeds upper bound");
    if (problem.u_d.size() != mesh.num_nodes())
        throw std::invalid_argument("ControlProblem: u_d size mismatch");

    A_ = assemble_stiffness(mesh, problem.order, problem.tail, problem.assembly);
    Mk_ = assemble_exterior_mass(mesh, problem.kappa);
    Momega_ = assemble_region_mass(mesh, Region::Interior);
    lumped_metric_ = problem.variant == ControlVariant::Robin
                         ? lumped_control_metric(Mk_, control_dofs_)
                         : lumped_control_metric(assemble_region_mass(mesh, Region::ControlSupport),
                                                 control_dofs_);
    for (int i = 0; i < lumped_metric_.size(); ++i)
        if (!(lumped_metric_[i] > 0.0))
            throw std::invalid_argument("ControlProblem: kappa vanishes on part of the control support");

    SparseMat K = A_ + problem.n * Mk_;
    K_ = std::make_unique<FactorizedOperator>(K);
}

Eigen::VectorXd ReducedProblem::extend(const Eigen::VectorXd& z) const {
    if (z.size() != num_controls()) throw std::invalid_argument("control vector size mismatch");
    Eigen::VectorXd Z = Eigen::VectorXd::Zero(problem_->mesh->num_nodes());
    for (int i = 0; i < num_controls(); ++i) Z[control_dofs_[i]] = z[i];
    return Z;
}

Eigen::VectorXd ReducedProblem::state_rhs(const Eigen::VectorXd& z) const {
    return problem_->n * (Mk_ * extend(z));
}

Eigen::VectorXd ReducedProblem::state(const Eigen::VectorXd& z) const {
    return K_->solve(state_rhs(z));
}

Eigen::VectorXd ReducedProblem::adjoint(const Eigen::VectorXd& u) const {
    return K_->solve(Momega_ * (u - problem_->u_d));
}

double ReducedProblem::objective(const Eigen::VectorXd& z) const {
    Eigen::VectorXd u = state(z);
    Eigen::VectorXd r = u - problem_->u_d;
    double tracking = 0.5 * r.dot(Momega_ * r);
    return tracking + 0.5 * problem_->xi * z.dot(lumped_metric_.cwiseProduct(z));
}

Eigen::VectorXd ReducedProblem::reduced_gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd u = state(z);
    Eigen::VectorXd p = adjoint(u);
    // tracking derivative d/dz = n (Mk p) restricted; Riesz in the lumped metric
    Eigen::VectorXd mp = Mk_ * p;
    Eigen::VectorXd g(num_controls());
    for (int i = 0; i < num_controls(); ++i)
        g[i] = problem_->n * mp[control_dofs_[i]] / lumped_metric_[i];
    return g + problem_->xi * z;
}

double ReducedProblem::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(lumped_metric_.cwiseProduct(b));
}

double objective(const ControlProblem& problem, const Eigen::VectorXd& z) {
    return ReducedProblem(problem).objective(z);
}

Eigen::VectorXd reduced_gradient(const ControlProblem& problem, const Eigen::VectorXd& z) {
    return ReducedProblem(problem).reduced_gradient(z);
}

Eigen::VectorXd project(const Eigen::VectorXd& z, const ControlBounds& bounds) {
    if (z.size() != bounds.lower.size()) throw std::invalid_argument("project: size mismatch");
    return z.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

OptimizeResult optimize(const ControlProblem& problem, const Eigen::VectorXd& z0,
                        const OptimizeOptions& options) {
    ReducedProblem reduced(problem);
    return optimize(reduced, z0, options);
}

OptimizeResult optimize(const ReducedProblem& reduced, const Eigen::VectorXd& z0,
                        const OptimizeOptions& options) {
    const ControlProblem& prob = reduced.problem();
    const int m = reduced.num_controls();
    if (z0.size() != m) throw std::invalid_argument("optimize: z0 size mismatch");

    OptimizerState st;
    st.z = project(z0, prob.bounds);
    st.g = reduced.reduced_gradient(st.z);
    double fz = reduced.objective(st.z);

    OptimizeResult result;
    result.status = OptimizeStatus::MaxIterations;

    auto pg_norm = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
        Eigen::VectorXd d = z - project(z - g, prob.bounds);
        return std::sqrt(reduced.inner(d, d));
    };
    const double pg0 = pg_norm(st.z, st.g);
    const double tol_abs = options.tol * std::max(pg0, 1e-300);

    result.history.push_back({0, fz, pg0, 0.0, 0});

    auto finish = [&](OptimizeStatus status) {
        result.status = status;
        result.z = st.z;
        result.u = reduced.state(st.z);
        result.p = reduced.adjoint(result.u);
        return result;
    };

    if (pg0 <= tol_abs) return finish(OptimizeStatus::Converged);

    // limited-memory quasi-Newton two-loop recursion in the control metric
    auto apply_hessian_inverse = [&](const Eigen::VectorXd& g) {
        const int k = static_cast<int>(st.s_pairs.size());
        Eigen::VectorXd q = g;
        std::vector<double> alpha(k), rho(k);
        for (int i = k - 1; i >= 0; --i) {
            rho[i] = 1.0 / reduced.inner(st.y_pairs[i], st.s_pairs[i]);
            alpha[i] = rho[i] * reduced.inner(st.s_pairs[i], q);
            q -= alpha[i] * st.y_pairs[i];
        }
        if (k > 0) {
            double gamma = reduced.inner(st.s_pairs[k - 1], st.y_pairs[k - 1]) /
                           reduced.inner(st.y_pairs[k - 1], st.y_pairs[k - 1]);
            q *= gamma;
        }
        for (int i = 0; i < k; ++i) {
            double beta = rho[i] * reduced.inner(st.y_pairs[i], q);
            q += (alpha[i] - beta) * st.s_pairs[i];
        }
        return q;
    };

    // two-metric projection: quasi-Newton scaling on the free set, plain
    // gradient on the (strongly) active set, so the projected step stays a
    // descent direction
    auto active_mask = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
        Eigen::VectorXd mask = Eigen::VectorXd::Ones(m);
        for (int i = 0; i < m; ++i) {
            if (z[i] <= prob.bounds.lower[i] && g[i] > 0.0) mask[i] = 0.0;
            if (z[i] >= prob.bounds.upper[i] && g[i] < 0.0) mask[i] = 0.0;
        }
        return mask;
    };

    for (st.iteration = 1; st.iteration <= options.max_iterations; ++st.iteration) {
        Eigen::VectorXd mask = active_mask(st.z, st.g);
        Eigen::VectorXd g_free = st.g.cwiseProduct(mask);
        Eigen::VectorXd dir = -apply_hessian_inverse(g_free).cwiseProduct(mask) -
                              st.g.cwiseProduct(Eigen::VectorXd::Ones(m) - mask);
        if (reduced.inner(dir, st.g) >= 0.0) dir = -st.g;

        double step = options.initial_step;
        Eigen::VectorXd z_new;
        double f_new = fz;
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) dir = -st.g;  // quasi-Newton step rejected: fall back
            step = options.initial_step;
            while (step >= options.min_step) {
                z_new = project(st.z + step * dir, prob.bounds);
                Eigen::VectorXd dz = z_new - st.z;
                double slope = reduced.inner(st.g, dz);
                if (slope < 0.0) {
                    f_new = reduced.objective(z_new);
                    ++st.state_solves;
                    if (f_new <= fz + options.armijo_c1 * slope) {
                        accepted = true;
                        break;
                    }
                }
                step *= options.backtrack;
            }
        }
        if (!accepted) return finish(OptimizeStatus::LineSearchFailure);

        Eigen::VectorXd g_new = reduced.reduced_gradient(z_new);
        ++st.state_solves;
        Eigen::VectorXd s = z_new - st.z;
        Eigen::VectorXd y = g_new - st.g;
        double sy = reduced.inner(s, y);
        double sn = std::sqrt(reduced.inner(s, s)), yn = std::sqrt(reduced.inner(y, y));
        if (sy > options.curvature_eps * sn * yn) {
            st.s_pairs.push_back(s);
            st.y_pairs.push_back(y);
            if (static_cast<int>(st.s_pairs.size()) > options.memory) {
                st.s_pairs.erase(st.s_pairs.begin());
                st.y_pairs.erase(st.y_pairs.begin());
            }
        }
        st.z = z_new;
        st.g = g_new;
        st.step = step;
        fz = f_new;

        double pg = pg_norm(st.z, st.g);
        result.history.push_back({st.iteration, fz, pg, step, st.state_solves});
        if (pg <= tol_abs) return finish(OptimizeStatus::Converged);
    }
    return finish(OptimizeStatus::MaxIterations);
}

} // namespace fracext
