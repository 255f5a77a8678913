#include "fracext/assembly.hpp"

#include "fracext/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <thread>
#include <unordered_map>

namespace fracext {

namespace {

using Vec2 = Eigen::Vector2d;

bool cell_contains(const Mesh& mesh, int cell, const Vec2& x, Eigen::Vector3d* lambda) {
    const Vec2 v0 = mesh.node(mesh.cells(0, cell));
    if (mesh.dim == 1) {
        const Vec2 v1 = mesh.node(mesh.cells(1, cell));
        double lo = std::min(v0.x(), v1.x()), hi = std::max(v0.x(), v1.x());
        if (x.x() < lo - 1e-12 || x.x() > hi + 1e-12) return false;
        double t = (x.x() - v0.x()) / (v1.x() - v0.x());
        if (lambda) *lambda = Eigen::Vector3d(1.0 - t, t, 0.0);
        return true;
    }
    const Vec2 v1 = mesh.node(mesh.cells(1, cell));
    const Vec2 v2 = mesh.node(mesh.cells(2, cell));
    Eigen::Matrix2d B;
    B.col(0) = v1 - v0;
    B.col(1) = v2 - v0;
    Vec2 ab = B.inverse() * (x - v0);
    double eps = 1e-10;
    if (ab.x() < -eps || ab.y() < -eps || ab.x() + ab.y() > 1.0 + eps) return false;
    if (lambda) *lambda = Eigen::Vector3d(1.0 - ab.x() - ab.y(), ab.x(), ab.y());
    return true;
}

double point_cell_distance(const Mesh& mesh, int cell, const Vec2& x) {
    if (cell_contains(mesh, cell, x, nullptr)) return 0.0;
    double d = std::numeric_limits<double>::max();
    const int nv = mesh.dim + 1;
    for (int k = 0; k < nv; ++k) {
        Vec2 a = mesh.node(mesh.cells(k, cell));
        if (mesh.dim == 1) {
            d = std::min(d, (x - a).norm());
            continue;
        }
        Vec2 b = mesh.node(mesh.cells((k + 1) % nv, cell));
        Vec2 ab = b - a;
        double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        d = std::min(d, (x - (a + t * ab)).norm());
    }
    return d;
}

// degree-4 quadrature loop over one cell; callback(point, lambda, weight)
template <typename F>
void for_cell_quadrature(const Mesh& mesh, int cell, const QuadratureRule& rule, F&& fn) {
    const Vec2 v0 = mesh.node(mesh.cells(0, cell));
    const double meas = mesh.cell_measure(cell);
    if (mesh.dim == 1) {
        const Vec2 v1 = mesh.node(mesh.cells(1, cell));
        for (int q = 0; q < rule.size(); ++q) {
            double t = rule.points(0, q);
            fn(v0 + t * (v1 - v0), Eigen::Vector3d(1.0 - t, t, 0.0), rule.weights[q] * meas);
        }
    } else {
        const Vec2 v1 = mesh.node(mesh.cells(1, cell));
        const Vec2 v2 = mesh.node(mesh.cells(2, cell));
        for (int q = 0; q < rule.size(); ++q) {
            double a = rule.points(0, q), b = rule.points(1, q);
            fn(v0 + a * (v1 - v0) + b * (v2 - v0), Eigen::Vector3d(1.0 - a - b, a, b),
               rule.weights[q] * 2.0 * meas);
        }
    }
}

double kappa_at(const CoefficientField& kappa, const Mesh& mesh, int cell, const Eigen::Vector3d& lambda) {
    if (kappa.is_nodal) {
        double v = 0.0;
        for (int k = 0; k <= mesh.dim; ++k) v += lambda[k] * kappa.node_values[mesh.cells(k, cell)];
        return v;
    }
    return kappa.cell_values[cell];
}

} // namespace

FemFunction::FemFunction(const Mesh& m, Eigen::VectorXd v) : mesh(&m), values(std::move(v)) {
    if (values.size() != m.num_nodes()) throw std::invalid_argument("FemFunction: coefficient count mismatch");
}

double FemFunction::eval(const Eigen::Vector2d& x) const {
    Eigen::Vector3d lambda;
    for (int c = 0; c < mesh->num_cells(); ++c) {
        if (!cell_contains(*mesh, c, x, &lambda)) continue;
        double v = 0.0;
        for (int k = 0; k <= mesh->dim; ++k) v += lambda[k] * values[mesh->cells(k, c)];
        return v;
    }
    throw std::invalid_argument("FemFunction::eval: point outside the mesh");
}

FemFunction interpolate(const Mesh& mesh, const std::function<double(const Eigen::Vector2d&)>& f) {
    Eigen::VectorXd v(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) v[i] = f(mesh.node(i));
    return FemFunction(mesh, std::move(v));
}

CoefficientField CoefficientField::indicator(const Mesh& mesh, Support support, double value) {
    CoefficientField k;
    k.cell_values = Eigen::VectorXd::Zero(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        bool on = support == Support::ExteriorAll ? mesh.cell_region[c] != Region::Interior
                                                  : mesh.cell_region[c] == Region::ControlSupport;
        if (on) k.cell_values[c] = value;
    }
    return k;
}

CoefficientField CoefficientField::nodal(const Mesh& mesh, Eigen::VectorXd node_values) {
    if (node_values.size() != mesh.num_nodes())
        throw std::invalid_argument("CoefficientField::nodal: size mismatch");
    CoefficientField k;
    k.node_values = std::move(node_values);
    k.is_nodal = true;
    return k;
}

void CoefficientField::validate(const Mesh& mesh) const {
    const Eigen::VectorXd& v = is_nodal ? node_values : cell_values;
    for (int i = 0; i < v.size(); ++i)
        if (v[i] < 0.0) throw std::invalid_argument("CoefficientField: kappa must be nonnegative");
    if (!is_nodal && v.size() != mesh.num_cells())
        throw std::invalid_argument("CoefficientField: cell value count mismatch");
    if (is_nodal && v.size() != mesh.num_nodes())
        throw std::invalid_argument("CoefficientField: node value count mismatch");
}

bool CoefficientField::is_zero() const {
    const Eigen::VectorXd& v = is_nodal ? node_values : cell_values;
    return v.size() == 0 || v.maxCoeff() <= 0.0;
}

SparseMat assemble_stiffness(const Mesh& mesh, const FractionalOrder& order, TailPolicy tail,
                             const AssemblyOptions& options) {
    if (order.dim != mesh.dim) throw std::invalid_argument("assemble_stiffness: dimension mismatch");
    const int n = mesh.num_nodes();
    const int nc = mesh.num_cells();

    // pair list: every unordered pair with at least one interior cell
    std::vector<char> interior_cell(nc);
    for (int c = 0; c < nc; ++c) interior_cell[c] = mesh.cell_region[c] == Region::Interior;
    std::vector<std::pair<int, int>> pairs;
    {
        size_t ni = 0;
        for (int c = 0; c < nc; ++c) ni += interior_cell[c];
        pairs.reserve(ni * nc);
    }
    for (int a = 0; a < nc; ++a)
        for (int b = a; b < nc; ++b)
            if (interior_cell[a] || interior_cell[b]) pairs.emplace_back(a, b);

    // dense rows for dofs adjacent to the observation domain, map for the rest
    std::vector<int> row_slot(n, -1);
    {
        int slots = 0;
        for (int c = 0; c < nc; ++c)
            if (interior_cell[c])
                for (int k = 0; k <= mesh.dim; ++k)
                    if (row_slot[mesh.cells(k, c)] < 0) row_slot[mesh.cells(k, c)] = slots++;
        (void)slots;
    }
    int nslots = 0;
    for (int i = 0; i < n; ++i) nslots = std::max(nslots, row_slot[i] + 1);

    const int workers = std::max(1, options.workers);
    struct Partial {
        std::vector<std::vector<double>> dense;  // slot -> row over all dofs
        std::unordered_map<std::uint64_t, double> rest;
    };
    std::vector<Partial> partials(workers);
    std::vector<std::exception_ptr> errors(workers);

    auto worker_fn = [&](int w) {
        try {
            Partial& part = partials[w];
            part.dense.assign(nslots, {});
            for (auto& row : part.dense) row.assign(n, 0.0);
            auto add = [&](int i, int j, double v) {
                if (i > j) std::swap(i, j);
                if (row_slot[i] >= 0) part.dense[row_slot[i]][j] += v;
                else if (row_slot[j] >= 0) part.dense[row_slot[j]][i] += v;
                else part.rest[(static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j)] += v;
            };
            for (size_t p = w; p < pairs.size(); p += workers) {
                auto [a, b] = pairs[p];
                PairLocalMatrix loc = pair_local_matrix(mesh, a, b, order, options.quad);
                double factor = (a == b) ? 1.0 : 2.0;
                for (int i = 0; i < loc.ndofs; ++i)
                    for (int j = i; j < loc.ndofs; ++j) {
                        double v = factor * loc.values(i, j);
                        if (v != 0.0) add(loc.dofs[i], loc.dofs[j], v);
                    }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        worker_fn(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn, w);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // merge partials in worker order (deterministic for a fixed worker count)
    std::vector<std::vector<double>> dense(nslots);
    for (auto& row : dense) row.assign(n, 0.0);
    std::map<std::uint64_t, double> rest;
    for (int w = 0; w < workers; ++w) {
        for (int r = 0; r < nslots; ++r)
            for (int j = 0; j < n; ++j) dense[r][j] += partials[w].dense[r][j];
        for (const auto& [k, v] : partials[w].rest) rest[k] += v;
        partials[w].dense.clear();
        partials[w].rest.clear();
    }

    const double half_cns = 0.5 * normalization_constant(order);

    // collect entries with canonical (min, max) keys; a pair lands either in
    // the dense row of its smaller dof, or (when only the larger dof is
    // interior-adjacent) in that row's lower-triangular columns
    std::vector<Eigen::Triplet<double>> trips;
    double max_abs = 0.0;
    std::vector<std::pair<std::pair<int, int>, double>> entries;
    for (int i = 0; i < n; ++i) {
        if (row_slot[i] < 0) continue;
        const auto& row = dense[row_slot[i]];
        for (int j = 0; j < n; ++j)
            if (row[j] != 0.0) {
                double v = half_cns * row[j];
                entries.push_back({{std::min(i, j), std::max(i, j)}, v});
                max_abs = std::max(max_abs, std::abs(v));
            }
    }
    for (const auto& [key, val] : rest) {
        int i = static_cast<int>(key >> 32), j = static_cast<int>(key & 0xffffffffu);
        double v = half_cns * val;
        entries.push_back({{i, j}, v});
        max_abs = std::max(max_abs, std::abs(v));
    }

    // analytic far-field tail: the zero-extension beyond the truncation
    // radius contributes C_{N,s} int_Omega u v rho dx, a rho-weighted mass
    // over the interior cells (diagonal entries match tail_integral)
    if (tail == TailPolicy::Analytic) {
        double lo = mesh.nodes.row(0).minCoeff();
        double hi = mesh.nodes.row(0).maxCoeff();
        double R = 0.0;
        if (mesh.dim == 2)
            for (int i = 0; i < n; ++i) R = std::max(R, mesh.node(i).norm());
        const QuadratureRule rule = reference_rule(mesh.dim, 4);
        std::map<std::pair<int, int>, double> tail_entries;
        for (int c = 0; c < nc; ++c) {
            if (!interior_cell[c]) continue;
            const Eigen::Vector2d v0 = mesh.node(mesh.cells(0, c));
            const Eigen::Vector2d v1 = mesh.node(mesh.cells(1, c));
            const Eigen::Vector2d v2 = mesh.dim == 2 ? mesh.node(mesh.cells(2, c)) : Eigen::Vector2d::Zero();
            const double meas = mesh.cell_measure(c);
            for (int q = 0; q < rule.size(); ++q) {
                Eigen::Vector2d x;
                double lam[3] = {0, 0, 0};
                double w;
                if (mesh.dim == 1) {
                    double t = rule.points(0, q);
                    x = v0 + t * (v1 - v0);
                    lam[0] = 1.0 - t;
                    lam[1] = t;
                    w = rule.weights[q] * meas;
                } else {
                    double a = rule.points(0, q), b = rule.points(1, q);
                    x = v0 + a * (v1 - v0) + b * (v2 - v0);
                    lam[0] = 1.0 - a - b;
                    lam[1] = a;
                    lam[2] = b;
                    w = rule.weights[q] * 2.0 * meas;
                }
                double rho = mesh.dim == 1 ? tail_density_1d(x.x(), lo, hi, order.s)
                                           : tail_density_disk(x.norm(), R, order.s);
                for (int a2 = 0; a2 <= mesh.dim; ++a2)
                    for (int b2 = a2; b2 <= mesh.dim; ++b2) {
                        int i = mesh.cells(a2, c), j = mesh.cells(b2, c);
                        tail_entries[{std::min(i, j), std::max(i, j)}] += w * rho * lam[a2] * lam[b2];
                    }
            }
        }
        for (const auto& [ij, raw] : tail_entries) {
            double v = half_cns * 2.0 * raw;
            entries.push_back({ij, v});
            max_abs = std::max(max_abs, std::abs(v));
        }
    }

    const double drop = options.drop_tol * max_abs;
    trips.reserve(entries.size() * 2);
    for (const auto& [ij, v] : entries) {
        if (std::abs(v) < drop) continue;
        trips.emplace_back(ij.first, ij.second, v);
        if (ij.first != ij.second) trips.emplace_back(ij.second, ij.first, v);
    }
    SparseMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

namespace {

SparseMat assemble_mass_impl(const Mesh& mesh, const CoefficientField* kappa, Region only,
                             bool all_regions) {
    const int n = mesh.num_nodes();
    const QuadratureRule rule = reference_rule(mesh.dim, 4);
    std::vector<Eigen::Triplet<double>> trips;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (!all_regions) {
            if (kappa) {
                if (mesh.cell_region[c] == Region::Interior) continue;
            } else if (mesh.cell_region[c] != only) {
                continue;
            }
        }
        Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
        for_cell_quadrature(mesh, c, rule, [&](const Vec2&, const Eigen::Vector3d& lambda, double w) {
            double kv = kappa ? kappa_at(*kappa, mesh, c, lambda) : 1.0;
            for (int i = 0; i <= mesh.dim; ++i)
                for (int j = 0; j <= mesh.dim; ++j) local(i, j) += w * kv * lambda[i] * lambda[j];
        });
        for (int i = 0; i <= mesh.dim; ++i)
            for (int j = 0; j <= mesh.dim; ++j)
                if (local(i, j) != 0.0)
                    trips.emplace_back(mesh.cells(i, c), mesh.cells(j, c), local(i, j));
    }
    SparseMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

} // namespace

SparseMat assemble_exterior_mass(const Mesh& mesh, const CoefficientField& kappa) {
    kappa.validate(mesh);
    return assemble_mass_impl(mesh, &kappa, Region::Exterior, false);
}

SparseMat assemble_region_mass(const Mesh& mesh, Region region) {
    return assemble_mass_impl(mesh, nullptr, region, false);
}

SparseMat assemble_full_mass(const Mesh& mesh) {
    return assemble_mass_impl(mesh, nullptr, Region::Interior, true);
}

Eigen::VectorXd assemble_interior_load(const Mesh& mesh,
                                       const std::function<double(const Eigen::Vector2d&)>& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
    const QuadratureRule rule = reference_rule(mesh.dim, 4);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (mesh.cell_region[c] != Region::Interior) continue;
        for_cell_quadrature(mesh, c, rule, [&](const Vec2& x, const Eigen::Vector3d& lambda, double w) {
            double fv = f(x);
            for (int k = 0; k <= mesh.dim; ++k) b[mesh.cells(k, c)] += w * fv * lambda[k];
        });
    }
    return b;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const std::function<double(const Eigen::Vector2d&)>& f,
                              const CoefficientField& kappa, const Eigen::VectorXd& z_nodal) {
    if (z_nodal.size() != mesh.num_nodes()) throw std::invalid_argument("assemble_load: z size mismatch");
    Eigen::VectorXd b = assemble_interior_load(mesh, f);
    SparseMat M = assemble_exterior_mass(mesh, kappa);
    b += M * z_nodal;
    return b;
}

Eigen::VectorXd eval_interaction(const Mesh& mesh, const FemFunction& u, const FractionalOrder& order,
                                 const std::vector<Eigen::Vector2d>& points) {
    if (u.mesh != &mesh) throw std::invalid_argument("eval_interaction: function not on this mesh");
    const double cns = normalization_constant(order);
    const double exponent = -0.5 * order.exponent();

    std::vector<int> interior_cells;
    for (int c = 0; c < mesh.num_cells(); ++c)
        if (mesh.cell_region[c] == Region::Interior) interior_cells.push_back(c);

    Eigen::VectorXd out(points.size());
    const QuadratureRule far_rule = reference_rule(mesh.dim, 4);
    const QuadratureRule near_rule = reference_rule(mesh.dim, 8);

    for (size_t p = 0; p < points.size(); ++p) {
        const Vec2 x = points[p];
        // admissibility: outside the observation closure, at least one local
        // cell size away from its boundary
        double dist = std::numeric_limits<double>::max();
        double near_h = 0.0;
        for (int c : interior_cells) {
            double d = point_cell_distance(mesh, c, x);
            if (d < dist) {
                dist = d;
                near_h = mesh.cell_diameter(c);
            }
        }
        if (dist <= 0.0)
            throw std::invalid_argument("eval_interaction: point inside the observation domain");
        if (dist < near_h)
            throw std::invalid_argument("eval_interaction: point too close to the observation boundary");

        const double ux = u.eval(x);
        double acc = 0.0;
        for (int c : interior_cells) {
            double ratio = point_cell_distance(mesh, c, x) / mesh.cell_diameter(c);
            const QuadratureRule& rule = ratio > 4.0 ? far_rule : near_rule;
            for_cell_quadrature(mesh, c, rule, [&](const Vec2& y, const Eigen::Vector3d& lambda, double w) {
                double uy = 0.0;
                for (int k = 0; k <= mesh.dim; ++k) uy += lambda[k] * u.values[mesh.cells(k, c)];
                acc += w * (ux - uy) * std::pow((x - y).squaredNorm(), exponent);
            });
        }
        out[static_cast<int>(p)] = cns * acc;
    }
    return out;
}

double l2_norm(const Mesh& mesh, Region region, const Eigen::VectorXd& u_nodal) {
    return l2_error(mesh, region, u_nodal, [](const Vec2&) { return 0.0; });
}

double l2_error(const Mesh& mesh, Region region, const Eigen::VectorXd& u_nodal,
                const std::function<double(const Eigen::Vector2d&)>& reference) {
    if (u_nodal.size() != mesh.num_nodes()) throw std::invalid_argument("l2_error: size mismatch");
    const QuadratureRule rule = reference_rule(mesh.dim, 4);
    double acc = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (mesh.cell_region[c] != region) continue;
        for_cell_quadrature(mesh, c, rule, [&](const Vec2& x, const Eigen::Vector3d& lambda, double w) {
            double uh = 0.0;
            for (int k = 0; k <= mesh.dim; ++k) uh += lambda[k] * u_nodal[mesh.cells(k, c)];
            double d = uh - reference(x);
            acc += w * d * d;
        });
    }
    return std::sqrt(acc);
}

} // namespace fracext
