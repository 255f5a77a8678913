#include "fracext/kernel.hpp"

#include "fracext/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracext {

FractionalOrder::FractionalOrder(double s_, int dim_) : s(s_), dim(dim_) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("FractionalOrder: s must lie in (0,1)");
    if (dim != 1 && dim != 2) throw std::invalid_argument("FractionalOrder: dim must be 1 or 2");
}

double normalization_constant(const FractionalOrder& order) {
    const double s = order.s;
    const double N = order.dim;
    return s * std::pow(2.0, 2.0 * s) * std::tgamma(0.5 * (2.0 * s + N)) /
           (std::pow(M_PI, 0.5 * N) * std::tgamma(1.0 - s));
}

double tail_density_1d(double x, double lo, double hi, double s) {
    if (!(x > lo && x < hi)) throw std::invalid_argument("tail_density_1d: point outside the truncation interval");
    return (std::pow(hi - x, -2.0 * s) + std::pow(x - lo, -2.0 * s)) / (2.0 * s);
}

// Gegenbauer expansion of |x-y|^{-2-2s} integrated over angle and radius:
//   rho(r) = 2 pi R^{-2s} sum_m [ ((1+s)_m / m!)^2 ] (r/R)^{2m} / (2s + 2m).
double tail_density_disk(double r, double R, double s) {
    if (!(r >= 0.0 && r < R)) throw std::invalid_argument("tail_density_disk: need 0 <= r < R");
    double q = (r / R) * (r / R);
    if (q > 0.9025)  // r/R > 0.95: series too slow, support too close to the boundary
        throw std::invalid_argument("tail_density_disk: point too close to the truncation circle");
    double coeff = 1.0;  // ((1+s)_m / m!)^2 at m = 0
    double qpow = 1.0;
    double sum = 0.0;
    for (int m = 0; m < 400; ++m) {
        double term = coeff * qpow / (2.0 * s + 2.0 * m);
        sum += term;
        if (term < 1e-16 * sum && m > 2) break;
        double ratio = (1.0 + s + m) / (m + 1.0);
        coeff *= ratio * ratio;
        qpow *= q;
    }
    return 2.0 * M_PI * std::pow(R, -2.0 * s) * sum;
}

double tail_integral(const Mesh& mesh, int node, const FractionalOrder& order, TailPolicy policy) {
    if (policy == TailPolicy::None) return 0.0;
    if (node < 0 || node >= mesh.num_nodes()) throw std::invalid_argument("tail_integral: node out of range");

    // truncation geometry recovered from the mesh hull
    double lo = mesh.nodes.row(0).minCoeff();
    double hi = mesh.nodes.row(0).maxCoeff();
    double R = 0.0;
    if (mesh.dim == 2)
        for (int i = 0; i < mesh.num_nodes(); ++i) R = std::max(R, mesh.node(i).norm());

    const QuadratureRule rule = reference_rule(mesh.dim, 4);
    double total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        int local = -1;
        for (int k = 0; k <= mesh.dim; ++k)
            if (mesh.cells(k, c) == node) local = k;
        if (local < 0) continue;
        // support must stay clear of the truncation boundary
        for (int k = 0; k <= mesh.dim; ++k) {
            Eigen::Vector2d p = mesh.node(mesh.cells(k, c));
            bool on_boundary = (mesh.dim == 1)
                                   ? (p.x() <= lo + 1e-12 || p.x() >= hi - 1e-12)
                                   : (p.norm() >= R - 1e-9);
            if (on_boundary)
                throw std::invalid_argument("tail_integral: basis support touches the truncation boundary");
        }
        const Eigen::Vector2d v0 = mesh.node(mesh.cells(0, c));
        double meas = mesh.cell_measure(c);
        for (int q = 0; q < rule.size(); ++q) {
            Eigen::Vector2d x;
            double phi;
            if (mesh.dim == 1) {
                double t = rule.points(0, q);
                const Eigen::Vector2d v1 = mesh.node(mesh.cells(1, c));
                x = v0 + t * (v1 - v0);
                phi = (local == 0) ? 1.0 - t : t;
            } else {
                double a = rule.points(0, q), b = rule.points(1, q);
                const Eigen::Vector2d v1 = mesh.node(mesh.cells(1, c));
                const Eigen::Vector2d v2 = mesh.node(mesh.cells(2, c));
                x = v0 + a * (v1 - v0) + b * (v2 - v0);
                phi = (local == 0) ? 1.0 - a - b : (local == 1 ? a : b);
            }
            double rho = (mesh.dim == 1) ? tail_density_1d(x.x(), lo, hi, order.s)
                                         : tail_density_disk(x.norm(), R, order.s);
            // rule weights sum to the reference measure; scale to the cell
            double scale = (mesh.dim == 1) ? meas : 2.0 * meas;
            total += scale * rule.weights[q] * phi * phi * rho;
        }
    }
    return 2.0 * total;
}

} // namespace fracext
