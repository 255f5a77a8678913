#include "fracext/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fracext {

namespace {

// Newton iteration on Legendre polynomials; nodes on [-1,1] then mapped.
void compute_gauss(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const double eps = 1e-15;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < eps) break;
        }
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        double wi = 1.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

std::map<int, std::pair<std::vector<double>, std::vector<double>>> g_gauss_cache;
std::mutex g_gauss_mutex;

struct TriOrbit {
    double weight;  // normalized so all weights sum to 1
    double a, b;    // barycentric seeds; nperm 1, 3 or 6
    int nperm;
};

void push_orbit(const TriOrbit& o, std::vector<Eigen::Vector2d>& pts, std::vector<double>& ws) {
    auto add = [&](double l1, double l2, double l3) {
        // reference coordinates (x,y) with barycentric (l1, l2, l3) = (1-x-y, x, y)
        pts.emplace_back(l2, l3);
        ws.push_back(o.weight);
        (void)l1;
    };
    if (o.nperm == 1) {
        add(o.a, o.a, o.a);
    } else if (o.nperm == 3) {
        double c = 1.0 - 2.0 * o.a;
        add(o.a, o.a, c);
        add(o.a, c, o.a);
        add(c, o.a, o.a);
    } else {
        double c = 1.0 - o.a - o.b;
        add(o.a, o.b, c);
        add(o.a, c, o.b);
        add(o.b, o.a, c);
        add(o.b, c, o.a);
        add(c, o.a, o.b);
        add(c, o.b, o.a);
    }
}

QuadratureRule build_triangle(const std::vector<TriOrbit>& orbits, int degree) {
    std::vector<Eigen::Vector2d> pts;
    std::vector<double> ws;
    for (const auto& o : orbits) push_orbit(o, pts, ws);
    double sum = 0.0;
    for (double v : ws) sum += v;
    QuadratureRule rule;
    rule.points.resize(2, static_cast<int>(pts.size()));
    rule.weights.resize(static_cast<int>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) {
        rule.points.col(static_cast<int>(i)) = pts[i];
        // renormalize to the reference-triangle measure 1/2
        rule.weights[static_cast<int>(i)] = 0.5 * ws[i] / sum;
    }
    rule.exactness_degree = degree;
    return rule;
}

} // namespace

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
    std::lock_guard<std::mutex> lock(g_gauss_mutex);
    auto it = g_gauss_cache.find(n);
    if (it == g_gauss_cache.end()) {
        std::vector<double> xx, ww;
        compute_gauss(n, xx, ww);
        it = g_gauss_cache.emplace(n, std::make_pair(std::move(xx), std::move(ww))).first;
    }
    x = it->second.first;
    w = it->second.second;
}

QuadratureRule gauss_legendre(int n) {
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    QuadratureRule rule;
    rule.points.resize(1, n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points(0, i) = x[i];
        rule.weights[i] = w[i];
    }
    rule.exactness_degree = 2 * n - 1;
    return rule;
}

QuadratureRule triangle_rule(int degree) {
    if (degree <= 2) {
        return build_triangle({{1.0 / 3.0, 1.0 / 6.0, 0.0, 3}}, 2);
    }
    if (degree <= 4) {
        // Dunavant degree 4, 6 points
        return build_triangle({{0.223381589678011, 0.445948490915965, 0.0, 3},
                               {0.109951743655322, 0.091576213509771, 0.0, 3}},
                              4);
    }
    if (degree <= 5) {
        // degree 5, 7 points
        return build_triangle({{0.225, 1.0 / 3.0, 0.0, 1},
                               {0.132394152788506, 0.470142064105115, 0.0, 3},
                               {0.125939180544827, 0.101286507323456, 0.0, 3}},
                              5);
    }
    if (degree <= 8) {
        // Dunavant degree 8, 16 points
        return build_triangle({{0.144315607677787, 1.0 / 3.0, 0.0, 1},
                               {0.095091634413923, 0.459292588292723, 0.0, 3},
                               {0.103217370534718, 0.170569307751760, 0.0, 3},
                               {0.032458497623198, 0.050547228317031, 0.0, 3},
                               {0.027230314174435, 0.263112829634638, 0.728492392955404, 6}},
                              8);
    }
    throw std::invalid_argument("triangle_rule: unsupported degree");
}

QuadratureRule reference_rule(int dim, int degree) {
    if (dim == 1) return gauss_legendre((degree + 2) / 2);
    if (dim == 2) return triangle_rule(degree);
    throw std::invalid_argument("reference_rule: dim must be 1 or 2");
}

} // namespace fracext
