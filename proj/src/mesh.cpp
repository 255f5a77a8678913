#include "fracext/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fracext {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MeshBuilder {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> tris;  // 1D cells use first two entries
    std::vector<Region> regions;

    int add_node(const Eigen::Vector2d& p) {
        nodes.push_back(p);
        return static_cast<int>(nodes.size()) - 1;
    }
    void add_tri(int a, int b, int c, Region r) {
        tris.push_back({a, b, c});
        regions.push_back(r);
    }

    Mesh finish(int dim) const {
        Mesh m;
        m.dim = dim;
        m.nodes.resize(2, static_cast<int>(nodes.size()));
        for (size_t i = 0; i < nodes.size(); ++i) m.nodes.col(static_cast<int>(i)) = nodes[i];
        m.cells.resize(dim + 1, static_cast<int>(tris.size()));
        for (size_t c = 0; c < tris.size(); ++c)
            for (int k = 0; k <= dim; ++k) m.cells(k, static_cast<int>(c)) = tris[c][k];
        m.cell_region = regions;
        m.validate();
        return m;
    }
};

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Mesh generate_interval(const IntervalInInterval& g, double h) {
    if (!(g.outer_lo < g.omega_lo && g.omega_hi < g.outer_hi))
        throw std::invalid_argument("generate: truncation interval must strictly contain the observation interval");
    if (!(g.omega_lo < g.omega_hi))
        throw std::invalid_argument("generate: empty observation interval");

    std::vector<double> breaks = {g.outer_lo, g.omega_lo, g.omega_hi, g.outer_hi};
    if (g.control) {
        auto [c0, c1] = *g.control;
        if (!(c0 < c1)) throw std::invalid_argument("generate: empty control interval");
        bool in_exterior = (c1 <= g.omega_lo && c0 >= g.outer_lo) || (c0 >= g.omega_hi && c1 <= g.outer_hi);
        if (!in_exterior)
            throw std::invalid_argument("generate: control support must not meet the closed observation interval");
        breaks.push_back(c0);
        breaks.push_back(c1);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    MeshBuilder b;
    std::vector<double> xs;
    xs.push_back(breaks.front());
    for (size_t k = 0; k + 1 < breaks.size(); ++k) {
        double len = breaks[k + 1] - breaks[k];
        int parts = std::max(1, static_cast<int>(std::lround(len / h)));
        for (int i = 1; i <= parts; ++i) xs.push_back(breaks[k] + len * i / parts);
    }
    for (double x : xs) b.add_node({x, 0.0});
    auto tag_of = [&](double mid) {
        if (mid > g.omega_lo && mid < g.omega_hi) return Region::Interior;
        if (g.control && mid > g.control->first && mid < g.control->second) return Region::ControlSupport;
        return Region::Exterior;
    };
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        b.add_tri(static_cast<int>(i), static_cast<int>(i + 1), -1, tag_of(0.5 * (xs[i] + xs[i + 1])));
    return b.finish(1);
}

// Triangulates the annulus between two concentric closed node loops by a
// two-pointer sweep over their angular parameters.
void sweep_annulus(MeshBuilder& b, const std::vector<int>& inner, const std::vector<int>& outer,
                   const std::vector<double>& inner_angle, const std::vector<double>& outer_angle,
                   Region region_hint, const std::function<Region(const Eigen::Vector2d&)>& classify) {
    const int m = static_cast<int>(inner.size());
    const int M = static_cast<int>(outer.size());
    int i = 0, j = 0;
    auto next_angle = [](const std::vector<double>& a, int k) {
        return k + 1 < static_cast<int>(a.size()) ? a[k + 1] : a[0] + 2.0 * kPi;
    };
    auto emit = [&](int v0, int v1, int v2) {
        Eigen::Vector2d c = (b.nodes[v0] + b.nodes[v1] + b.nodes[v2]) / 3.0;
        Region r = classify ? classify(c) : region_hint;
        if (signed_area(b.nodes[v0], b.nodes[v1], b.nodes[v2]) < 0.0)
            b.add_tri(v0, v2, v1, r);
        else
            b.add_tri(v0, v1, v2, r);
    };
    while (i < m || j < M) {
        bool advance_inner;
        if (i == m) advance_inner = false;
        else if (j == M) advance_inner = true;
        else advance_inner = next_angle(inner_angle, i) <= next_angle(outer_angle, j);
        if (advance_inner) {
            emit(inner[i], outer[j % M], inner[(i + 1) % m]);
            ++i;
        } else {
            emit(inner[i % m], outer[j], outer[(j + 1) % M]);
            ++j;
        }
    }
}

Mesh generate_disk(const DiskInDisk& g, double h) {
    if (!(g.R > g.r)) throw std::invalid_argument("generate: outer radius must exceed the observation radius");
    if (!(g.r > 0)) throw std::invalid_argument("generate: observation radius must be positive");
    std::vector<double> mandatory = {0.0, g.r, g.R};
    if (g.control_annulus) {
        auto [a0, a1] = *g.control_annulus;
        if (!(a0 < a1) || a0 <= g.r || a1 >= g.R)
            throw std::invalid_argument("generate: control annulus must lie strictly between the two circles");
        mandatory.push_back(a0);
        mandatory.push_back(a1);
    }
    std::sort(mandatory.begin(), mandatory.end());

    std::vector<double> radii;  // excludes 0
    for (size_t k = 0; k + 1 < mandatory.size(); ++k) {
        double len = mandatory[k + 1] - mandatory[k];
        int parts = std::max(1, static_cast<int>(std::lround(len / h)));
        for (int i = 1; i <= parts; ++i) radii.push_back(mandatory[k] + len * i / parts);
    }

    MeshBuilder b;
    int center = b.add_node({0.0, 0.0});
    auto tag_of = [&](const Eigen::Vector2d& c) {
        double rho = c.norm();
        if (rho < g.r) return Region::Interior;
        if (g.control_annulus && rho > g.control_annulus->first && rho < g.control_annulus->second)
            return Region::ControlSupport;
        return Region::Exterior;
    };

    std::vector<int> prev_ring;
    std::vector<double> prev_angle;
    for (size_t k = 0; k < radii.size(); ++k) {
        double rho = radii[k];
        int m = std::max(6, static_cast<int>(std::lround(2.0 * kPi * rho / h)));
        std::vector<int> ring(m);
        std::vector<double> angle(m);
        for (int j = 0; j < m; ++j) {
            double th = 2.0 * kPi * j / m;
            angle[j] = th;
            ring[j] = b.add_node({rho * std::cos(th), rho * std::sin(th)});
        }
        if (k == 0) {
            for (int j = 0; j < m; ++j) {
                int v1 = ring[j], v2 = ring[(j + 1) % m];
                Eigen::Vector2d c = (b.nodes[center] + b.nodes[v1] + b.nodes[v2]) / 3.0;
                b.add_tri(center, v1, v2, tag_of(c));
            }
        } else {
            sweep_annulus(b, prev_ring, ring, prev_angle, angle, Region::Exterior, tag_of);
        }
        prev_ring = std::move(ring);
        prev_angle = std::move(angle);
    }
    return b.finish(2);
}

// Rectilinear grid core plus blended loops out to the truncation circle.
// All rectangle edges fall on grid lines, so region alignment is exact.
Mesh generate_grid_in_disk(double R, double L, double base_unit,
                           const std::function<bool(const Eigen::Vector2d&)>& in_omega,
                           const Eigen::Vector4d& control, double h) {
    if (!(R > L * std::sqrt(2.0)))
        throw std::invalid_argument("generate: truncation circle must strictly contain the grid box");
    if (!(control[0] < control[2] && control[1] < control[3]))
        throw std::invalid_argument("generate: empty control rectangle");
    auto on_unit = [&](double v) { return std::abs(v / base_unit - std::lround(v / base_unit)) < 1e-9; };
    for (int k = 0; k < 4; ++k)
        if (!on_unit(control[k])) throw std::invalid_argument("generate: control rectangle must align with the base grid unit");
    if (!on_unit(L)) throw std::invalid_argument("generate: grid extent must align with the base grid unit");

    auto in_control = [&](const Eigen::Vector2d& p) {
        return p.x() > control[0] && p.x() < control[2] && p.y() > control[1] && p.y() < control[3];
    };

    // a control cell must not touch the observation region
    const double pitch = base_unit / std::max(1, static_cast<int>(std::ceil(base_unit / h)));
    const int n = static_cast<int>(std::lround(2.0 * L / pitch));

    MeshBuilder b;
    std::vector<int> grid_id(static_cast<size_t>(n + 1) * (n + 1));
    auto gid = [&](int i, int j) -> int& { return grid_id[static_cast<size_t>(j) * (n + 1) + i]; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            gid(i, j) = b.add_node({-L + pitch * i, -L + pitch * j});

    auto classify = [&](const Eigen::Vector2d& c) {
        if (in_omega(c)) return Region::Interior;
        if (in_control(c)) return Region::ControlSupport;
        return Region::Exterior;
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int v00 = gid(i, j), v10 = gid(i + 1, j), v01 = gid(i, j + 1), v11 = gid(i + 1, j + 1);
            auto add = [&](int a, int bb, int c) {
                Eigen::Vector2d ctr = (b.nodes[a] + b.nodes[bb] + b.nodes[c]) / 3.0;
                b.add_tri(a, bb, c, classify(ctr));
            };
            if ((i + j) % 2 == 0) {
                add(v00, v10, v11);
                add(v00, v11, v01);
            } else {
                add(v00, v10, v01);
                add(v10, v11, v01);
            }
        }
    }
    // sanity: control rectangle must lie in the exterior
    for (size_t c = 0; c < b.tris.size(); ++c) {
        if (b.regions[c] != Region::ControlSupport) continue;
        Eigen::Vector2d ctr = (b.nodes[b.tris[c][0]] + b.nodes[b.tris[c][1]] + b.nodes[b.tris[c][2]]) / 3.0;
        if (in_omega(ctr))
            throw std::invalid_argument("generate: control support overlaps the observation region");
    }
    for (int k = 0; k < 4; ++k) {
        double x = (k < 2) ? control[0] : control[2];
        double y = (k % 2 == 0) ? control[1] : control[3];
        if (in_omega({x, y}))
            throw std::invalid_argument("generate: control support overlaps the observation region");
    }

    // grid boundary loop, counter-clockwise from (-L,-L)
    std::vector<int> loop;
    for (int i = 0; i < n; ++i) loop.push_back(gid(i, 0));
    for (int j = 0; j < n; ++j) loop.push_back(gid(n, j));
    for (int i = n; i > 0; --i) loop.push_back(gid(i, n));
    for (int j = n; j > 0; --j) loop.push_back(gid(0, j));

    const int nb = static_cast<int>(loop.size());
    std::vector<double> theta(nb);
    for (int i = 0; i < nb; ++i) theta[i] = std::atan2(b.nodes[loop[i]].y(), b.nodes[loop[i]].x());

    const int layers = std::max(1, static_cast<int>(std::lround((R - L) / h)));
    std::vector<int> prev = loop;
    for (int k = 1; k <= layers; ++k) {
        double t = static_cast<double>(k) / layers;
        std::vector<int> cur(nb);
        for (int i = 0; i < nb; ++i) {
            Eigen::Vector2d ring_pt(R * std::cos(theta[i]), R * std::sin(theta[i]));
            cur[i] = b.add_node((1.0 - t) * b.nodes[loop[i]] + t * ring_pt);
        }
        for (int i = 0; i < nb; ++i) {
            int i2 = (i + 1) % nb;
            auto add = [&](int u, int v, int w2) {
                if (signed_area(b.nodes[u], b.nodes[v], b.nodes[w2]) < 0.0)
                    b.add_tri(u, w2, v, Region::Exterior);
                else
                    b.add_tri(u, v, w2, Region::Exterior);
            };
            add(prev[i], prev[i2], cur[i2]);
            add(prev[i], cur[i2], cur[i]);
        }
        prev = std::move(cur);
    }
    return b.finish(2);
}

Mesh generate_square_in_disk(const SquareInDisk& g, double h) {
    if (!(g.R > g.grid_extent * std::sqrt(2.0)))
        throw std::invalid_argument("generate: truncation circle too small for the grid box");
    if (!(g.grid_extent > g.half_width))
        throw std::invalid_argument("generate: grid box must contain the observation square");
    double w = g.half_width;
    auto in_omega = [w](const Eigen::Vector2d& p) {
        return std::abs(p.x()) < w && std::abs(p.y()) < w;
    };
    if (!(g.control[0] >= w || g.control[2] <= -w || g.control[1] >= w || g.control[3] <= -w))
        throw std::invalid_argument("generate: control support overlaps the observation square");
    return generate_grid_in_disk(g.R, g.grid_extent, 0.1, in_omega, g.control, h);
}

// Blocky letter M built from axis-aligned rectangles on multiples of 0.06.
bool in_mshape(const Eigen::Vector2d& p) {
    auto in_rect = [&](double x0, double y0, double x1, double y1) {
        return p.x() > x0 && p.x() < x1 && p.y() > y0 && p.y() < y1;
    };
    return in_rect(-0.30, -0.18, -0.18, 0.18) ||  // left stem
           in_rect(0.18, -0.18, 0.30, 0.18) ||    // right stem
           in_rect(-0.18, 0.00, -0.06, 0.12) ||   // left shoulder
           in_rect(0.06, 0.00, 0.18, 0.12) ||     // right shoulder
           in_rect(-0.06, -0.06, 0.06, 0.06);     // center dip
}

Mesh generate_mshape(const MShapeInDisk& g, double h) {
    return generate_grid_in_disk(g.R, g.grid_extent, 0.06, in_mshape, g.control, h);
}

} // namespace

GeometrySpec GeometrySpec::make_interval(IntervalInInterval g) {
    GeometrySpec s;
    s.kind = Kind::Interval;
    s.interval = g;
    return s;
}
GeometrySpec GeometrySpec::make_disk(DiskInDisk g) {
    GeometrySpec s;
    s.kind = Kind::Disk;
    s.disk = g;
    return s;
}
GeometrySpec GeometrySpec::make_square_in_disk(SquareInDisk g) {
    GeometrySpec s;
    s.kind = Kind::SquareInDisk;
    s.square = g;
    return s;
}
GeometrySpec GeometrySpec::make_mshape(MShapeInDisk g) {
    GeometrySpec s;
    s.kind = Kind::MShape;
    s.mshape = g;
    return s;
}

Eigen::Vector2d Mesh::centroid(int cell) const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int k = 0; k <= dim; ++k) c += nodes.col(cells(k, cell));
    return c / (dim + 1);
}

double Mesh::cell_measure(int cell) const {
    if (dim == 1) return std::abs(nodes(0, cells(1, cell)) - nodes(0, cells(0, cell)));
    return std::abs(signed_area(nodes.col(cells(0, cell)), nodes.col(cells(1, cell)), nodes.col(cells(2, cell))));
}

double Mesh::cell_diameter(int cell) const {
    double d = 0.0;
    for (int a = 0; a <= dim; ++a)
        for (int bb = a + 1; bb <= dim; ++bb)
            d = std::max(d, (nodes.col(cells(a, cell)) - nodes.col(cells(bb, cell))).norm());
    return d;
}

double Mesh::region_measure(Region r) const {
    double s = 0.0;
    for (int c = 0; c < num_cells(); ++c)
        if (cell_region[c] == r) s += cell_measure(c);
    return s;
}

double Mesh::quasi_uniformity_ratio() const {
    double lo = std::numeric_limits<double>::max(), hi = 0.0;
    for (int c = 0; c < num_cells(); ++c) {
        double d = cell_diameter(c);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi / lo;
}

void Mesh::validate() const {
    if (dim != 1 && dim != 2) throw std::runtime_error("mesh: dim must be 1 or 2");
    const int nn = num_nodes(), nc = num_cells();
    if (static_cast<int>(cell_region.size()) != nc) throw std::runtime_error("mesh: region tags missing");
    for (int c = 0; c < nc; ++c) {
        for (int k = 0; k <= dim; ++k) {
            int v = cells(k, c);
            if (v < 0 || v >= nn) throw std::runtime_error("mesh: vertex index out of range");
            for (int l = k + 1; l <= dim; ++l)
                if (cells(l, c) == v) throw std::runtime_error("mesh: repeated vertex in cell");
        }
        double meas = cell_measure(c);
        double diam = cell_diameter(c);
        if (!(meas > 1e-14 * std::pow(diam, dim))) throw std::runtime_error("mesh: degenerate cell");
        if (dim == 2) {
            double sa = signed_area(nodes.col(cells(0, c)), nodes.col(cells(1, c)), nodes.col(cells(2, c)));
            if (sa <= 0.0) throw std::runtime_error("mesh: cell not counter-clockwise");
        }
    }
    // duplicate nodes
    {
        std::map<std::pair<long long, long long>, int> seen;
        for (int i = 0; i < nn; ++i) {
            auto key = std::make_pair(static_cast<long long>(std::llround(nodes(0, i) * 1e10)),
                                      static_cast<long long>(std::llround(nodes(1, i) * 1e10)));
            if (!seen.emplace(key, i).second) throw std::runtime_error("mesh: duplicate node coordinates");
        }
    }
    if (dim == 1) {
        std::vector<std::pair<double, double>> iv;
        for (int c = 0; c < nc; ++c) {
            double a = nodes(0, cells(0, c)), bv = nodes(0, cells(1, c));
            iv.emplace_back(std::min(a, bv), std::max(a, bv));
        }
        std::sort(iv.begin(), iv.end());
        for (size_t k = 0; k + 1 < iv.size(); ++k)
            if (iv[k + 1].first < iv[k].second - 1e-14) throw std::runtime_error("mesh: overlapping 1D cells");
    } else {
        // conformity: every edge shared by at most two cells, no hanging nodes
        std::map<std::pair<int, int>, int> edge_count;
        for (int c = 0; c < nc; ++c)
            for (int k = 0; k < 3; ++k) {
                int a = cells(k, c), bb = cells((k + 1) % 3, c);
                edge_count[{std::min(a, bb), std::max(a, bb)}]++;
            }
        for (const auto& [e, cnt] : edge_count)
            if (cnt > 2) throw std::runtime_error("mesh: edge shared by more than two cells");
        // hanging nodes: a node lying strictly inside another cell's edge
        std::vector<std::vector<int>> buckets;
        double hmin = std::numeric_limits<double>::max();
        for (int c = 0; c < nc; ++c) hmin = std::min(hmin, cell_diameter(c));
        double cellsize = std::max(hmin, 1e-8);
        Eigen::Vector2d lo = nodes.rowwise().minCoeff(), hi = nodes.rowwise().maxCoeff();
        int gx = std::max(1, static_cast<int>((hi.x() - lo.x()) / cellsize) + 1);
        int gy = std::max(1, static_cast<int>((hi.y() - lo.y()) / cellsize) + 1);
        buckets.resize(static_cast<size_t>(gx) * gy);
        auto bucket_of = [&](const Eigen::Vector2d& p) {
            int ix = std::min(gx - 1, std::max(0, static_cast<int>((p.x() - lo.x()) / cellsize)));
            int iy = std::min(gy - 1, std::max(0, static_cast<int>((p.y() - lo.y()) / cellsize)));
            return static_cast<size_t>(iy) * gx + ix;
        };
        for (int i = 0; i < nn; ++i) buckets[bucket_of(nodes.col(i))].push_back(i);
        for (const auto& [e, cnt] : edge_count) {
            Eigen::Vector2d a = nodes.col(e.first), bv = nodes.col(e.second);
            Eigen::Vector2d mid = 0.5 * (a + bv);
            int ix0 = std::max(0, static_cast<int>((std::min(a.x(), bv.x()) - lo.x()) / cellsize) - 1);
            int iy0 = std::max(0, static_cast<int>((std::min(a.y(), bv.y()) - lo.y()) / cellsize) - 1);
            int ix1 = std::min(gx - 1, static_cast<int>((std::max(a.x(), bv.x()) - lo.x()) / cellsize) + 1);
            int iy1 = std::min(gy - 1, static_cast<int>((std::max(a.y(), bv.y()) - lo.y()) / cellsize) + 1);
            Eigen::Vector2d d = bv - a;
            double len2 = d.squaredNorm();
            for (int iy = iy0; iy <= iy1; ++iy)
                for (int ix = ix0; ix <= ix1; ++ix)
                    for (int idx : buckets[static_cast<size_t>(iy) * gx + ix]) {
                        if (idx == e.first || idx == e.second) continue;
                        Eigen::Vector2d p = nodes.col(idx);
                        double t = (p - a).dot(d) / len2;
                        if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
                        if ((p - (a + t * d)).norm() < 1e-10 * std::sqrt(len2))
                            throw std::runtime_error("mesh: hanging node on edge");
                    }
            (void)mid;
        }
    }
    // control support must not touch the observation closure
    {
        std::vector<char> on_interior(nn, 0);
        for (int c = 0; c < nc; ++c)
            if (cell_region[c] == Region::Interior)
                for (int k = 0; k <= dim; ++k) on_interior[cells(k, c)] = 1;
        for (int c = 0; c < nc; ++c)
            if (cell_region[c] == Region::ControlSupport)
                for (int k = 0; k <= dim; ++k)
                    if (on_interior[cells(k, c)])
                        throw std::runtime_error("mesh: control support touches the observation domain");
    }
}

Mesh generate(const GeometrySpec& geometry, double target_h) {
    if (!(target_h > 0)) throw std::invalid_argument("generate: target_h must be positive");
    switch (geometry.kind) {
        case GeometrySpec::Kind::Interval: return generate_interval(geometry.interval, target_h);
        case GeometrySpec::Kind::Disk: return generate_disk(geometry.disk, target_h);
        case GeometrySpec::Kind::SquareInDisk: return generate_square_in_disk(geometry.square, target_h);
        case GeometrySpec::Kind::MShape: return generate_mshape(geometry.mshape, target_h);
    }
    throw std::invalid_argument("generate: unknown geometry");
}

Mesh refine(const Mesh& mesh) {
    MeshBuilder b;
    for (int i = 0; i < mesh.num_nodes(); ++i) b.add_node(mesh.node(i));
    if (mesh.dim == 1) {
        for (int c = 0; c < mesh.num_cells(); ++c) {
            int v0 = mesh.cells(0, c), v1 = mesh.cells(1, c);
            int mid = b.add_node(0.5 * (mesh.node(v0) + mesh.node(v1)));
            b.add_tri(v0, mid, -1, mesh.cell_region[c]);
            b.add_tri(mid, v1, -1, mesh.cell_region[c]);
        }
        return b.finish(1);
    }
    std::map<std::pair<int, int>, int> midpoint;
    auto mid_of = [&](int a, int c) {
        auto key = std::make_pair(std::min(a, c), std::max(a, c));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int id = b.add_node(0.5 * (mesh.node(a) + mesh.node(c)));
        midpoint.emplace(key, id);
        return id;
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        int v0 = mesh.cells(0, c), v1 = mesh.cells(1, c), v2 = mesh.cells(2, c);
        int m01 = mid_of(v0, v1), m12 = mid_of(v1, v2), m02 = mid_of(v0, v2);
        Region r = mesh.cell_region[c];
        b.add_tri(v0, m01, m02, r);
        b.add_tri(m01, v1, m12, r);
        b.add_tri(m02, m12, v2, r);
        b.add_tri(m01, m12, m02, r);
    }
    return b.finish(2);
}

DofPartition partition_dofs(const Mesh& mesh) {
    const int nn = mesh.num_nodes();
    DofPartition p;
    p.is_interior.assign(nn, 0);
    p.is_exterior.assign(nn, 0);
    p.is_control.assign(nn, 0);
    p.is_interior_only.assign(nn, 0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        bool interior = mesh.cell_region[c] == Region::Interior;
        bool control = mesh.cell_region[c] == Region::ControlSupport;
        for (int k = 0; k <= mesh.dim; ++k) {
            int v = mesh.cells(k, c);
            if (interior) p.is_interior[v] = 1;
            else p.is_exterior[v] = 1;
            if (control) p.is_control[v] = 1;
        }
    }
    for (int i = 0; i < nn; ++i) {
        if (p.is_interior[i]) p.interior_dofs.push_back(i);
        if (p.is_exterior[i]) p.exterior_dofs.push_back(i);
        if (p.is_control[i]) p.control_dofs.push_back(i);
        if (p.is_interior[i] && !p.is_exterior[i]) {
            p.is_interior_only[i] = 1;
            p.interior_only_dofs.push_back(i);
        }
        if (p.is_exterior[i] && !p.is_interior[i]) p.exterior_only_dofs.push_back(i);
    }
    return p;
}

double pick_h_for_dofs(const GeometrySpec& geometry, int target_dofs) {
    if (target_dofs < 4) throw std::invalid_argument("pick_h_for_dofs: target too small");
    // node counts are staircase in h for grid-based geometries, so walk down
    // and keep the closest candidate
    double h = (geometry.kind == GeometrySpec::Kind::Interval) ? 1.0 : 0.5;
    double best_h = h;
    double best_err = std::numeric_limits<double>::max();
    for (int iter = 0; iter < 80; ++iter) {
        Mesh m = generate(geometry, h);
        double err = std::abs(std::log(static_cast<double>(m.num_nodes()) / target_dofs));
        if (err < best_err) {
            best_err = err;
            best_h = h;
        }
        if (m.num_nodes() >= target_dofs) break;
        h /= 1.18;
    }
    return best_h;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "dim " << mesh.dim << " nodes " << mesh.num_nodes() << " cells " << mesh.num_cells() << "\n";
    char buf[64];
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        for (int d = 0; d < mesh.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", mesh.nodes(d, i));
            os << (d ? " " : "") << buf;
        }
        os << "\n";
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (int k = 0; k <= mesh.dim; ++k) os << mesh.cells(k, c) << " ";
        switch (mesh.cell_region[c]) {
            case Region::Interior: os << "interior"; break;
            case Region::Exterior: os << "exterior"; break;
            case Region::ControlSupport: os << "control"; break;
        }
        os << "\n";
    }
}

Mesh read_mesh(std::istream& is) {
    std::string kw1, kw2, kw3;
    int dim = 0, nn = 0, nc = 0;
    if (!(is >> kw1 >> dim >> kw2 >> nn >> kw3 >> nc) || kw1 != "dim" || kw2 != "nodes" || kw3 != "cells")
        throw std::runtime_error("read_mesh: malformed header");
    Mesh m;
    m.dim = dim;
    m.nodes.setZero(2, nn);
    for (int i = 0; i < nn; ++i)
        for (int d = 0; d < dim; ++d)
            if (!(is >> m.nodes(d, i))) throw std::runtime_error("read_mesh: bad node line");
    m.cells.resize(dim + 1, nc);
    m.cell_region.resize(nc);
    for (int c = 0; c < nc; ++c) {
        for (int k = 0; k <= dim; ++k)
            if (!(is >> m.cells(k, c))) throw std::runtime_error("read_mesh: bad cell line");
        std::string tag;
        if (!(is >> tag)) throw std::runtime_error("read_mesh: missing region tag");
        if (tag == "interior") m.cell_region[c] = Region::Interior;
        else if (tag == "exterior") m.cell_region[c] = Region::Exterior;
        else if (tag == "control") m.cell_region[c] = Region::ControlSupport;
        else throw std::runtime_error("read_mesh: unknown region tag '" + tag + "'");
    }
    m.validate();
    return m;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_mesh_file: cannot open " + path);
    write_mesh(os, mesh);
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_mesh_file: cannot open " + path);
    return read_mesh(is);
}

} // namespace fracext
