#include "fracext/pair_integrals.hpp"

#include "fracext/quadrature.hpp"

#include <cmath>
#include <vector>

namespace fracext {

namespace {

using Vec2 = Eigen::Vector2d;
using Mat66 = Eigen::Matrix<double, 6, 6>;

// ---------------------------------------------------------------------------
// Dispatch helpers

struct PairTopology {
    std::array<int, 3> la{-1, -1, -1};  // local vertex order of cell a (shared first)
    std::array<int, 3> lb{-1, -1, -1};
    int nshared = 0;
};

PairTopology classify_pair(const Mesh& mesh, int a, int b) {
    PairTopology t;
    const int nv = mesh.dim + 1;
    std::array<int, 3> ga{}, gb{};
    for (int k = 0; k < nv; ++k) {
        ga[k] = mesh.cells(k, a);
        gb[k] = mesh.cells(k, b);
    }
    std::vector<std::pair<int, int>> shared;  // (local in a, local in b), sorted by global id
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
            if (ga[i] == gb[j]) shared.emplace_back(i, j);
    std::sort(shared.begin(), shared.end(),
              [&](const auto& p, const auto& q) { return ga[p.first] < ga[q.first]; });
    t.nshared = static_cast<int>(shared.size());
    std::array<char, 3> useda{}, usedb{};
    int pos = 0;
    for (const auto& [i, j] : shared) {
        t.la[pos] = i;
        t.lb[pos] = j;
        useda[i] = usedb[j] = 1;
        ++pos;
    }
    int pa = t.nshared, pb = t.nshared;
    for (int i = 0; i < nv; ++i)
        if (!useda[i]) t.la[pa++] = i;
    for (int j = 0; j < nv; ++j)
        if (!usedb[j]) t.lb[pb++] = j;
    return t;
}

// ---------------------------------------------------------------------------
// Disjoint pairs: tensorized rules over the two cells.

struct SideData {
    // evaluation points in physical space with weights (already scaled by the
    // cell Jacobian) and P1 hat values of the ORIGINAL cell at those points
    std::vector<Vec2> x;
    std::vector<double> w;
    std::vector<Eigen::Vector3d> lambda;
};

void fill_side_1d(const Mesh& mesh, int cell, const Vec2& a, const Vec2& b, int ngauss, SideData& out) {
    std::vector<double> gx, gw;
    gauss_legendre_01(ngauss, gx, gw);
    const Vec2 v0 = mesh.node(mesh.cells(0, cell));
    const Vec2 v1 = mesh.node(mesh.cells(1, cell));
    const double len = (b - a).norm();
    const double cell_len = (v1 - v0).norm();
    out.x.resize(gx.size());
    out.w.resize(gx.size());
    out.lambda.resize(gx.size());
    for (size_t q = 0; q < gx.size(); ++q) {
        Vec2 p = a + gx[q] * (b - a);
        double t = (p - v0).norm() / cell_len;  // barycentric of the parent cell
        out.x[q] = p;
        out.w[q] = gw[q] * len;
        out.lambda[q] = Eigen::Vector3d(1.0 - t, t, 0.0);
    }
}

void fill_side_2d(const Mesh& mesh, int cell, const Vec2& p0, const Vec2& p1, const Vec2& p2,
                  const QuadratureRule& rule, SideData& out) {
    const Vec2 v0 = mesh.node(mesh.cells(0, cell));
    const Vec2 v1 = mesh.node(mesh.cells(1, cell));
    const Vec2 v2 = mesh.node(mesh.cells(2, cell));
    Eigen::Matrix2d B;
    B.col(0) = v1 - v0;
    B.col(1) = v2 - v0;
    const Eigen::Matrix2d Binv = B.inverse();
    const double det = std::abs((p1 - p0).x() * (p2 - p0).y() - (p2 - p0).x() * (p1 - p0).y());
    const int n = rule.size();
    out.x.resize(n);
    out.w.resize(n);
    out.lambda.resize(n);
    for (int q = 0; q < n; ++q) {
        double u = rule.points(0, q), v = rule.points(1, q);
        Vec2 p = p0 + u * (p1 - p0) + v * (p2 - p0);
        Vec2 ref = Binv * (p - v0);  // barycentric w.r.t. the parent cell
        out.x[q] = p;
        out.w[q] = rule.weights[q] * det;  // weights sum to 1/2, det = 2*area factor
        out.lambda[q] = Eigen::Vector3d(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
    }
}

// Tensor-product contribution for one (sub)cell pair.  Union dof layout:
// indices 0..nv-1 belong to cell a, nv..2nv-1 to cell b (no shared nodes).
void accumulate_tensor(const SideData& A, const SideData& B, double minus_exponent, int nv,
                       Mat66& out) {
    const int na = static_cast<int>(A.x.size());
    const int nb = static_cast<int>(B.x.size());
    Eigen::Matrix3d Sa = Eigen::Matrix3d::Zero(), Sb = Eigen::Matrix3d::Zero(), C = Eigen::Matrix3d::Zero();
    std::vector<double> colsum(nb, 0.0);
    for (int q = 0; q < na; ++q) {
        double rowsum = 0.0;
        Eigen::Matrix3d cblock = Eigen::Matrix3d::Zero();
        for (int r = 0; r < nb; ++r) {
            double d2 = (A.x[q] - B.x[r]).squaredNorm();
            double k = A.w[q] * B.w[r] * std::pow(d2, minus_exponent);
            rowsum += k;
            colsum[r] += k;
            cblock += k * (A.lambda[q] * B.lambda[r].transpose());
        }
        Sa += rowsum * (A.lambda[q] * A.lambda[q].transpose());
        C += cblock;
    }
    for (int r = 0; r < nb; ++r) Sb += colsum[r] * (B.lambda[r] * B.lambda[r].transpose());
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) {
            out(i, j) += Sa(i, j);
            out(nv + i, nv + j) += Sb(i, j);
            out(i, nv + j) -= C(i, j);
            out(nv + j, i) -= C(i, j);
        }
}

double separation_ratio(const Mesh& mesh, int a, int b) {
    Vec2 ca = mesh.centroid(a), cb = mesh.centroid(b);
    double ra = 0.0, rb = 0.0;
    for (int k = 0; k <= mesh.dim; ++k) {
        ra = std::max(ra, (mesh.node(mesh.cells(k, a)) - ca).norm());
        rb = std::max(rb, (mesh.node(mesh.cells(k, b)) - cb).norm());
    }
    return (ca - cb).norm() / (ra + rb);
}

struct SubCell {
    std::array<Vec2, 3> v;
    double radius(int dim) const {
        Vec2 c = centroid(dim);
        double r = 0.0;
        for (int k = 0; k <= dim; ++k) r = std::max(r, (v[k] - c).norm());
        return r;
    }
    Vec2 centroid(int dim) const {
        Vec2 c = Vec2::Zero();
        for (int k = 0; k <= dim; ++k) c += v[k];
        return c / (dim + 1);
    }
};

void split_subcell(const SubCell& s, int dim, std::vector<SubCell>& out) {
    if (dim == 1) {
        Vec2 m = 0.5 * (s.v[0] + s.v[1]);
        out.push_back({{s.v[0], m, Vec2::Zero()}});
        out.push_back({{m, s.v[1], Vec2::Zero()}});
    } else {
        Vec2 m01 = 0.5 * (s.v[0] + s.v[1]), m12 = 0.5 * (s.v[1] + s.v[2]), m02 = 0.5 * (s.v[0] + s.v[2]);
        out.push_back({{s.v[0], m01, m02}});
        out.push_back({{m01, s.v[1], m12}});
        out.push_back({{m02, m12, s.v[2]}});
        out.push_back({{m01, m12, m02}});
    }
}

class DisjointIntegrator {
  public:
    DisjointIntegrator(const Mesh& mesh, int cell_a, int cell_b, const FractionalOrder& order,
                       const PairQuadratureConfig& cfg)
        : mesh_(mesh), a_(cell_a), b_(cell_b), cfg_(cfg),
          minus_exp_(-0.5 * order.exponent()),
          rule_far_(mesh.dim == 2 ? reference_rule(2, cfg.far_degree) : QuadratureRule{}),
          rule_mid_(mesh.dim == 2 ? reference_rule(2, cfg.mid_degree) : QuadratureRule{}) {}

    Mat66 integrate() {
        Mat66 out = Mat66::Zero();
        SubCell sa = subcell_of(a_), sb = subcell_of(b_);
        double ratio = pair_ratio(sa, sb);
        if (ratio >= cfg_.near_threshold) {
            evaluate(sa, sb, ratio >= cfg_.far_threshold, out);
            return out;
        }
        // nearly touching: adaptive subdivision with a self-consistency estimate
        Mat66 coarse = Mat66::Zero();
        evaluate(sa, sb, false, coarse);
        double scale = std::max(coarse.cwiseAbs().maxCoeff(), 1e-300);
        Mat66 fine = Mat66::Zero();
        if (!recurse(sa, sb, 0, cfg_.adaptive_tol * scale, fine))
            throw QuadratureError("pair quadrature did not converge for nearly-touching cells", a_, b_);
        out = fine;
        return out;
    }

  private:
    SubCell subcell_of(int cell) const {
        SubCell s;
        for (int k = 0; k <= mesh_.dim; ++k) s.v[k] = mesh_.node(mesh_.cells(k, cell));
        if (mesh_.dim == 1) s.v[2] = Vec2::Zero();
        return s;
    }
    double pair_ratio(const SubCell& sa, const SubCell& sb) const {
        double denom = sa.radius(mesh_.dim) + sb.radius(mesh_.dim);
        return (sa.centroid(mesh_.dim) - sb.centroid(mesh_.dim)).norm() / denom;
    }
    void evaluate(const SubCell& sa, const SubCell& sb, bool far, Mat66& out) const {
        SideData A, B;
        if (mesh_.dim == 1) {
            int n = far ? 12 : 16;
            fill_side_1d(mesh_, a_, sa.v[0], sa.v[1], n, A);
            fill_side_1d(mesh_, b_, sb.v[0], sb.v[1], n, B);
        } else {
            const QuadratureRule& rule = far ? rule_far_ : rule_mid_;
            fill_side_2d(mesh_, a_, sa.v[0], sa.v[1], sa.v[2], rule, A);
            fill_side_2d(mesh_, b_, sb.v[0], sb.v[1], sb.v[2], rule, B);
        }
        accumulate_tensor(A, B, minus_exp_, mesh_.dim + 1, out);
    }
    // returns false when the tolerance cannot be met within the depth budget
    bool recurse(const SubCell& sa, const SubCell& sb, int depth, double tol_abs, Mat66& out) const {
        double ratio = pair_ratio(sa, sb);
        if (ratio >= cfg_.near_threshold) {
            evaluate(sa, sb, ratio >= cfg_.far_threshold, out);
            return true;
        }
        Mat66 coarse = Mat66::Zero();
        evaluate(sa, sb, false, coarse);
        std::vector<SubCell> ca, cb;
        split_subcell(sa, mesh_.dim, ca);
        split_subcell(sb, mesh_.dim, cb);
        Mat66 fine = Mat66::Zero();
        for (const auto& s1 : ca)
            for (const auto& s2 : cb) {
                Mat66 part = Mat66::Zero();
                evaluate(s1, s2, pair_ratio(s1, s2) >= cfg_.far_threshold, part);
                fine += part;
            }
        double err = (fine - coarse).cwiseAbs().maxCoeff();
        if (err <= tol_abs) {
            out += fine;
            return true;
        }
        if (depth >= cfg_.adaptive_max_depth) return false;
        const double child_tol = tol_abs / (ca.size() * cb.size());
        for (const auto& s1 : ca)
            for (const auto& s2 : cb) {
                Mat66 part = Mat66::Zero();
                if (!recurse(s1, s2, depth + 1, child_tol, part)) return false;
                out += part;
            }
        return true;
    }

    const Mesh& mesh_;
    int a_, b_;
    const PairQuadratureConfig& cfg_;
    double minus_exp_;
    QuadratureRule rule_far_, rule_mid_;
};

// ---------------------------------------------------------------------------
// Touching pairs.  In relative coordinates sigma the integrand factors as
//   (alpha_i . sigma)(alpha_j . sigma) |M sigma|^{-(N+2s)} Lambda(sigma)^m
// with Lambda affine; the radial direction integrates in closed form and the
// remainder is a smooth integral over the surface {Lambda-slope = 1}.

// 1D identical cell: fully closed form.
void identical_1d(const Mesh& mesh, int cell, double s, PairLocalMatrix& out) {
    const int n0 = mesh.cells(0, cell), n1 = mesh.cells(1, cell);
    const double h = mesh.cell_measure(cell);
    out.dofs = {n0, n1, -1, -1, -1, -1};
    out.ndofs = 2;
    const double base = 2.0 * std::pow(h, 1.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    const double alpha[2] = {-1.0, 1.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.values(i, j) = alpha[i] * alpha[j] * base;
}

// 1D cells sharing one node.
void touching_1d(const Mesh& mesh, int cell_a, int cell_b, const PairTopology& top, double s,
                 const PairQuadratureConfig& cfg, PairLocalMatrix& out) {
    const int s0 = mesh.cells(top.la[0], cell_a);
    const int pa = mesh.cells(top.la[1], cell_a);
    const int pb = mesh.cells(top.lb[1], cell_b);
    const double da = mesh.nodes(0, pa) - mesh.nodes(0, s0);
    const double db = mesh.nodes(0, pb) - mesh.nodes(0, s0);
    out.dofs = {s0, pa, pb, -1, -1, -1};
    out.ndofs = 3;

    const double alpha[3][2] = {{-1.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}};
    std::vector<double> gx, gw;
    gauss_legendre_01(cfg.gauss_touch_1d, gx, gw);
    const double pref = std::abs(da) * std::abs(db) / (3.0 - 2.0 * s);
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (int seg = 0; seg < 2; ++seg) {
        for (size_t q = 0; q < gx.size(); ++q) {
            double p0 = seg == 0 ? 1.0 : gx[q];
            double p1 = seg == 0 ? gx[q] : 1.0;
            double m = std::abs(da * p0 - db * p1);
            double kern = std::pow(m, -(1.0 + 2.0 * s));
            double forms[3];
            for (int i = 0; i < 3; ++i) forms[i] = alpha[i][0] * p0 + alpha[i][1] * p1;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) acc(i, j) += gw[q] * kern * forms[i] * forms[j];
        }
    }
    out.values.topLeftCorner<3, 3>() = pref * acc;
}

// 2D identical cell: six hexagon-edge line integrals, radial part exact.
void identical_2d(const Mesh& mesh, int cell, double s, const PairQuadratureConfig& cfg,
                  PairLocalMatrix& out) {
    const int n0 = mesh.cells(0, cell), n1 = mesh.cells(1, cell), n2 = mesh.cells(2, cell);
    out.dofs = {n0, n1, n2, -1, -1, -1};
    out.ndofs = 3;
    Eigen::Matrix2d B;
    B.col(0) = mesh.node(n1) - mesh.node(n0);
    B.col(1) = mesh.node(n2) - mesh.node(n0);
    const double det2 = std::pow(std::abs(B.determinant()), 2);
    const double beta = 1.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s) * (4.0 - 2.0 * s));
    // nodal-difference forms: alpha_i . omega = phi-difference direction
    const double alpha[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    // sectors of the relative-coordinate hexagon (other three are mirror images)
    const Vec2 P[3] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 1.0}};
    const Vec2 Q[3] = {{0.0, 1.0}, {-1.0, 1.0}, {-1.0, 0.0}};

    std::vector<double> gx, gw;
    gauss_legendre_01(cfg.gauss_identical, gx, gw);
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
        for (size_t q = 0; q < gx.size(); ++q) {
            Vec2 w = (1.0 - gx[q]) * P[k] + gx[q] * Q[k];
            double ell = (k == 0) ? w.x() + w.y() : (k == 1 ? w.y() : -w.x());
            Vec2 Bw = B * w;
            double kern = std::pow(Bw.squaredNorm(), -(1.0 + s)) * std::pow(ell, 2.0 * s - 2.0);
            double forms[3];
            for (int i = 0; i < 3; ++i) forms[i] = alpha[i][0] * w.x() + alpha[i][1] * w.y();
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) acc(i, j) += gw[q] * kern * forms[i] * forms[j];
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double v = 2.0 * det2 * beta * acc(i, j);  // factor 2: mirror sectors
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
}

// 2D cells sharing an edge: four flat surface pieces.
void common_edge_2d(const Mesh& mesh, int cell_a, int cell_b, const PairTopology& top, double s,
                    const PairQuadratureConfig& cfg, PairLocalMatrix& out) {
    const int s0 = mesh.cells(top.la[0], cell_a);
    const int s1 = mesh.cells(top.la[1], cell_a);
    const int apex_a = mesh.cells(top.la[2], cell_a);
    const int apex_b = mesh.cells(top.lb[2], cell_b);
    out.dofs = {s0, s1, apex_a, apex_b, -1, -1};
    out.ndofs = 4;

    const Vec2 E = mesh.node(s1) - mesh.node(s0);
    const Vec2 av = mesh.node(apex_a) - mesh.node(s0);
    const Vec2 bv = mesh.node(apex_b) - mesh.node(s0);
    const double deta = std::abs(E.x() * av.y() - E.y() * av.x());
    const double detb = std::abs(E.x() * bv.y() - E.y() * bv.x());
    const double pref = deta * detb / ((3.0 - 2.0 * s) * (4.0 - 2.0 * s));

    // alpha_i . (w, x2, y2); nodal differences along (edge, apex_a, apex_b)
    const double alpha[4][3] = {
        {-1.0, -1.0, 1.0},  // s0
        {1.0, 0.0, 0.0},    // s1
        {0.0, 1.0, 0.0},    // apex_a
        {0.0, 0.0, -1.0},   // apex_b
    };

    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    auto add_point = [&](double p0, double p1, double p2, double weight) {
        Vec2 m = E * p0 + av * p1 - bv * p2;
        double kern = std::pow(m.squaredNorm(), -(1.0 + s));
        double forms[4];
        for (int i = 0; i < 4; ++i) forms[i] = alpha[i][0] * p0 + alpha[i][1] * p1 + alpha[i][2] * p2;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) acc(i, j) += weight * kern * forms[i] * forms[j];
    };

    std::vector<double> gx, gw;
    gauss_legendre_01(cfg.gauss_edge, gx, gw);
    const QuadratureRule tri = triangle_rule(8);
    // square piece {w + x2 = 1}
    for (size_t q = 0; q < gx.size(); ++q)
        for (size_t r = 0; r < gx.size(); ++r)
            add_point(gx[q], 1.0 - gx[q], gx[r], gw[q] * gw[r]);
    // square piece {y2 - w = 1}
    for (size_t q = 0; q < gx.size(); ++q)
        for (size_t r = 0; r < gx.size(); ++r)
            add_point(gx[r] - 1.0, gx[q], gx[r], gw[q] * gw[r]);
    // triangle piece {y2 = 1, w + x2 <= 1, w >= 0}
    for (int q = 0; q < tri.size(); ++q)
        add_point(tri.points(0, q), tri.points(1, q), 1.0, tri.weights[q]);
    // triangle piece {x2 = 1, w <= 0, y2 <= 1 + w}
    for (int q = 0; q < tri.size(); ++q)
        add_point(-tri.points(0, q), 1.0, tri.points(1, q), tri.weights[q]);

    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            double v = pref * acc(i, j);
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
}

// 2D cells sharing a vertex: two pieces, interval x reference triangle.
void common_vertex_2d(const Mesh& mesh, int cell_a, int cell_b, const PairTopology& top, double s,
                      const PairQuadratureConfig& cfg, PairLocalMatrix& out) {
    const int s0 = mesh.cells(top.la[0], cell_a);
    const int a1 = mesh.cells(top.la[1], cell_a);
    const int a2 = mesh.cells(top.la[2], cell_a);
    const int b1 = mesh.cells(top.lb[1], cell_b);
    const int b2 = mesh.cells(top.lb[2], cell_b);
    out.dofs = {s0, a1, a2, b1, b2, -1};
    out.ndofs = 5;

    Eigen::Matrix2d Ba, Bb;
    Ba.col(0) = mesh.node(a1) - mesh.node(s0);
    Ba.col(1) = mesh.node(a2) - mesh.node(s0);
    Bb.col(0) = mesh.node(b1) - mesh.node(s0);
    Bb.col(1) = mesh.node(b2) - mesh.node(s0);
    const double pref = std::abs(Ba.determinant()) * std::abs(Bb.determinant()) / (4.0 - 2.0 * s);

    const double alpha[5][4] = {
        {-1.0, -1.0, 1.0, 1.0},  // shared vertex
        {1.0, 0.0, 0.0, 0.0},    // a1
        {0.0, 1.0, 0.0, 0.0},    // a2
        {0.0, 0.0, -1.0, 0.0},   // b1
        {0.0, 0.0, 0.0, -1.0},   // b2
    };

    Eigen::Matrix<double, 5, 5> acc = Eigen::Matrix<double, 5, 5>::Zero();
    auto add_point = [&](double p0, double p1, double p2, double p3, double weight) {
        Vec2 m = Ba * Vec2(p0, p1) - Bb * Vec2(p2, p3);
        double kern = std::pow(m.squaredNorm(), -(1.0 + s));
        double forms[5];
        for (int i = 0; i < 5; ++i)
            forms[i] = alpha[i][0] * p0 + alpha[i][1] * p1 + alpha[i][2] * p2 + alpha[i][3] * p3;
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) acc(i, j) += weight * kern * forms[i] * forms[j];
    };

    std::vector<double> gx, gw;
    gauss_legendre_01(cfg.gauss_vertex, gx, gw);
    const QuadratureRule tri = triangle_rule(8);
    for (size_t q = 0; q < gx.size(); ++q)
        for (int r = 0; r < tri.size(); ++r) {
            // face {x1 + x2 = 1}
            add_point(1.0 - gx[q], gx[q], tri.points(0, r), tri.points(1, r), gw[q] * tri.weights[r]);
            // face {y1 + y2 = 1}
            add_point(tri.points(0, r), tri.points(1, r), 1.0 - gx[q], gx[q], gw[q] * tri.weights[r]);
        }

    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) {
            double v = pref * acc(i, j);
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
}

} // namespace

PairLocalMatrix pair_local_matrix(const Mesh& mesh, int cell_a, int cell_b,
                                  const FractionalOrder& order, const PairQuadratureConfig& config) {
    if (order.dim != mesh.dim) throw std::invalid_argument("pair_local_matrix: order/mesh dimension mismatch");
    if (cell_a < 0 || cell_a >= mesh.num_cells() || cell_b < 0 || cell_b >= mesh.num_cells())
        throw std::invalid_argument("pair_local_matrix: cell index out of range");

    PairLocalMatrix out;
    const double s = order.s;

    if (cell_a == cell_b) {
        if (mesh.dim == 1) identical_1d(mesh, cell_a, s, out);
        else identical_2d(mesh, cell_a, s, config, out);
        return out;
    }

    PairTopology top = classify_pair(mesh, cell_a, cell_b);
    if (mesh.dim == 1) {
        if (top.nshared == 1) {
            touching_1d(mesh, cell_a, cell_b, top, s, config, out);
            return out;
        }
    } else {
        if (top.nshared == 2) {
            common_edge_2d(mesh, cell_a, cell_b, top, s, config, out);
            return out;
        }
        if (top.nshared == 1) {
            common_vertex_2d(mesh, cell_a, cell_b, top, s, config, out);
            return out;
        }
    }

    // disjoint cells
    const int nv = mesh.dim + 1;
    out.ndofs = 2 * nv;
    for (int k = 0; k < nv; ++k) {
        out.dofs[k] = mesh.cells(k, cell_a);
        out.dofs[nv + k] = mesh.cells(k, cell_b);
    }
    DisjointIntegrator integ(mesh, cell_a, cell_b, order, config);
    out.values = integ.integrate();
    return out;
}

double pair_integral(const Mesh& mesh, int cell_a, int cell_b, int i, int j,
                     const FractionalOrder& order, const PairQuadratureConfig& config) {
    PairLocalMatrix m = pair_local_matrix(mesh, cell_a, cell_b, order, config);
    int li = m.local_index(i), lj = m.local_index(j);
    if (li < 0 || lj < 0) return 0.0;  // unsupported hat: zero difference on both cells
    return m.values(li, lj);
}

} // namespace fracext
