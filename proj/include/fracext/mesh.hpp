#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracext {

enum class Region { Interior, Exterior, ControlSupport };

/// Conforming simplicial mesh of the truncated domain.  Cells carry a region
/// tag partitioning the mesh into the observation domain, the annular
/// exterior and the control support.  1D meshes store nodes with y == 0 so
/// geometric kernels share one code path.
struct Mesh {
    int dim = 0;                           // spatial dimension, 1 or 2
    Eigen::Matrix2Xd nodes;                // coordinates, column per node
    Eigen::MatrixXi cells;                 // (dim+1) x ncells vertex indices
    std::vector<Region> cell_region;

    int num_nodes() const { return static_cast<int>(nodes.cols()); }
    int num_cells() const { return static_cast<int>(cells.cols()); }

    Eigen::Vector2d node(int i) const { return nodes.col(i); }
    Eigen::Vector2d centroid(int cell) const;
    double cell_measure(int cell) const;
    double cell_diameter(int cell) const;

    double region_measure(Region r) const;
    /// max/min cell diameter over the mesh
    double quasi_uniformity_ratio() const;

    /// Throws std::runtime_error on any violated mesh invariant: index range,
    /// degenerate cells, duplicate nodes, non-conforming cell interfaces, or
    /// control cells outside the exterior.
    void validate() const;
};

struct IntervalInInterval {
    double omega_lo = -0.5, omega_hi = 0.5;
    double outer_lo = -1.5, outer_hi = 1.5;
    std::optional<std::pair<double, double>> control;  // [c0, c1] in the exterior
};

struct DiskInDisk {
    double r = 0.5;   // radius of the observation disk
    double R = 1.5;   // truncation radius
    std::optional<std::pair<double, double>> control_annulus;  // [r0, r1]
};

struct SquareInDisk {
    double half_width = 0.4;  // observation square [-w, w]^2
    double R = 1.5;
    double grid_extent = 1.0;                 // rectilinear grid covers [-L, L]^2
    Eigen::Vector4d control = {0.5, -0.2, 0.9, 0.2};  // x0, y0, x1, y1
};

struct MShapeInDisk {
    double R = 0.6;
    double grid_extent = 0.36;
    Eigen::Vector4d control = {-0.06, 0.24, 0.06, 0.30};
};

struct GeometrySpec {
    enum class Kind { Interval, Disk, SquareInDisk, MShape } kind = Kind::Disk;
    IntervalInInterval interval;
    DiskInDisk disk;
    SquareInDisk square;
    MShapeInDisk mshape;

    static GeometrySpec make_interval(IntervalInInterval g);
    static GeometrySpec make_disk(DiskInDisk g);
    static GeometrySpec make_square_in_disk(SquareInDisk g);
    static GeometrySpec make_mshape(MShapeInDisk g);
};

/// Builds a conforming tagged mesh with max cell diameter <= 2 * target_h.
/// Region boundaries align exactly with cell boundaries.  Throws
/// std::invalid_argument when the geometry is inconsistent (outer domain not
/// strictly containing the observation domain, control support overlapping
/// its closure).
Mesh generate(const GeometrySpec& geometry, double target_h);

/// Uniform refinement: bisection in 1D, red refinement in 2D.  Region tags
/// are inherited, so children cover their parent exactly.
Mesh refine(const Mesh& mesh);

/// Index sets over the global P1 space.  interior/exterior overlap exactly at
/// nodes on the interface; control dofs never touch the observation domain.
struct DofPartition {
    std::vector<int> interior_dofs;       // support meets the observation domain
    std::vector<int> exterior_dofs;       // support meets the exterior
    std::vector<int> control_dofs;        // nodes of control-support cells
    std::vector<int> interior_only_dofs;  // interior minus interface
    std::vector<int> exterior_only_dofs;

    std::vector<char> is_interior, is_exterior, is_control, is_interior_only;
};

DofPartition partition_dofs(const Mesh& mesh);

/// Picks a target_h so that generate() yields approximately `target_dofs`
/// nodes (within ~10-15%); uses one or two trial generations.
double pick_h_for_dofs(const GeometrySpec& geometry, int target_dofs);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

} // namespace fracext
