#pragma once

#include "fracext/assembly.hpp"

#include <iosfwd>
#include <string>

namespace fracext {

/// Debug dump: `i j value` per stored entry, sorted lexicographically.
void write_matrix_coordinate(std::ostream& os, const SparseMat& A);

/// Field file: mesh header plus one nodal value per line (round-trip exact).
void write_field(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& values);
Eigen::VectorXd read_field(std::istream& is, Mesh* mesh_out = nullptr);
void write_field_file(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& values);
Eigen::VectorXd read_field_file(const std::string& path, Mesh* mesh_out = nullptr);

std::string format_double(double v);  // shortest round-trip decimal form

} // namespace fracext
