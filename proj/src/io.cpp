#include "fracext/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <vector>

namespace fracext {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix_coordinate(std::ostream& os, const SparseMat& A) {
    std::vector<std::tuple<int, int, double>> entries;
    entries.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMat::InnerIterator it(A, k); it; ++it)
            entries.emplace_back(it.row(), it.col(), it.value());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) < std::get<1>(b);
    });
    for (const auto& [i, j, v] : entries) os << i << " " << j << " " << format_double(v) << "\n";
}

void write_field(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& values) {
    if (values.size() != mesh.num_nodes()) throw std::invalid_argument("write_field: size mismatch");
    write_mesh(os, mesh);
    for (int i = 0; i < values.size(); ++i) os << format_double(values[i]) << "\n";
}

Eigen::VectorXd read_field(std::istream& is, Mesh* mesh_out) {
    Mesh mesh = read_mesh(is);
    Eigen::VectorXd values(mesh.num_nodes());
    for (int i = 0; i < values.size(); ++i)
        if (!(is >> values[i])) throw std::runtime_error("read_field: missing nodal value");
    if (mesh_out) *mesh_out = std::move(mesh);
    return values;
}

void write_field_file(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& values) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_file: cannot open " + path);
    write_field(os, mesh, values);
}

Eigen::VectorXd read_field_file(const std::string& path, Mesh* mesh_out) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_file: cannot open " + path);
    return read_field(is, mesh_out);
}

} // namespace fracext
