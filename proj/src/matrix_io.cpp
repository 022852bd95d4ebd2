#include "mprec/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mprec {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    return f;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_matrix_market(const ScalarMatrix& m, const std::string& path) {
    auto f = open_out(path);
    f << "%%MatrixMarket matrix coordinate real general\n";
    f << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
    for (int i = 0; i < m.rows(); ++i)
        for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
            f << (i + 1) << " " << (m.col_idx()[k] + 1) << " " << fmt17(m.values()[k]) << "\n";
}

ScalarMatrix read_matrix_market(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw IoError(path + ": empty file");
    {
        std::istringstream h(line);
        std::string banner, object, format, type, sym;
        h >> banner >> object >> format >> type >> sym;
        if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
            type != "real" || sym != "general")
            throw IoError(path + ": expected 'matrix coordinate real general' header");
    }
    while (std::getline(f, line))
        if (!line.empty() && line[0] != '%') break;
    int rows = 0, cols = 0, nnz = 0;
    {
        std::istringstream h(line);
        if (!(h >> rows >> cols >> nnz)) throw IoError(path + ": bad size line");
    }
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (int k = 0; k < nnz; ++k) {
        int i, j;
        double v;
        if (!(f >> i >> j >> v)) throw IoError(path + ": truncated entry list");
        t.push_back({i - 1, j - 1, v});
    }
    return ScalarMatrix::from_triplets(rows, cols, std::move(t));
}

void write_layout(const FieldLayout& layout, const std::string& path) {
    auto f = open_out(path);
    f << layout.n_unknowns() << " " << layout.n_cells() << "\n";
    for (int g = 0; g < layout.n_unknowns(); ++g)
        f << layout.cell_of(g) << " " << to_char(layout.field_of(g)) << "\n";
}

FieldLayout read_layout(const std::string& path) {
    auto f = open_in(path);
    int n_unknowns = 0, n_cells = 0;
    if (!(f >> n_unknowns >> n_cells)) throw IoError(path + ": bad layout header");
    std::vector<std::pair<int, Field>> tags;
    tags.reserve(n_unknowns);
    for (int g = 0; g < n_unknowns; ++g) {
        int cell;
        char tag;
        if (!(f >> cell >> tag)) throw IoError(path + ": truncated layout");
        tags.emplace_back(cell, field_from_char(tag));
    }
    FieldLayout l = FieldLayout::from_tags(tags);
    if (l.n_cells() != n_cells)
        throw IoError(path + ": header cell count disagrees with tag list");
    return l;
}

void write_block_matrix(const BlockMatrix& m, const std::string& matrix_path,
                        const std::string& layout_path) {
    write_matrix_market(m.to_scalar(), matrix_path);
    write_layout(m.layout(), layout_path);
}

BlockMatrix read_block_matrix(const std::string& matrix_path, const std::string& layout_path) {
    FieldLayout layout = read_layout(layout_path);
    ScalarMatrix a = read_matrix_market(matrix_path);
    if (a.rows() != a.cols()) throw IoError(matrix_path + ": block matrix must be square");
    return BlockMatrix::from_scalar(a, std::move(layout));
}

void write_vector(const Vector& v, const std::string& path) {
    auto f = open_out(path);
    for (Eigen::Index i = 0; i < v.size(); ++i) f << fmt17(v[i]) << "\n";
}

Vector read_vector(const std::string& path) {
    auto f = open_in(path);
    std::vector<double> vals;
    double v;
    while (f >> v) vals.push_back(v);
    Vector out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
    return out;
}

}  // namespace mprec
