#pragma once

#include <string>
#include <vector>

#include "mprec/block_matrix.hpp"
#include "mprec/scalar_matrix.hpp"

namespace mprec {

/// Matrix Market coordinate (real, general) readers/writers. Values are
/// written with 17 significant digits so doubles round-trip exactly.
void write_matrix_market(const ScalarMatrix& m, const std::string& path);
ScalarMatrix read_matrix_market(const std::string& path);

/// Layout sidecar: header line `n_unknowns n_cells`, then one
/// `<cell_id> <field_tag>` line per scalar unknown in storage order.
void write_layout(const FieldLayout& layout, const std::string& path);
FieldLayout read_layout(const std::string& path);

/// Flattened BlockMatrix export = Matrix Market of the scalar view plus the
/// layout sidecar. Import reassembles the block structure from the layout.
void write_block_matrix(const BlockMatrix& m, const std::string& matrix_path,
                        const std::string& layout_path);
BlockMatrix read_block_matrix(const std::string& matrix_path, const std::string& layout_path);

/// Plain-text vector: one value per line.
void write_vector(const Vector& v, const std::string& path);
Vector read_vector(const std::string& path);

}  // namespace mprec
