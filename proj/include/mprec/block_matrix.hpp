#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mprec/field_layout.hpp"
#include "mprec/scalar_matrix.hpp"

namespace mprec {

/// Dense sub-block of the per-cell diagonal of a field-pair sub-matrix.
/// Off-cell coupling is discarded by construction.
class DiagonalApprox {
public:
    DiagonalApprox() = default;
    DiagonalApprox(std::vector<Eigen::MatrixXd> blocks, bool inverted = false)
        : blocks_(std::move(blocks)), inverted_(inverted) {}

    int n_cells() const { return static_cast<int>(blocks_.size()); }
    const Eigen::MatrixXd& block(int cell) const { return blocks_[cell]; }
    Eigen::MatrixXd& block(int cell) { return blocks_[cell]; }
    bool inverted() const { return inverted_; }
    /// True when block_diagonal_of found no stored diagonal block for a cell.
    const std::vector<char>& missing_flags() const { return missing_; }
    void set_missing(std::vector<char> m) { missing_ = std::move(m); }

    /// Replace every block by its dense inverse (partial-pivoting LU).
    /// pivot_tolerance < 0 selects the scale-aware default 1e-12 * max|entry|.
    DiagonalApprox inverted_copy(double pivot_tolerance = -1.0) const;

private:
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<char> missing_;
    bool inverted_ = false;
};

/// One block entry of a BlockMatrix: a dense (cell_row x cell_col) block.
struct BlockEntry {
    int cell_row;
    int cell_col;
    Eigen::MatrixXd block;
};

/// Diagonal extraction mode: full per-cell block, or only its scalar diagonal.
enum class DiagMode { Block, Scalar };

/// Block-sparse square matrix in cell-block granularity with a FieldLayout
/// giving every scalar row/column a (cell, field) identity. Blocks are stored
/// dense; diagonal cell-blocks are always structurally present.
class BlockMatrix {
public:
    BlockMatrix() = default;

    static BlockMatrix assemble(const std::vector<BlockEntry>& entries, FieldLayout layout);
    static BlockMatrix from_scalar(const ScalarMatrix& a, FieldLayout layout);

    const FieldLayout& layout() const { return layout_; }
    int n_cells() const { return layout_.n_cells(); }
    int dim() const { return layout_.n_unknowns(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const Eigen::MatrixXd& block(int k) const { return blocks_[k]; }
    Eigen::MatrixXd& block(int k) { return blocks_[k]; }
    int n_blocks() const { return static_cast<int>(blocks_.size()); }

    /// Index of block (cell_row, cell_col) in storage, or -1.
    int find_block(int cell_row, int cell_col) const;
    const Eigen::MatrixXd& diag_block(int cell) const { return blocks_[diag_pos_[cell]]; }
    Eigen::MatrixXd& diag_block(int cell) { return blocks_[diag_pos_[cell]]; }

    Vector apply(const Vector& x) const;

    /// Scalar CSR view in the natural (cell-interleaved) order. All entries of
    /// stored blocks are kept, including explicit zeros, so the pattern is the
    /// block pattern expanded scalar-wise.
    ScalarMatrix to_scalar() const;
    Eigen::MatrixXd to_dense() const;

    /// Rows/columns restricted to the requested field tags, ordered by cell id
    /// then intra-cell order.
    ScalarMatrix extract_submatrix(const FieldSet& row_fields, const FieldSet& col_fields) const;

    /// Per-cell diagonal blocks of a field pair; off-cell coupling dropped.
    DiagonalApprox block_diagonal_of(const FieldSet& row_fields, const FieldSet& col_fields,
                                     DiagMode mode = DiagMode::Block) const;

    /// In-place row update: for every cell c, rows `target_rows(c)` of block
    /// row c get `-= W[c] * rows 'source_rows(c)'` across all blocks in the
    /// row. Used by the left-scaling constructions; W is cell-local so the
    /// block sparsity pattern is unchanged.
    void row_combine(const std::vector<Eigen::MatrixXd>& w,
                     const FieldSet& target_fields, const FieldSet& source_fields);

private:
    FieldLayout layout_;
    std::vector<int> row_ptr_;   // size n_cells+1
    std::vector<int> col_idx_;   // block column (cell) ids, sorted per row
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<int> diag_pos_;  // storage index of each diagonal block
};

/// A_tgt - D_left * D_mid_inv * A_right with exact sparse arithmetic.
/// D factors are cell-local, so the result pattern is contained in
/// pattern(A_tgt) united with the pattern of A_right's rows.
ScalarMatrix schur_update(const ScalarMatrix& a_tgt, const DiagonalApprox& d_left,
                          const DiagonalApprox& d_mid_inv, const ScalarMatrix& a_right);

}  // namespace mprec
