#include "mprec/block_matrix.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>

namespace mprec {

DiagonalApprox DiagonalApprox::inverted_copy(double pivot_tolerance) const {
    std::vector<Eigen::MatrixXd> inv;
    inv.reserve(blocks_.size());
    for (int c = 0; c < n_cells(); ++c) {
        const Eigen::MatrixXd& b = blocks_[c];
        if (b.rows() != b.cols())
            throw DimensionError("invert_diagonal needs square per-cell blocks");
        if (b.rows() == 0) {
            inv.emplace_back(0, 0);
            continue;
        }
        const double scale = b.cwiseAbs().maxCoeff();
        const double tol = pivot_tolerance >= 0.0 ? pivot_tolerance : 1e-12 * scale;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        const Eigen::MatrixXd& u = lu.matrixLU();
        for (int i = 0; i < u.rows(); ++i)
            if (std::abs(u(i, i)) <= tol) throw SingularBlockError(c, "diagonal");
        inv.push_back(lu.inverse());
    }
    return DiagonalApprox(std::move(inv), true);
}

BlockMatrix BlockMatrix::assemble(const std::vector<BlockEntry>& entries, FieldLayout layout) {
    BlockMatrix m;
    m.layout_ = std::move(layout);
    const int nc = m.layout_.n_cells();

    // Merge duplicates; ensure diagonal presence.
    std::map<std::pair<int, int>, Eigen::MatrixXd> merged;
    for (const auto& e : entries) {
        if (e.cell_row < 0 || e.cell_row >= nc || e.cell_col < 0 || e.cell_col >= nc)
            throw IndexError("block entry cell index out of range");
        if (e.block.rows() != m.layout_.cell_size(e.cell_row) ||
            e.block.cols() != m.layout_.cell_size(e.cell_col))
            throw DimensionError("block dimensions inconsistent with layout");
        auto key = std::make_pair(e.cell_row, e.cell_col);
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, e.block);
        else
            it->second += e.block;
    }
    for (int c = 0; c < nc; ++c) {
        auto key = std::make_pair(c, c);
        if (merged.find(key) == merged.end())
            merged.emplace(key, Eigen::MatrixXd::Zero(m.layout_.cell_size(c),
                                                      m.layout_.cell_size(c)));
    }

    m.row_ptr_.assign(nc + 1, 0);
    m.diag_pos_.assign(nc, -1);
    for (const auto& [key, block] : merged) {
        if (key.first == key.second) m.diag_pos_[key.first] = static_cast<int>(m.blocks_.size());
        m.col_idx_.push_back(key.second);
        m.blocks_.push_back(block);
        m.row_ptr_[key.first + 1]++;
    }
    for (int c = 0; c < nc; ++c) m.row_ptr_[c + 1] += m.row_ptr_[c];
    return m;
}

BlockMatrix BlockMatrix::from_scalar(const ScalarMatrix& a, FieldLayout layout) {
    if (a.rows() != layout.n_unknowns() || a.cols() != layout.n_unknowns())
        throw DimensionError("scalar matrix does not match layout dimension");
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
    for (int i = 0; i < a.rows(); ++i) {
        const int cr = layout.cell_of(i);
        const int li = i - layout.cell_offset(cr);
        for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            const int j = a.col_idx()[k];
            const int cc = layout.cell_of(j);
            auto key = std::make_pair(cr, cc);
            auto it = blocks.find(key);
            if (it == blocks.end())
                it = blocks.emplace(key, Eigen::MatrixXd::Zero(layout.cell_size(cr),
                                                               layout.cell_size(cc))).first;
            it->second(li, j - layout.cell_offset(cc)) = a.values()[k];
        }
    }
    std::vector<BlockEntry> entries;
    entries.reserve(blocks.size());
    for (auto& [key, b] : blocks) entries.push_back({key.first, key.second, std::move(b)});
    return assemble(entries, std::move(layout));
}

int BlockMatrix::find_block(int cell_row, int cell_col) const {
    auto begin = col_idx_.begin() + row_ptr_[cell_row];
    auto end = col_idx_.begin() + row_ptr_[cell_row + 1];
    auto it = std::lower_bound(begin, end, cell_col);
    if (it != end && *it == cell_col) return static_cast<int>(it - col_idx_.begin());
    return -1;
}

Vector BlockMatrix::apply(const Vector& x) const {
    if (x.size() != dim()) throw DimensionError("spmv length mismatch");
    Vector y = Vector::Zero(dim());
    for (int c = 0; c < n_cells(); ++c) {
        auto yc = y.segment(layout_.cell_offset(c), layout_.cell_size(c));
        for (int k = row_ptr_[c]; k < row_ptr_[c + 1]; ++k) {
            const int cc = col_idx_[k];
            yc += blocks_[k] * x.segment(layout_.cell_offset(cc), layout_.cell_size(cc));
        }
    }
    return y;
}

ScalarMatrix BlockMatrix::to_scalar() const {
    std::vector<Triplet> t;
    for (int c = 0; c < n_cells(); ++c) {
        const int ro = layout_.cell_offset(c);
        for (int k = row_ptr_[c]; k < row_ptr_[c + 1]; ++k) {
            const int co = layout_.cell_offset(col_idx_[k]);
            const Eigen::MatrixXd& b = blocks_[k];
            for (int i = 0; i < b.rows(); ++i)
                for (int j = 0; j < b.cols(); ++j) t.push_back({ro + i, co + j, b(i, j)});
        }
    }
    return ScalarMatrix::from_triplets(dim(), dim(), std::move(t));
}

Eigen::MatrixXd BlockMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim(), dim());
    for (int c = 0; c < n_cells(); ++c) {
        const int ro = layout_.cell_offset(c);
        for (int k = row_ptr_[c]; k < row_ptr_[c + 1]; ++k) {
            const int co = layout_.cell_offset(col_idx_[k]);
            d.block(ro, co, blocks_[k].rows(), blocks_[k].cols()) = blocks_[k];
        }
    }
    return d;
}

ScalarMatrix BlockMatrix::extract_submatrix(const FieldSet& row_fields,
                                            const FieldSet& col_fields) const {
    if (row_fields.empty() || col_fields.empty())
        throw DimensionError("empty field selection");
    // Position of each selected global column in the extracted ordering.
    std::vector<int> col_pos(dim(), -1);
    int n_sub_cols = 0;
    for (int c = 0; c < n_cells(); ++c)
        for (int local : layout_.local_indices_of(c, col_fields))
            col_pos[layout_.cell_offset(c) + local] = n_sub_cols++;

    std::vector<Triplet> t;
    int row_out = 0;
    for (int c = 0; c < n_cells(); ++c) {
        const auto row_locals = layout_.local_indices_of(c, row_fields);
        for (int k = row_ptr_[c]; k < row_ptr_[c + 1]; ++k) {
            const int cc = col_idx_[k];
            const int co = layout_.cell_offset(cc);
            const Eigen::MatrixXd& b = blocks_[k];
            const auto col_locals = layout_.local_indices_of(cc, col_fields);
            for (std::size_t ri = 0; ri < row_locals.size(); ++ri)
                for (int cl : col_locals)
                    t.push_back({row_out + static_cast<int>(ri), col_pos[co + cl],
                                 b(row_locals[ri], cl)});
        }
        row_out += static_cast<int>(row_locals.size());
    }
    return ScalarMatrix::from_triplets(row_out, n_sub_cols, std::move(t));
}

DiagonalApprox BlockMatrix::block_diagonal_of(const FieldSet& row_fields,
                                              const FieldSet& col_fields, DiagMode mode) const {
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<char> missing(n_cells(), 0);
    blocks.reserve(n_cells());
    for (int c = 0; c < n_cells(); ++c) {
        const auto rl = layout_.local_indices_of(c, row_fields);
        const auto cl = layout_.local_indices_of(c, col_fields);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rl.size(), cl.size());
        const int k = find_block(c, c);
        if (k < 0) {
            missing[c] = 1;
        } else {
            for (std::size_t i = 0; i < rl.size(); ++i)
                for (std::size_t j = 0; j < cl.size(); ++j) b(i, j) = blocks_[k](rl[i], cl[j]);
        }
        if (mode == DiagMode::Scalar) {
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(b.rows(), b.cols());
            const int n = static_cast<int>(std::min(b.rows(), b.cols()));
            for (int i = 0; i < n; ++i) d(i, i) = b(i, i);
            b = d;
        }
        blocks.push_back(std::move(b));
    }
    DiagonalApprox d(std::move(blocks));
    d.set_missing(std::move(missing));
    return d;
}

void BlockMatrix::row_combine(const std::vector<Eigen::MatrixXd>& w,
                              const FieldSet& target_fields, const FieldSet& source_fields) {
    if (static_cast<int>(w.size()) != n_cells())
        throw DimensionError("one combine factor required per cell");
    for (int c = 0; c < n_cells(); ++c) {
        const auto tl = layout_.local_indices_of(c, target_fields);
        const auto sl = layout_.local_indices_of(c, source_fields);
        if (w[c].rows() != static_cast<int>(tl.size()) ||
            w[c].cols() != static_cast<int>(sl.size()))
            throw DimensionError("combine factor dimension mismatch in cell " +
                                 std::to_string(c));
        if (tl.empty() || sl.empty()) continue;
        for (int k = row_ptr_[c]; k < row_ptr_[c + 1]; ++k) {
            Eigen::MatrixXd& b = blocks_[k];
            Eigen::MatrixXd src(sl.size(), b.cols());
            for (std::size_t i = 0; i < sl.size(); ++i) src.row(i) = b.row(sl[i]);
            const Eigen::MatrixXd upd = w[c] * src;
            for (std::size_t i = 0; i < tl.size(); ++i) b.row(tl[i]) -= upd.row(i);
        }
    }
}

ScalarMatrix schur_update(const ScalarMatrix& a_tgt, const DiagonalApprox& d_left,
                          const DiagonalApprox& d_mid_inv, const ScalarMatrix& a_right) {
    const int nc = d_left.n_cells();
    if (d_mid_inv.n_cells() != nc)
        throw DimensionError("schur_update: cell count mismatch between D factors");
    if (a_tgt.cols() != a_right.cols())
        throw DimensionError("schur_update: column dimension mismatch");

    // Row offsets of the per-cell groups inside a_tgt and a_right.
    std::vector<int> tgt_off(nc + 1, 0), mid_off(nc + 1, 0);
    for (int c = 0; c < nc; ++c) {
        tgt_off[c + 1] = tgt_off[c] + static_cast<int>(d_left.block(c).rows());
        mid_off[c + 1] = mid_off[c] + static_cast<int>(d_mid_inv.block(c).rows());
    }
    if (tgt_off[nc] != a_tgt.rows())
        throw DimensionError("schur_update: D_left rows do not match A_tgt");
    if (mid_off[nc] != a_right.rows())
        throw DimensionError("schur_update: D_mid rows do not match A_right");

    std::vector<Triplet> t;
    for (int i = 0; i < a_tgt.rows(); ++i)
        for (int k = a_tgt.row_ptr()[i]; k < a_tgt.row_ptr()[i + 1]; ++k)
            t.push_back({i, a_tgt.col_idx()[k], a_tgt.values()[k]});
    for (int c = 0; c < nc; ++c) {
        const Eigen::MatrixXd w = d_left.block(c) * d_mid_inv.block(c);
        for (int i = 0; i < w.rows(); ++i) {
            for (int j = 0; j < w.cols(); ++j) {
                const double wij = w(i, j);
                if (wij == 0.0) continue;
                const int mid_row = mid_off[c] + j;
                for (int k = a_right.row_ptr()[mid_row]; k < a_right.row_ptr()[mid_row + 1]; ++k)
                    t.push_back({tgt_off[c] + i, a_right.col_idx()[k],
                                 -wij * a_right.values()[k]});
            }
        }
    }
    return ScalarMatrix::from_triplets(a_tgt.rows(), a_tgt.cols(), std::move(t));
}

}  // namespace mprec
