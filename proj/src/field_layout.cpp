#include "mprec/field_layout.hpp"

#include <algorithm>

namespace mprec {

Field field_from_char(char c) {
    switch (c) {
        case 's': return Field::S;
        case 'P': return Field::P;
        case 'T': return Field::T;
        default: throw IoError(std::string("unknown field tag '") + c + "'");
    }
}

FieldLayout FieldLayout::uniform(int n_cells, int n_s, bool has_p, bool has_t) {
    if (n_cells < 1) throw DimensionError("layout needs at least one cell");
    if (n_s < 0) throw DimensionError("negative s-unknown count");
    FieldLayout l;
    l.cell_offset_.resize(n_cells + 1);
    l.n_s_.assign(n_cells, n_s);
    l.has_p_.assign(n_cells, has_p ? 1 : 0);
    l.has_t_.assign(n_cells, has_t ? 1 : 0);
    const int per_cell = n_s + int(has_p) + int(has_t);
    for (int c = 0; c <= n_cells; ++c) l.cell_offset_[c] = c * per_cell;
    l.validate();
    return l;
}

FieldLayout FieldLayout::from_tags(const std::vector<std::pair<int, Field>>& tags) {
    if (tags.empty()) throw DimensionError("empty tag list");
    FieldLayout l;
    int cur_cell = -1;
    int n_s = 0;
    bool has_p = false, has_t = false;
    auto flush = [&]() {
        if (cur_cell < 0) return;
        l.n_s_.push_back(n_s);
        l.has_p_.push_back(has_p ? 1 : 0);
        l.has_t_.push_back(has_t ? 1 : 0);
        l.cell_offset_.push_back(l.cell_offset_.back() + n_s + int(has_p) + int(has_t));
    };
    l.cell_offset_.push_back(0);
    for (const auto& [cell, f] : tags) {
        if (cell != cur_cell) {
            if (cell != cur_cell + 1)
                throw IoError("layout cells must be contiguous and ascending");
            flush();
            cur_cell = cell;
            n_s = 0;
            has_p = has_t = false;
        }
        switch (f) {
            case Field::S:
                if (has_p || has_t) throw IoError("intra-cell order must be s..., P, T");
                ++n_s;
                break;
            case Field::P:
                if (has_p) throw IoError("duplicate P tag in cell " + std::to_string(cell));
                if (has_t) throw IoError("intra-cell order must be s..., P, T");
                has_p = true;
                break;
            case Field::T:
                if (has_t) throw IoError("duplicate T tag in cell " + std::to_string(cell));
                has_t = true;
                break;
        }
    }
    flush();
    l.validate();
    return l;
}

void FieldLayout::validate() const {
    if (cell_offset_.size() < 2) throw DimensionError("layout needs at least one cell");
}

Field FieldLayout::field_of(int g) const {
    const int c = cell_of(g);
    const int local = g - cell_offset_[c];
    if (local < n_s_[c]) return Field::S;
    if (has_p_[c] && local == n_s_[c]) return Field::P;
    return Field::T;
}

int FieldLayout::cell_of(int g) const {
    if (g < 0 || g >= n_unknowns()) throw IndexError("unknown index out of range");
    auto it = std::upper_bound(cell_offset_.begin(), cell_offset_.end(), g);
    return static_cast<int>(it - cell_offset_.begin()) - 1;
}

int FieldLayout::p_index(int cell) const {
    if (!has_p_[cell]) throw IndexError("cell " + std::to_string(cell) + " has no P unknown");
    return cell_offset_[cell] + n_s_[cell];
}

int FieldLayout::t_index(int cell) const {
    if (!has_t_[cell]) throw IndexError("cell " + std::to_string(cell) + " has no T unknown");
    return cell_offset_[cell] + n_s_[cell] + int(has_p_[cell]);
}

int FieldLayout::cell_field_count(int cell, const FieldSet& fs) const {
    int n = 0;
    if (fs.s) n += n_s_[cell];
    if (fs.p) n += int(has_p_[cell]);
    if (fs.t) n += int(has_t_[cell]);
    return n;
}

std::vector<int> FieldLayout::indices_of(const FieldSet& fs) const {
    std::vector<int> idx;
    for (int c = 0; c < n_cells(); ++c) {
        for (int local : local_indices_of(c, fs)) idx.push_back(cell_offset_[c] + local);
    }
    return idx;
}

std::vector<int> FieldLayout::local_indices_of(int cell, const FieldSet& fs) const {
    std::vector<int> idx;
    if (fs.s)
        for (int k = 0; k < n_s_[cell]; ++k) idx.push_back(k);
    if (fs.p && has_p_[cell]) idx.push_back(n_s_[cell]);
    if (fs.t && has_t_[cell]) idx.push_back(n_s_[cell] + int(has_p_[cell]));
    return idx;
}

}  // namespace mprec
