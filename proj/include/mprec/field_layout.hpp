#pragma once

#include <string>
#include <vector>

#include "mprec/errors.hpp"

namespace mprec {

/// Field tag of a scalar unknown. The s group collects saturations, mole
/// fractions and solid concentrations; P and T are the single pressure and
/// temperature unknowns of a cell.
enum class Field : char { S = 's', P = 'P', T = 'T' };

inline char to_char(Field f) { return static_cast<char>(f); }
Field field_from_char(char c);

/// Small set of field tags, used to select sub-matrices.
struct FieldSet {
    bool s = false;
    bool p = false;
    bool t = false;

    bool contains(Field f) const {
        switch (f) {
            case Field::S: return s;
            case Field::P: return p;
            case Field::T: return t;
        }
        return false;
    }
    bool empty() const { return !s && !p && !t; }
    int count() const { return int(s) + int(p) + int(t); }

    static FieldSet only(Field f) {
        FieldSet fs;
        if (f == Field::S) fs.s = true;
        if (f == Field::P) fs.p = true;
        if (f == Field::T) fs.t = true;
        return fs;
    }
    static FieldSet pressure() { return only(Field::P); }
    static FieldSet temperature() { return only(Field::T); }
    static FieldSet saturation() { return only(Field::S); }
    static FieldSet elliptic() {  // pressure + temperature
        FieldSet fs;
        fs.p = fs.t = true;
        return fs;
    }
    static FieldSet hyperbolic() {  // saturations + temperature
        FieldSet fs;
        fs.s = fs.t = true;
        return fs;
    }
    static FieldSet all() {
        FieldSet fs;
        fs.s = fs.p = fs.t = true;
        return fs;
    }
};

/// Maps every scalar unknown to a (cell, field) identity. Storage order is
/// cell-major with fixed intra-cell order (s group..., P, T). Cells without a
/// pressure or temperature unknown are allowed for degenerate sub-problems;
/// a cell never carries more than one P or one T.
class FieldLayout {
public:
    FieldLayout() = default;

    /// Uniform layout: every cell has n_s s-unknowns, plus P and/or T.
    static FieldLayout uniform(int n_cells, int n_s, bool has_p = true, bool has_t = true);

    /// Layout from an explicit per-unknown tag list in storage order.
    /// Tags must be grouped cell-contiguously in (s..., P, T) order.
    static FieldLayout from_tags(const std::vector<std::pair<int, Field>>& tags);

    int n_cells() const { return static_cast<int>(cell_offset_.size()) - 1; }
    int n_unknowns() const { return cell_offset_.empty() ? 0 : cell_offset_.back(); }

    int cell_offset(int cell) const { return cell_offset_[cell]; }
    int cell_size(int cell) const { return cell_offset_[cell + 1] - cell_offset_[cell]; }
    int n_s(int cell) const { return n_s_[cell]; }
    bool has_p(int cell) const { return has_p_[cell]; }
    bool has_t(int cell) const { return has_t_[cell]; }

    Field field_of(int global_idx) const;
    int cell_of(int global_idx) const;

    /// Global index of the pressure / temperature unknown of a cell.
    int p_index(int cell) const;
    int t_index(int cell) const;
    /// Global index of the k-th s-unknown of a cell.
    int s_index(int cell, int k) const { return cell_offset_[cell] + k; }

    /// Count of unknowns with tags in `fs` within one cell.
    int cell_field_count(int cell, const FieldSet& fs) const;

    /// Global indices of all unknowns tagged in `fs`, ordered by cell id then
    /// intra-cell order. This is the row/column ordering of extracted
    /// sub-matrices.
    std::vector<int> indices_of(const FieldSet& fs) const;

    /// Intra-cell local indices (relative to cell_offset) tagged in `fs`.
    std::vector<int> local_indices_of(int cell, const FieldSet& fs) const;

    bool operator==(const FieldLayout& other) const {
        return cell_offset_ == other.cell_offset_ && n_s_ == other.n_s_ &&
               has_p_ == other.has_p_ && has_t_ == other.has_t_;
    }

private:
    void validate() const;

    std::vector<int> cell_offset_;  // size n_cells+1
    std::vector<int> n_s_;
    std::vector<char> has_p_;
    std::vector<char> has_t_;
};

}  // namespace mprec
