#include "mprec/condense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mprec/matrix_io.hpp"

namespace mprec {

std::string to_string(PhaseState s) {
    switch (s) {
        case PhaseState::G: return "G";
        case PhaseState::OG: return "OG";
        case PhaseState::OWG: return "OWG";
    }
    return "?";
}

PhaseState phase_state_from_string(const std::string& s) {
    if (s == "G") return PhaseState::G;
    if (s == "OG") return PhaseState::OG;
    if (s == "OWG") return PhaseState::OWG;
    throw UnsupportedStateError("unknown phase state tag '" + s + "'");
}

PhaseState classify_cell(bool has_oil, bool has_water, bool has_gas) {
    if (!has_gas) throw UnsupportedStateError("cell without a gas phase");
    if (has_water && !has_oil) throw UnsupportedStateError("water phase without oil phase");
    if (!has_oil) return PhaseState::G;
    return has_water ? PhaseState::OWG : PhaseState::OG;
}

std::string to_string(const UnknownLabel& l) {
    switch (l.kind) {
        case UnknownLabel::Kind::Pressure: return "P";
        case UnknownLabel::Kind::Temperature: return "T";
        case UnknownLabel::Kind::GasSat: return "Sg";
        case UnknownLabel::Kind::OilSat: return "So";
        case UnknownLabel::Kind::VaporFrac: return "y" + std::to_string(l.index);
        case UnknownLabel::Kind::OilFrac: return "x" + std::to_string(l.index);
        case UnknownLabel::Kind::Solid: return "c" + std::to_string(l.index);
    }
    return "?";
}

std::string to_string(const EquationLabel& l) {
    switch (l.kind) {
        case EquationLabel::Kind::Fugacity: return "f" + std::to_string(l.index);
        case EquationLabel::Kind::GasPhaseConstraint: return "sum_y";
        case EquationLabel::Kind::OilPhaseConstraint: return "sum_x";
    }
    return "?";
}

namespace {

using Kind = UnknownLabel::Kind;
using EqKind = EquationLabel::Kind;

void append_tail(VariablePartition& vp) {
    for (int k = 0; k < vp.n_s; ++k) vp.primary.push_back({Kind::Solid, k});
    vp.primary.push_back({Kind::Temperature, 0});
}

/// canonical order = (everything except P and T, in list order), P, T.
void build_canonical_perm(VariablePartition& vp) {
    vp.canonical_perm.clear();
    int p_pos = -1, t_pos = -1;
    for (int i = 0; i < vp.n_primary(); ++i) {
        const Kind k = vp.primary[i].kind;
        if (k == Kind::Pressure)
            p_pos = i;
        else if (k == Kind::Temperature)
            t_pos = i;
        else
            vp.canonical_perm.push_back(i);
    }
    vp.canonical_perm.push_back(p_pos);
    vp.canonical_perm.push_back(t_pos);
}

}  // namespace

VariablePartition ordering_for(PhaseState state, int n_c, int n_s) {
    if (n_c < 3) throw UnsupportedStateError("need at least 3 mobile components");
    if (n_s < 0) throw UnsupportedStateError("negative solid species count");
    VariablePartition vp;
    vp.state = state;
    vp.n_c = n_c;
    vp.n_s = n_s;
    vp.primary.push_back({Kind::Pressure, 0});
    switch (state) {
        case PhaseState::G:
            for (int i = 2; i <= n_c; ++i) vp.primary.push_back({Kind::VaporFrac, i});
            vp.secondary.push_back({Kind::VaporFrac, 1});
            vp.secondary_equations.push_back({EqKind::GasPhaseConstraint, 0});
            break;
        case PhaseState::OG:
            vp.primary.push_back({Kind::GasSat, 0});
            vp.primary.push_back({Kind::VaporFrac, 3});
            for (int i = 4; i <= n_c; ++i) vp.primary.push_back({Kind::OilFrac, i});
            vp.secondary.push_back({Kind::VaporFrac, 1});
            vp.secondary_equations.push_back({EqKind::Fugacity, 1});
            vp.secondary.push_back({Kind::OilFrac, 2});
            vp.secondary_equations.push_back({EqKind::Fugacity, 2});
            for (int i = 4; i <= n_c; ++i) {
                vp.secondary.push_back({Kind::VaporFrac, i});
                vp.secondary_equations.push_back({EqKind::Fugacity, i});
            }
            vp.secondary.push_back({Kind::VaporFrac, 2});
            vp.secondary_equations.push_back({EqKind::GasPhaseConstraint, 0});
            vp.secondary.push_back({Kind::OilFrac, 1});
            vp.secondary_equations.push_back({EqKind::OilPhaseConstraint, 0});
            break;
        case PhaseState::OWG:
            vp.primary.push_back({Kind::GasSat, 0});
            vp.primary.push_back({Kind::OilSat, 0});
            for (int i = 4; i <= n_c; ++i) vp.primary.push_back({Kind::OilFrac, i});
            vp.secondary.push_back({Kind::VaporFrac, 1});
            vp.secondary_equations.push_back({EqKind::Fugacity, 1});
            vp.secondary.push_back({Kind::OilFrac, 2});
            vp.secondary_equations.push_back({EqKind::Fugacity, 2});
            vp.secondary.push_back({Kind::VaporFrac, 3});
            vp.secondary_equations.push_back({EqKind::Fugacity, 3});
            for (int i = 4; i <= n_c; ++i) {
                vp.secondary.push_back({Kind::VaporFrac, i});
                vp.secondary_equations.push_back({EqKind::Fugacity, i});
            }
            vp.secondary.push_back({Kind::VaporFrac, 2});
            vp.secondary_equations.push_back({EqKind::GasPhaseConstraint, 0});
            vp.secondary.push_back({Kind::OilFrac, 3});
            vp.secondary_equations.push_back({EqKind::OilPhaseConstraint, 0});
            break;
    }
    append_tail(vp);
    build_canonical_perm(vp);
    return vp;
}

int GlobalJacobian::n_secondary_total() const {
    int n = 0;
    for (const auto& p : partitions) n += p.n_secondary();
    return n;
}

void GlobalJacobian::to_dense_full(Eigen::MatrixXd& jd, Vector& minus_r) const {
    const int n1 = j11.dim();
    const int n2 = n_secondary_total();
    const auto& lay = j11.layout();
    std::vector<int> sec_off(n_cells() + 1, 0);
    for (int c = 0; c < n_cells(); ++c) sec_off[c + 1] = sec_off[c] + partitions[c].n_secondary();

    jd = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    jd.topLeftCorner(n1, n1) = j11.to_dense();
    for (const auto& e : j12)
        jd.block(lay.cell_offset(e.cell_row), n1 + sec_off[e.cell_col], e.block.rows(),
                 e.block.cols()) += e.block;
    for (int c = 0; c < n_cells(); ++c) {
        const int ns = partitions[c].n_secondary();
        if (ns == 0) continue;
        jd.block(n1 + sec_off[c], lay.cell_offset(c), ns, lay.cell_size(c)) = j21[c];
        jd.block(n1 + sec_off[c], n1 + sec_off[c], ns, ns) = j22[c];
    }
    minus_r = Vector::Zero(n1 + n2);
    minus_r.head(n1) = -r1;
    for (int c = 0; c < n_cells(); ++c)
        if (partitions[c].n_secondary() > 0)
            minus_r.segment(n1 + sec_off[c], partitions[c].n_secondary()) = -r2[c];
}

std::vector<SecondaryBlockReport> verify_secondary_blocks(const GlobalJacobian& j) {
    std::vector<SecondaryBlockReport> reports;
    reports.reserve(j.n_cells());
    for (int c = 0; c < j.n_cells(); ++c) {
        SecondaryBlockReport rep;
        rep.cell = c;
        const Eigen::MatrixXd& b = j.j22[c];
        for (int i = 0; i < b.rows(); ++i)
            if (b(i, i) == 0.0) rep.structural_zero_diag = true;
        if (b.rows() == 0) {
            rep.condition_estimate = 1.0;
            reports.push_back(rep);
            continue;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        const double scale = b.cwiseAbs().maxCoeff();
        double min_pivot = std::numeric_limits<double>::infinity();
        for (int i = 0; i < b.rows(); ++i)
            min_pivot = std::min(min_pivot, std::abs(lu.matrixLU()(i, i)));
        rep.invertible = scale > 0.0 && min_pivot > 1e-14 * scale;
        const auto& perm = lu.permutationP().indices();
        for (int i = 0; i < perm.size(); ++i)
            if (perm[i] != i) rep.pivoted = true;
        if (rep.invertible) {
            const Eigen::MatrixXd inv = lu.inverse();
            rep.condition_estimate =
                b.cwiseAbs().rowwise().sum().maxCoeff() * inv.cwiseAbs().rowwise().sum().maxCoeff();
        }
        reports.push_back(rep);
    }
    return reports;
}

ReducedSystem condense(const GlobalJacobian& j) {
    const int nc = j.n_cells();
    const auto& lay = j.j11.layout();
    ReducedSystem red;
    red.j22_lu.reserve(nc);
    red.j21 = j.j21;
    red.r2 = j.r2;
    for (int c = 0; c < nc; ++c) {
        const Eigen::MatrixXd& b = j.j22[c];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        if (b.rows() > 0) {
            const double scale = b.cwiseAbs().maxCoeff();
            for (int i = 0; i < b.rows(); ++i)
                if (std::abs(lu.matrixLU()(i, i)) <= 1e-14 * (scale > 0.0 ? scale : 1.0))
                    throw SingularBlockError(c, "secondary");
        }
        red.j22_lu.push_back(std::move(lu));
    }

    std::vector<BlockEntry> entries;
    const auto& rp = j.j11.row_ptr();
    const auto& ci = j.j11.col_idx();
    for (int r = 0; r < nc; ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k) entries.push_back({r, ci[k], j.j11.block(k)});

    red.b = -j.r1;
    for (const auto& e : j.j12) {
        const int c = e.cell_col;
        if (j.j22[c].rows() == 0) continue;
        entries.push_back({e.cell_row, c, -e.block * red.j22_lu[c].solve(j.j21[c])});
        red.b.segment(lay.cell_offset(e.cell_row), lay.cell_size(e.cell_row)) +=
            e.block * red.j22_lu[c].solve(j.r2[c]);
    }
    red.a = BlockMatrix::assemble(entries, lay);
    return red;
}

Vector back_substitute(const ReducedSystem& r, const Vector& d1) {
    const auto& lay = r.a.layout();
    if (d1.size() != r.a.dim()) throw DimensionError("primary update dimension mismatch");
    int n2 = 0;
    for (const auto& m : r.j21) n2 += static_cast<int>(m.rows());
    Vector d2(n2);
    int off = 0;
    for (int c = 0; c < r.a.n_cells(); ++c) {
        const int ns = static_cast<int>(r.j21[c].rows());
        if (ns == 0) continue;
        d2.segment(off, ns) = r.j22_lu[c].solve(
            -r.r2[c] - r.j21[c] * d1.segment(lay.cell_offset(c), lay.cell_size(c)));
        off += ns;
    }
    return d2;
}

GlobalJacobian eliminate_wells(GlobalJacobian j, const WellPair& wells) {
    const auto& lay = j.j11.layout();
    const double scale = wells.j_ww.cwiseAbs().maxCoeff();
    if (scale == 0.0 || std::abs(wells.j_ww.determinant()) <= 1e-14 * scale * scale)
        throw SingularBlockError(wells.cell[0], "well");
    const Eigen::Matrix2d inv = wells.j_ww.inverse();

    std::vector<BlockEntry> entries;
    const auto& rp = j.j11.row_ptr();
    const auto& ci = j.j11.col_idx();
    for (int r = 0; r < j.n_cells(); ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k) entries.push_back({r, ci[k], j.j11.block(k)});
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (inv(a, b) == 0.0) continue;
            entries.push_back({wells.cell[a], wells.cell[b],
                               -inv(a, b) * (wells.j_rw[a] * wells.j_wr[b])});
        }
    j.j11 = BlockMatrix::assemble(entries, lay);

    const Eigen::Vector2d w = inv * wells.r_w;
    for (int a = 0; a < 2; ++a)
        j.r1.segment(lay.cell_offset(wells.cell[a]), lay.cell_size(wells.cell[a])) -=
            wells.j_rw[a] * w[a];
    return j;
}

namespace {

double draw_mag(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.5, 2.0)(rng);
}

double draw_signed(std::mt19937_64& rng) {
    const double m = draw_mag(rng);
    return (rng() & 1u) ? m : -m;
}

/// Canonical-order label list of the primary unknowns of one cell.
std::vector<UnknownLabel> canonical_labels(const VariablePartition& vp) {
    std::vector<UnknownLabel> out;
    out.reserve(vp.n_primary());
    for (int pos : vp.canonical_perm) out.push_back(vp.primary[pos]);
    return out;
}

int find_label(const std::vector<UnknownLabel>& labels, const UnknownLabel& l) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == l) return static_cast<int>(i);
    return -1;
}

UnknownLabel counterpart(const UnknownLabel& l) {
    if (l.kind == Kind::VaporFrac) return {Kind::OilFrac, l.index};
    return {Kind::VaporFrac, l.index};
}

}  // namespace

CellSecondaryBlocks make_cell_secondary_blocks(const VariablePartition& vp, std::mt19937_64& rng) {
    const int ns = vp.n_secondary();
    const int np = vp.n_primary();
    const std::vector<UnknownLabel> prim = canonical_labels(vp);
    const int p_col = find_label(prim, {Kind::Pressure, 0});
    const int t_col = find_label(prim, {Kind::Temperature, 0});

    CellSecondaryBlocks out;
    out.j22 = Eigen::MatrixXd::Zero(ns, ns);
    out.j21 = Eigen::MatrixXd::Zero(ns, np);
    out.j12_own = Eigen::MatrixXd::Zero(np, ns);

    for (int r = 0; r < ns; ++r) {
        const EquationLabel eq = vp.secondary_equations[r];
        if (eq.kind == EqKind::Fugacity) {
            const UnknownLabel other = counterpart(vp.secondary[r]);
            const int sc = find_label(vp.secondary, other);
            if (sc >= 0) out.j22(r, sc) = draw_signed(rng);
            const int pc = find_label(prim, other);
            if (pc >= 0) out.j21(r, pc) = draw_signed(rng);
            out.j21(r, p_col) = draw_signed(rng);
            out.j21(r, t_col) = draw_signed(rng);
        } else {
            const Kind phase = eq.kind == EqKind::GasPhaseConstraint ? Kind::VaporFrac : Kind::OilFrac;
            for (int c = 0; c < ns; ++c)
                if (c != r && vp.secondary[c].kind == phase) out.j22(r, c) = draw_signed(rng);
            for (int c = 0; c < np; ++c)
                if (prim[c].kind == phase) out.j21(r, c) = draw_signed(rng);
        }
        out.j22(r, r) = out.j22.row(r).cwiseAbs().sum() + out.j21.row(r).cwiseAbs().sum() +
                        draw_mag(rng);
    }
    for (int r = 0; r < np; ++r)
        for (int c = 0; c < ns; ++c) out.j12_own(r, c) = 0.1 * draw_signed(rng);
    return out;
}

GlobalJacobian make_synthetic_global(const std::vector<PhaseState>& states, int n_c, int n_s,
                                     std::uint64_t seed, bool inter_cell_coupling) {
    const int nc = static_cast<int>(states.size());
    std::mt19937_64 rng(seed);

    GlobalJacobian j;
    j.partitions.reserve(nc);
    for (PhaseState s : states) j.partitions.push_back(ordering_for(s, n_c, n_s));
    const int np = n_c + n_s + 1;
    const FieldLayout lay = FieldLayout::uniform(nc, np - 2, true, true);

    std::vector<BlockEntry> entries;
    std::vector<Eigen::MatrixXd> diag(nc);
    for (int c = 0; c < nc; ++c) {
        Eigen::MatrixXd d(np, np);
        for (int r = 0; r < np; ++r)
            for (int k = 0; k < np; ++k) d(r, k) = draw_signed(rng);
        diag[c] = d;
    }
    if (inter_cell_coupling)
        for (int c = 0; c + 1 < nc; ++c) {
            Eigen::MatrixXd lo(np, np), hi(np, np);
            for (int r = 0; r < np; ++r)
                for (int k = 0; k < np; ++k) {
                    hi(r, k) = 0.3 * draw_signed(rng);
                    lo(r, k) = 0.3 * draw_signed(rng);
                }
            entries.push_back({c, c + 1, hi});
            entries.push_back({c + 1, c, lo});
            diag[c].diagonal().array() += hi.cwiseAbs().rowwise().sum().array();
            diag[c + 1].diagonal().array() += lo.cwiseAbs().rowwise().sum().array();
        }
    for (int c = 0; c < nc; ++c) {
        for (int r = 0; r < np; ++r) {
            const double row_off = diag[c].row(r).cwiseAbs().sum() - std::abs(diag[c](r, r));
            diag[c](r, r) = row_off + diag[c](r, r) + (diag[c](r, r) >= 0.0 ? 1.0 : -1.0) * draw_mag(rng);
        }
        entries.push_back({c, c, diag[c]});
    }
    j.j11 = BlockMatrix::assemble(entries, lay);

    j.j21.resize(nc);
    j.j22.resize(nc);
    j.r2.resize(nc);
    for (int c = 0; c < nc; ++c) {
        CellSecondaryBlocks blocks = make_cell_secondary_blocks(j.partitions[c], rng);
        j.j21[c] = std::move(blocks.j21);
        j.j22[c] = std::move(blocks.j22);
        j.j12.push_back({c, c, std::move(blocks.j12_own)});
        if (inter_cell_coupling && c + 1 < nc) {
            const int ns_next = j.partitions[c + 1].n_secondary();
            Eigen::MatrixXd nb(np, ns_next);
            for (int r = 0; r < np; ++r)
                for (int k = 0; k < ns_next; ++k) nb(r, k) = 0.05 * draw_signed(rng);
            j.j12.push_back({c, c + 1, nb});
        }
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        j.r2[c] = Eigen::VectorXd::NullaryExpr(j.partitions[c].n_secondary(),
                                               [&](Eigen::Index) { return u(rng); });
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    j.r1 = Vector::NullaryExpr(lay.n_unknowns(), [&](Eigen::Index) { return u(rng); });
    return j;
}

void write_global_jacobian(const GlobalJacobian& j, const std::string& basename) {
    Eigen::MatrixXd full;
    Vector minus_r;
    j.to_dense_full(full, minus_r);
    write_matrix_market(ScalarMatrix::from_dense(full), basename + ".mtx");
    write_vector(-minus_r, basename + ".rhs");

    std::ofstream out(basename + ".states");
    if (!out) throw IoError("cannot open " + basename + ".states for writing");
    out << j.n_cells() << ' ' << j.partitions.front().n_c << ' ' << j.partitions.front().n_s
        << '\n';
    for (int c = 0; c < j.n_cells(); ++c)
        out << c << ' ' << to_string(j.partitions[c].state) << '\n';
}

GlobalJacobian read_global_jacobian(const std::string& basename) {
    std::ifstream in(basename + ".states");
    if (!in) throw IoError("cannot open " + basename + ".states");
    int nc = 0, n_c = 0, n_s = 0;
    if (!(in >> nc >> n_c >> n_s)) throw IoError("malformed states header in " + basename);
    std::vector<PhaseState> states(nc, PhaseState::G);
    for (int i = 0; i < nc; ++i) {
        int cell;
        std::string tag;
        if (!(in >> cell >> tag)) throw IoError("truncated states file " + basename);
        if (cell < 0 || cell >= nc) throw IoError("cell id out of range in " + basename);
        states[cell] = phase_state_from_string(tag);
    }

    GlobalJacobian j;
    for (PhaseState s : states) j.partitions.push_back(ordering_for(s, n_c, n_s));
    const int np = n_c + n_s + 1;
    const FieldLayout lay = FieldLayout::uniform(nc, np - 2, true, true);
    const int n1 = lay.n_unknowns();

    std::vector<int> sec_off(nc + 1, 0);
    for (int c = 0; c < nc; ++c) sec_off[c + 1] = sec_off[c] + j.partitions[c].n_secondary();
    const int n2 = sec_off[nc];
    const auto sec_cell = [&](int idx) {
        return static_cast<int>(std::upper_bound(sec_off.begin(), sec_off.end(), idx) -
                                sec_off.begin()) - 1;
    };

    const ScalarMatrix full = read_matrix_market(basename + ".mtx");
    if (full.rows() != n1 + n2 || full.cols() != n1 + n2)
        throw IoError("matrix dimension does not match the states sidecar in " + basename);
    const Vector r = read_vector(basename + ".rhs");
    if (r.size() != n1 + n2) throw IoError("rhs dimension mismatch in " + basename);

    j.r1 = r.head(n1);
    j.j21.assign(nc, Eigen::MatrixXd());
    j.j22.assign(nc, Eigen::MatrixXd());
    j.r2.resize(nc);
    for (int c = 0; c < nc; ++c) {
        const int ns = j.partitions[c].n_secondary();
        j.j21[c] = Eigen::MatrixXd::Zero(ns, lay.cell_size(c));
        j.j22[c] = Eigen::MatrixXd::Zero(ns, ns);
        j.r2[c] = r.segment(n1 + sec_off[c], ns);
    }

    std::vector<BlockEntry> j11_entries;
    std::vector<std::vector<Eigen::MatrixXd>> j12_dense(
        nc, std::vector<Eigen::MatrixXd>());  // indexed lazily below
    std::vector<std::vector<int>> j12_cols(nc);
    const auto j12_block = [&](int cr, int cc) -> Eigen::MatrixXd& {
        auto& cols = j12_cols[cr];
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] == cc) return j12_dense[cr][k];
        cols.push_back(cc);
        j12_dense[cr].push_back(
            Eigen::MatrixXd::Zero(lay.cell_size(cr), j.partitions[cc].n_secondary()));
        return j12_dense[cr].back();
    };
    const auto j11_block = [&](int cr, int cc) -> Eigen::MatrixXd& {
        for (auto& e : j11_entries)
            if (e.cell_row == cr && e.cell_col == cc) return e.block;
        j11_entries.push_back(
            {cr, cc, Eigen::MatrixXd::Zero(lay.cell_size(cr), lay.cell_size(cc))});
        return j11_entries.back().block;
    };

    for (int row = 0; row < full.rows(); ++row)
        for (int k = full.row_ptr()[row]; k < full.row_ptr()[row + 1]; ++k) {
            const int col = full.col_idx()[k];
            const double v = full.values()[k];
            if (row < n1 && col < n1) {
                const int cr = lay.cell_of(row), cc = lay.cell_of(col);
                j11_block(cr, cc)(row - lay.cell_offset(cr), col - lay.cell_offset(cc)) = v;
            } else if (row < n1) {
                const int cr = lay.cell_of(row), cc = sec_cell(col - n1);
                j12_block(cr, cc)(row - lay.cell_offset(cr), col - n1 - sec_off[cc]) = v;
            } else {
                const int cr = sec_cell(row - n1);
                if (col < n1) {
                    if (lay.cell_of(col) != cr)
                        throw IoError("secondary row couples outside its cell in " + basename);
                    j.j21[cr](row - n1 - sec_off[cr], col - lay.cell_offset(cr)) = v;
                } else {
                    if (sec_cell(col - n1) != cr)
                        throw IoError("secondary row couples outside its cell in " + basename);
                    j.j22[cr](row - n1 - sec_off[cr], col - n1 - sec_off[cr]) = v;
                }
            }
        }

    j.j11 = BlockMatrix::assemble(j11_entries, lay);
    for (int cr = 0; cr < nc; ++cr)
        for (std::size_t k = 0; k < j12_cols[cr].size(); ++k)
            j.j12.push_back({cr, j12_cols[cr][k], std::move(j12_dense[cr][k])});
    return j;
}

}  // namespace mprec
