#include "mprec/scaling.hpp"

namespace mprec {

MethodSpec parse_method(const std::string& name) {
    if (name == "ilu0") return {Method::Ilu0, SubSolver::Direct};
    if (name == "cpr-direct") return {Method::Cpr, SubSolver::Direct};
    if (name == "cpr-amg") return {Method::Cpr, SubSolver::Amg};
    if (name == "cptr-direct") return {Method::Cptr, SubSolver::Direct};
    if (name == "cptr-amg")
        throw ConfigError("cptr supports only the -direct sub-solver");
    if (name == "cptr3-direct") return {Method::Cptr3, SubSolver::Direct};
    if (name == "cptr3-amg") return {Method::Cptr3, SubSolver::Amg};
    throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(const MethodSpec& spec) {
    switch (spec.method) {
        case Method::Ilu0: return "ilu0";
        case Method::Cpr: return spec.sub == SubSolver::Amg ? "cpr-amg" : "cpr-direct";
        case Method::Cptr: return "cptr-direct";
        case Method::Cptr3: return spec.sub == SubSolver::Amg ? "cptr3-amg" : "cptr3-direct";
    }
    return "?";
}

namespace {

/// Cell-local W factors for one triangular scaling step:
/// W[c] = diag_block(target,source) * diag_block(source,source)^-1.
std::vector<Eigen::MatrixXd> scaling_factors(const BlockMatrix& a, const FieldSet& target,
                                             const FieldSet& source, DiagMode mode,
                                             const char* what) {
    // The square mid factor honors the diagonal mode; the rectangular
    // coupling factor is always the full cell block.
    DiagonalApprox d_ts = a.block_diagonal_of(target, source, DiagMode::Block);
    DiagonalApprox d_ss_inv;
    try {
        d_ss_inv = a.block_diagonal_of(source, source, mode).inverted_copy();
    } catch (const SingularBlockError& e) {
        throw SingularBlockError(e.cell_id, what);
    }
    std::vector<Eigen::MatrixXd> w(a.n_cells());
    for (int c = 0; c < a.n_cells(); ++c) w[c] = d_ts.block(c) * d_ss_inv.block(c);
    return w;
}

/// b[target rows] -= W[c] * b[source rows], cell by cell.
void scale_rhs(const FieldLayout& layout, const std::vector<Eigen::MatrixXd>& w,
               const FieldSet& target, const FieldSet& source, Vector& b) {
    for (int c = 0; c < layout.n_cells(); ++c) {
        const auto tl = layout.local_indices_of(c, target);
        const auto sl = layout.local_indices_of(c, source);
        if (tl.empty() || sl.empty()) continue;
        const int off = layout.cell_offset(c);
        Eigen::VectorXd src(sl.size());
        for (std::size_t i = 0; i < sl.size(); ++i) src[i] = b[off + sl[i]];
        const Eigen::VectorXd upd = w[c] * src;
        for (std::size_t i = 0; i < tl.size(); ++i) b[off + tl[i]] -= upd[i];
    }
}

}  // namespace

ScaledSystem no_scaling(const BlockMatrix& a, const Vector& b) {
    ScaledSystem s;
    s.a_bar = a;
    s.b_bar = b;
    s.method = Method::Ilu0;
    return s;
}

ScaledSystem left_scale_cpr(const BlockMatrix& a, const Vector& b,
                            const ScalingOptions& options) {
    if (b.size() != a.dim()) throw DimensionError("rhs length mismatch");
    ScaledSystem s;
    s.method = Method::Cpr;
    s.options = options;
    s.a_bar = a;
    s.b_bar = b;
    const auto w = scaling_factors(a, FieldSet::pressure(), FieldSet::hyperbolic(),
                                   options.diag_mode, "D_hh");
    s.a_bar.row_combine(w, FieldSet::pressure(), FieldSet::hyperbolic());
    scale_rhs(a.layout(), w, FieldSet::pressure(), FieldSet::hyperbolic(), s.b_bar);
    s.scaling_record.push_back("D_Ph*D_hh^-1");
    s.b_pp = s.a_bar.extract_submatrix(FieldSet::pressure(), FieldSet::pressure());
    return s;
}

ScaledSystem left_scale_cptr(const BlockMatrix& a, const Vector& b,
                             const ScalingOptions& options) {
    if (b.size() != a.dim()) throw DimensionError("rhs length mismatch");
    ScaledSystem s;
    s.method = Method::Cptr;
    s.options = options;
    s.a_bar = a;
    s.b_bar = b;
    const auto w = scaling_factors(a, FieldSet::elliptic(), FieldSet::saturation(),
                                   options.diag_mode, "D_ss");
    s.a_bar.row_combine(w, FieldSet::elliptic(), FieldSet::saturation());
    scale_rhs(a.layout(), w, FieldSet::elliptic(), FieldSet::saturation(), s.b_bar);
    s.scaling_record.push_back("D_es*D_ss^-1");
    s.b_ee = s.a_bar.extract_submatrix(FieldSet::elliptic(), FieldSet::elliptic());
    return s;
}

ScaledSystem left_scale_cptr3(const BlockMatrix& a, const Vector& b,
                              const ScalingOptions& options) {
    if (b.size() != a.dim()) throw DimensionError("rhs length mismatch");
    ScaledSystem s;
    s.method = Method::Cptr3;
    s.options = options;
    s.a_bar = a;
    s.b_bar = b;

    // First scaling: eliminate the s-coupling of both P- and T-rows.
    const auto w1 = scaling_factors(a, FieldSet::elliptic(), FieldSet::saturation(),
                                    options.diag_mode, "D_ss");
    s.a_bar.row_combine(w1, FieldSet::elliptic(), FieldSet::saturation());
    scale_rhs(a.layout(), w1, FieldSet::elliptic(), FieldSet::saturation(), s.b_bar);
    s.scaling_record.push_back("[D_Ps;D_Ts]*D_ss^-1");

    // Second scaling: push the T-rows toward upper-triangular with respect to
    // pressure, dividing by the diagonal of the first-level B_PP (or of the
    // original A_PP when configured).
    const BlockMatrix& pp_source = options.second_scaling_from_original ? a : s.a_bar;
    DiagonalApprox d_tp =
        s.a_bar.block_diagonal_of(FieldSet::temperature(), FieldSet::pressure(), DiagMode::Block);
    DiagonalApprox d_pp_inv;
    try {
        d_pp_inv = pp_source
                       .block_diagonal_of(FieldSet::pressure(), FieldSet::pressure(),
                                          options.diag_mode)
                       .inverted_copy();
    } catch (const SingularBlockError& e) {
        throw SingularBlockError(e.cell_id, "D_PP");
    }
    std::vector<Eigen::MatrixXd> w2(a.n_cells());
    for (int c = 0; c < a.n_cells(); ++c) w2[c] = d_tp.block(c) * d_pp_inv.block(c);
    s.a_bar.row_combine(w2, FieldSet::temperature(), FieldSet::pressure());
    scale_rhs(a.layout(), w2, FieldSet::temperature(), FieldSet::pressure(), s.b_bar);
    s.scaling_record.push_back("D_Tp*D_PP^-1");

    s.b_pp = s.a_bar.extract_submatrix(FieldSet::pressure(), FieldSet::pressure());
    s.c_tt = s.a_bar.extract_submatrix(FieldSet::temperature(), FieldSet::temperature());
    return s;
}

ScaledSystem left_scale(const BlockMatrix& a, const Vector& b, Method method,
                        const ScalingOptions& options) {
    switch (method) {
        case Method::Ilu0: return no_scaling(a, b);
        case Method::Cpr: return left_scale_cpr(a, b, options);
        case Method::Cptr: return left_scale_cptr(a, b, options);
        case Method::Cptr3: return left_scale_cptr3(a, b, options);
    }
    throw ConfigError("unreachable method");
}

}  // namespace mprec
