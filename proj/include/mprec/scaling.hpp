#pragma once

#include <string>
#include <vector>

#include "mprec/block_matrix.hpp"

namespace mprec {

enum class Method { Ilu0, Cpr, Cptr, Cptr3 };
enum class SubSolver { Direct, Amg };

struct MethodSpec {
    Method method = Method::Ilu0;
    SubSolver sub = SubSolver::Direct;
};

/// Parses `ilu0`, `cpr-direct`, `cpr-amg`, `cptr-direct`, `cptr3-direct`,
/// `cptr3-amg`. CPTR supports `-direct` only.
MethodSpec parse_method(const std::string& name);
std::string method_name(const MethodSpec& spec);

struct ScalingOptions {
    /// Diagonal approximation of the square D factors: full per-cell block or
    /// its scalar diagonal.
    DiagMode diag_mode = DiagMode::Block;
    /// CPTR3 second scaling divides by the diagonal of B_PP by default; set to
    /// use the diagonal of the unscaled A_PP instead.
    bool second_scaling_from_original = false;
};

/// Exactly scaled system Ā = N⁻¹A, b̄ = N⁻¹b together with the sub-system
/// matrices the right-preconditioner stages operate on. The Z remainder
/// blocks stay inside Ā; only the stage sub-systems use the Schur
/// approximations, so the solution set is unchanged.
struct ScaledSystem {
    BlockMatrix a_bar;
    Vector b_bar;
    Method method = Method::Ilu0;
    ScalingOptions options;
    std::vector<std::string> scaling_record;  // applied D factors, in order

    ScalarMatrix b_pp;  // CPR / CPTR3 pressure sub-system
    ScalarMatrix c_tt;  // CPTR3 temperature sub-system
    ScalarMatrix b_ee;  // CPTR pressure/temperature sub-system (2 n_cells)
};

/// Identity "scaling" for the single-stage ILU(0) baseline.
ScaledSystem no_scaling(const BlockMatrix& a, const Vector& b);

/// CPR: h = s ∪ T, P-rows scaled by D_Ph D_hh⁻¹; assembles B_PP.
ScaledSystem left_scale_cpr(const BlockMatrix& a, const Vector& b,
                            const ScalingOptions& options = {});

/// CPTR: e = {P,T}, e-rows scaled by D_es D_ss⁻¹; assembles B_ee with
/// cell-interleaved (P,T) ordering.
ScaledSystem left_scale_cptr(const BlockMatrix& a, const Vector& b,
                             const ScalingOptions& options = {});

/// CPTR3: the CPTR first scaling followed by a second scaling of the T-rows
/// by D_Tp D_PP⁻¹; assembles B_PP and C_TT.
ScaledSystem left_scale_cptr3(const BlockMatrix& a, const Vector& b,
                              const ScalingOptions& options = {});

ScaledSystem left_scale(const BlockMatrix& a, const Vector& b, Method method,
                        const ScalingOptions& options = {});

}  // namespace mprec
