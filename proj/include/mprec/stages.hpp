#pragma once

#include <memory>

#include "mprec/amg.hpp"
#include "mprec/dense_factor.hpp"
#include "mprec/gmres.hpp"
#include "mprec/ilu0.hpp"
#include "mprec/scaling.hpp"

namespace mprec {

/// One preconditioner stage: a sub-solve on a field scope (zero outside the
/// scope) or a full-scope ILU(0) sweep.
class Stage {
public:
    static Stage scoped_amg(std::vector<int> scope, std::shared_ptr<AMGHierarchy> solver);
    static Stage scoped_direct(std::vector<int> scope, std::shared_ptr<DenseFactor> solver);
    static Stage full_ilu0(std::shared_ptr<ILU0Factor> factor);

    /// Gather the scope slice of r, solve, scatter into a zero-padded
    /// full-dimension vector. ILU(0) stages act on the full vector.
    Vector apply(const Vector& r_full) const;

    bool is_ilu0() const { return ilu_ != nullptr; }
    const std::vector<int>& scope() const { return scope_; }

private:
    std::vector<int> scope_;
    std::shared_ptr<AMGHierarchy> amg_;
    std::shared_ptr<DenseFactor> direct_;
    std::shared_ptr<ILU0Factor> ilu_;
};

/// Composed multi-stage right-preconditioner over an exactly scaled system.
/// Application is a fixed linear operator; the final stage is always the
/// full-scope ILU(0) sweep except for the single-stage ILU(0) baseline.
class StagePreconditioner {
public:
    int n_stages() const { return static_cast<int>(stages_.size()); }
    MethodSpec spec() const { return spec_; }

    /// Flattened scaled matrix, used for residual updates and as the outer
    /// GMRES operator.
    const ScalarMatrix& a_bar() const { return *a_flat_; }

    Vector apply(const Vector& r) const;
    /// x = M1 r; z = r - A x; y = x + M2 z.
    Vector apply_two_stage(const Vector& r) const;
    /// x = M1 r; z = r - A x; v = M2 z; u = z - A v; y = x + v + M3 u.
    Vector apply_three_stage(const Vector& r) const;

    Vector apply_stage(int i, const Vector& r) const { return stages_[i].apply(r); }
    const Stage& stage(int i) const { return stages_[i]; }

    LinearOperator as_operator() const {
        return {a_flat_->rows(), [this](const Vector& r) { return apply(r); }};
    }

    friend StagePreconditioner build_ilu0(const ScaledSystem& s);
    friend StagePreconditioner build_cpr(const ScaledSystem& s, SubSolver pressure_solver,
                                         const AMGParams& amg_params);
    friend StagePreconditioner build_cptr(const ScaledSystem& s);
    friend StagePreconditioner build_cptr3(const ScaledSystem& s, SubSolver sub_solver,
                                           const AMGParams& amg_params);

private:
    MethodSpec spec_;
    std::vector<Stage> stages_;
    std::shared_ptr<ScalarMatrix> a_flat_;
};

/// Single-stage ILU(0) baseline.
StagePreconditioner build_ilu0(const ScaledSystem& s);
/// Stage 1: pressure-scope solve on B_PP; stage 2: ILU(0) of Ā.
StagePreconditioner build_cpr(const ScaledSystem& s, SubSolver pressure_solver,
                              const AMGParams& amg_params = {});
/// Stage 1: monolithic dense solve of B_ee; stage 2: ILU(0) of Ā.
StagePreconditioner build_cptr(const ScaledSystem& s);
/// Stage 1: temperature-scope solve on C_TT; stage 2: pressure-scope solve on
/// B_PP; stage 3: ILU(0) of Ā.
StagePreconditioner build_cptr3(const ScaledSystem& s, SubSolver sub_solver,
                                const AMGParams& amg_params = {});

StagePreconditioner build_preconditioner(const ScaledSystem& s, const MethodSpec& spec,
                                         const AMGParams& amg_params = {});

}  // namespace mprec
