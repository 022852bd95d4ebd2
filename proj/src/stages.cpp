#include "mprec/stages.hpp"

namespace mprec {

Stage Stage::scoped_amg(std::vector<int> scope, std::shared_ptr<AMGHierarchy> solver) {
    Stage s;
    s.scope_ = std::move(scope);
    s.amg_ = std::move(solver);
    return s;
}

Stage Stage::scoped_direct(std::vector<int> scope, std::shared_ptr<DenseFactor> solver) {
    Stage s;
    s.scope_ = std::move(scope);
    s.direct_ = std::move(solver);
    return s;
}

Stage Stage::full_ilu0(std::shared_ptr<ILU0Factor> factor) {
    Stage s;
    s.ilu_ = std::move(factor);
    return s;
}

Vector Stage::apply(const Vector& r_full) const {
    if (ilu_) return ilu_->apply(r_full);
    Vector y = Vector::Zero(r_full.size());
    if (scope_.empty()) return y;  // empty scope: zero contribution
    Vector sub(scope_.size());
    for (std::size_t i = 0; i < scope_.size(); ++i) sub[i] = r_full[scope_[i]];
    const Vector sol = amg_ ? amg_->apply(sub) : direct_->solve(sub);
    for (std::size_t i = 0; i < scope_.size(); ++i) y[scope_[i]] = sol[i];
    return y;
}

Vector StagePreconditioner::apply(const Vector& r) const {
    switch (n_stages()) {
        case 1: return stages_[0].apply(r);
        case 2: return apply_two_stage(r);
        case 3: return apply_three_stage(r);
        default: throw SetupError("unsupported stage count");
    }
}

Vector StagePreconditioner::apply_two_stage(const Vector& r) const {
    if (n_stages() != 2) throw SetupError("two-stage apply needs exactly 2 stages");
    const Vector x = stages_[0].apply(r);
    const Vector z = r - a_flat_->apply(x);
    return x + stages_[1].apply(z);
}

Vector StagePreconditioner::apply_three_stage(const Vector& r) const {
    if (n_stages() != 3) throw SetupError("three-stage apply needs exactly 3 stages");
    const Vector x = stages_[0].apply(r);
    const Vector z = r - a_flat_->apply(x);
    const Vector v = stages_[1].apply(z);
    const Vector u = z - a_flat_->apply(v);
    return x + v + stages_[2].apply(u);
}

namespace {

std::shared_ptr<ScalarMatrix> flatten(const ScaledSystem& s) {
    return std::make_shared<ScalarMatrix>(s.a_bar.to_scalar());
}

Stage make_scoped(const ScalarMatrix& sub_matrix, std::vector<int> scope, SubSolver sub,
                  const AMGParams& amg_params) {
    if (scope.empty()) return Stage::scoped_direct({}, nullptr);
    if (sub == SubSolver::Amg)
        return Stage::scoped_amg(std::move(scope),
                                 std::make_shared<AMGHierarchy>(
                                     AMGHierarchy::setup(sub_matrix, amg_params)));
    return Stage::scoped_direct(std::move(scope),
                                std::make_shared<DenseFactor>(DenseFactor::factor(sub_matrix)));
}

}  // namespace

StagePreconditioner build_ilu0(const ScaledSystem& s) {
    StagePreconditioner p;
    p.spec_ = {Method::Ilu0, SubSolver::Direct};
    p.a_flat_ = flatten(s);
    p.stages_.push_back(
        Stage::full_ilu0(std::make_shared<ILU0Factor>(ILU0Factor::factor(*p.a_flat_))));
    return p;
}

StagePreconditioner build_cpr(const ScaledSystem& s, SubSolver pressure_solver,
                              const AMGParams& amg_params) {
    if (s.method != Method::Cpr) throw SetupError("build_cpr needs a CPR-scaled system");
    StagePreconditioner p;
    p.spec_ = {Method::Cpr, pressure_solver};
    p.a_flat_ = flatten(s);
    p.stages_.push_back(make_scoped(s.b_pp, s.a_bar.layout().indices_of(FieldSet::pressure()),
                                    pressure_solver, amg_params));
    p.stages_.push_back(
        Stage::full_ilu0(std::make_shared<ILU0Factor>(ILU0Factor::factor(*p.a_flat_))));
    return p;
}

StagePreconditioner build_cptr(const ScaledSystem& s) {
    if (s.method != Method::Cptr) throw SetupError("build_cptr needs a CPTR-scaled system");
    StagePreconditioner p;
    p.spec_ = {Method::Cptr, SubSolver::Direct};
    p.a_flat_ = flatten(s);
    p.stages_.push_back(make_scoped(s.b_ee, s.a_bar.layout().indices_of(FieldSet::elliptic()),
                                    SubSolver::Direct, {}));
    p.stages_.push_back(
        Stage::full_ilu0(std::make_shared<ILU0Factor>(ILU0Factor::factor(*p.a_flat_))));
    return p;
}

StagePreconditioner build_cptr3(const ScaledSystem& s, SubSolver sub_solver,
                                const AMGParams& amg_params) {
    if (s.method != Method::Cptr3) throw SetupError("build_cptr3 needs a CPTR3-scaled system");
    StagePreconditioner p;
    p.spec_ = {Method::Cptr3, sub_solver};
    p.a_flat_ = flatten(s);
    p.stages_.push_back(make_scoped(s.c_tt, s.a_bar.layout().indices_of(FieldSet::temperature()),
                                    sub_solver, amg_params));
    p.stages_.push_back(make_scoped(s.b_pp, s.a_bar.layout().indices_of(FieldSet::pressure()),
                                    sub_solver, amg_params));
    p.stages_.push_back(
        Stage::full_ilu0(std::make_shared<ILU0Factor>(ILU0Factor::factor(*p.a_flat_))));
    return p;
}

StagePreconditioner build_preconditioner(const ScaledSystem& s, const MethodSpec& spec,
                                         const AMGParams& amg_params) {
    switch (spec.method) {
        case Method::Ilu0: return build_ilu0(s);
        case Method::Cpr: return build_cpr(s, spec.sub, amg_params);
        case Method::Cptr: return build_cptr(s);
        case Method::Cptr3: return build_cptr3(s, spec.sub, amg_params);
    }
    throw ConfigError("unreachable method");
}

}  // namespace mprec
