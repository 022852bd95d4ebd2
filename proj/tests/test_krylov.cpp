#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mprec/condense.hpp"
#include "mprec/gmres.hpp"
#include "mprec/stages.hpp"

using namespace mprec;

namespace {

Vector random_vec(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return Vector::NullaryExpr(n, [&](Eigen::Index) { return u(rng); });
}

ScalarMatrix laplacian_1d(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return ScalarMatrix::from_triplets(n, n, std::move(t));
}

ScalarMatrix random_nonsymmetric(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 6.0 + u(rng)});
        for (int k = 0; k < 3; ++k) {
            const int j = int(rng() % n);
            if (j != i) t.push_back({i, j, u(rng)});
        }
    }
    return ScalarMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_CASE("identity system converges in one iteration") {
    const int n = 20;
    const Vector b = random_vec(n, 1);
    const auto res = gmres(LinearOperator::identity(n), b, LinearOperator::identity(n));
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK((res.x - b).norm() < 1e-14);
}

TEST_CASE("unpreconditioned solve finishes within dim iterations and matches dense") {
    const int n = 40;
    const auto a = random_nonsymmetric(n, 2);
    const Vector b = random_vec(n, 3);
    const auto res = gmres(LinearOperator::from(a), b, LinearOperator::identity(n),
                           {1e-10, 200});
    CHECK(res.converged);
    CHECK(res.iterations <= n);
    const Vector x_ref = Eigen::PartialPivLU<Eigen::MatrixXd>(a.to_dense()).solve(b);
    CHECK((res.x - x_ref).norm() / x_ref.norm() < 1e-6);
    CHECK(res.final_true_residual < 1e-8);
}

TEST_CASE("an exact inverse preconditioner converges in one iteration") {
    const int n = 25;
    const auto a = random_nonsymmetric(n, 5);
    const Eigen::MatrixXd a_inv = a.to_dense().inverse();
    const LinearOperator m{n, [&](const Vector& r) { return Vector(a_inv * r); }};
    const Vector b = random_vec(n, 7);
    const auto res = gmres(LinearOperator::from(a), b, m);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(res.final_true_residual < 1e-10);
}

TEST_CASE("residual history is monotone non-increasing") {
    const auto a = laplacian_1d(60);
    const Vector b = random_vec(60, 11);
    const auto res = gmres(LinearOperator::from(a), b, LinearOperator::identity(60),
                           {1e-10, 200});
    CHECK(res.converged);
    REQUIRE(res.residual_history.size() >= 2);
    for (size_t i = 1; i < res.residual_history.size(); ++i)
        CHECK(res.residual_history[i] <= res.residual_history[i - 1] + 1e-10);
    CHECK(res.residual_history.back() <= 1e-10);
}

TEST_CASE("repeated solves are bitwise deterministic") {
    const auto a = random_nonsymmetric(30, 13);
    const Vector b = random_vec(30, 17);
    const auto r1 = gmres(LinearOperator::from(a), b, LinearOperator::identity(30));
    const auto r2 = gmres(LinearOperator::from(a), b, LinearOperator::identity(30));
    CHECK(r1.iterations == r2.iterations);
    CHECK((r1.x - r2.x).norm() == 0.0);
    CHECK(r1.residual_history == r2.residual_history);
}

TEST_CASE("zero right-hand side returns the zero solution immediately") {
    const auto a = laplacian_1d(10);
    const auto res = gmres(LinearOperator::from(a), Vector::Zero(10),
                           LinearOperator::identity(10));
    CHECK(res.converged);
    CHECK(res.x.norm() == 0.0);
}

TEST_CASE("residual_check evaluates the unscaled system") {
    const auto a = laplacian_1d(8);
    const Vector x = random_vec(8, 19);
    const Vector b = a.apply(x);
    CHECK(residual_check(LinearOperator::from(a), b, x) < 1e-15);
    CHECK(residual_check(LinearOperator::from(a), b, Vector::Zero(8)) ==
          doctest::Approx(1.0));
}

TEST_CASE("preconditioned solution matches the unscaled solve") {
    // same coupled test matrix through two routes: plain GMRES on A and
    // preconditioned GMRES on the scaled system
    std::mt19937_64 rng(23);
    const std::vector<PhaseState> states{PhaseState::OWG, PhaseState::OG, PhaseState::G,
                                         PhaseState::OWG, PhaseState::OG};
    const GlobalJacobian j = make_synthetic_global(states, 5, 1, 23);
    const ReducedSystem red = condense(j);
    const Vector x_ref =
        Eigen::PartialPivLU<Eigen::MatrixXd>(red.a.to_dense()).solve(red.b);

    for (const char* name : {"cpr-direct", "cptr-direct", "cptr3-direct"}) {
        const MethodSpec spec = parse_method(name);
        const ScaledSystem s = left_scale(red.a, red.b, spec.method);
        const StagePreconditioner m = build_preconditioner(s, spec);
        const auto res = gmres(LinearOperator::from(m.a_bar()), s.b_bar, m.as_operator(),
                               {1e-12, 200});
        CHECK(res.converged);
        CHECK((res.x - x_ref).norm() / x_ref.norm() < 1e-8);
    }
}

TEST_CASE("iteration cap reports non-convergence honestly") {
    const auto a = laplacian_1d(100);
    const Vector b = random_vec(100, 29);
    const auto res = gmres(LinearOperator::from(a), b, LinearOperator::identity(100),
                           {1e-14, 5});
    CHECK(!res.converged);
    CHECK(res.iterations == 5);
    CHECK(res.final_true_residual > 1e-14);
}
