#pragma once

#include <functional>
#include <vector>

#include "mprec/scalar_matrix.hpp"

namespace mprec {

/// Matrix-free linear operator handle.
struct LinearOperator {
    int dim = 0;
    std::function<Vector(const Vector&)> apply;

    static LinearOperator from(const ScalarMatrix& a) {
        return {a.rows(), [&a](const Vector& x) { return a.apply(x); }};
    }
    static LinearOperator identity(int n) {
        return {n, [](const Vector& x) { return x; }};
    }
};

struct GmresOptions {
    double tol = 1e-8;
    int max_iter = 500;
};

struct SolveResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
    bool breakdown = false;
    std::vector<double> residual_history;  // relative preconditioned residuals
    double final_true_residual = 0.0;      // ||b - A x|| / ||b||
    double wall_time_s = 0.0;
};

/// Right-preconditioned GMRES without restart: Arnoldi with modified
/// Gram-Schmidt (one reorthogonalization pass on heavy cancellation) and
/// Givens-rotation least squares. Zero initial guess.
SolveResult gmres(const LinearOperator& a, const Vector& b, const LinearOperator& m,
                  const GmresOptions& opts = {});

/// ||b - A x||_2 / ||b||_2 on the original (unscaled) system.
double residual_check(const LinearOperator& a, const Vector& b, const Vector& x);

}  // namespace mprec
