#include "mprec/gmres.hpp"

#include <chrono>
#include <cmath>

namespace mprec {

SolveResult gmres(const LinearOperator& a, const Vector& b, const LinearOperator& m,
                  const GmresOptions& opts) {
    if (b.size() != a.dim) throw DimensionError("gmres: rhs length mismatch");
    if (opts.tol <= 0.0) throw DimensionError("gmres: tolerance must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const int n = a.dim;
    SolveResult res;
    res.x = Vector::Zero(n);

    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }

    const int max_iter = std::min(opts.max_iter, n);
    std::vector<Vector> v;  // Arnoldi basis
    v.reserve(max_iter + 1);
    v.push_back(b / bnorm);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
    std::vector<double> cs(max_iter), sn(max_iter);
    Vector g = Vector::Zero(max_iter + 1);
    g[0] = bnorm;
    res.residual_history.push_back(1.0);

    int k = 0;
    for (; k < max_iter; ++k) {
        Vector w = a.apply(m.apply(v[k]));
        const double pre_norm = w.norm();
        for (int i = 0; i <= k; ++i) {
            h(i, k) = v[i].dot(w);
            w -= h(i, k) * v[i];
        }
        // One reorthogonalization pass when cancellation was heavy.
        if (w.norm() < 0.7 * pre_norm) {
            for (int i = 0; i <= k; ++i) {
                const double c = v[i].dot(w);
                h(i, k) += c;
                w -= c * v[i];
            }
        }
        h(k + 1, k) = w.norm();
        const double subdiag = h(k + 1, k);

        for (int i = 0; i < k; ++i) {
            const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
            h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
            h(i, k) = t;
        }
        const double denom = std::hypot(h(k, k), h(k + 1, k));
        if (denom == 0.0) {
            res.breakdown = true;
            ++k;
            break;
        }
        cs[k] = h(k, k) / denom;
        sn[k] = h(k + 1, k) / denom;
        h(k, k) = denom;
        h(k + 1, k) = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k] * g[k];

        const double rel = std::abs(g[k + 1]) / bnorm;
        res.residual_history.push_back(rel);
        if (rel <= opts.tol) {
            ++k;
            break;
        }
        if (subdiag == 0.0) {
            // Arnoldi norm underflow without convergence: stagnation.
            res.breakdown = true;
            ++k;
            break;
        }
        v.push_back(w / subdiag);
    }

    res.iterations = k;
    if (k > 0) {
        // Back-substitute the triangular least-squares system.
        Vector y = Vector::Zero(k);
        for (int i = k - 1; i >= 0; --i) {
            double acc = g[i];
            for (int j = i + 1; j < k; ++j) acc -= h(i, j) * y[j];
            y[i] = acc / h(i, i);
        }
        Vector z = Vector::Zero(n);
        for (int i = 0; i < k; ++i) z += y[i] * v[i];
        res.x = m.apply(z);
    }
    res.final_true_residual = (b - a.apply(res.x)).norm() / bnorm;
    res.converged = res.residual_history.back() <= opts.tol ||
                    res.final_true_residual <= opts.tol;
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

double residual_check(const LinearOperator& a, const Vector& b, const Vector& x) {
    const double bnorm = b.norm();
    if (bnorm == 0.0) return (a.apply(x)).norm();
    return (b - a.apply(x)).norm() / bnorm;
}

}  // namespace mprec
