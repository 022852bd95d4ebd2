#include "mprec/ilu0.hpp"

#include <cmath>

namespace mprec {

ILU0Factor ILU0Factor::factor(const ScalarMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("ILU(0) needs a square matrix");
    const int n = a.rows();
    ILU0Factor f;
    f.lu_ = a;
    f.diag_pos_.assign(n, -1);
    const auto& rp = f.lu_.row_ptr();
    const auto& ci = f.lu_.col_idx();
    auto& v = f.lu_.values();
    for (int i = 0; i < n; ++i)
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] == i) f.diag_pos_[i] = k;
    for (int i = 0; i < n; ++i)
        if (f.diag_pos_[i] < 0) throw SetupError("ILU(0): structurally absent diagonal");

    // Standard IKJ variant restricted to the pattern of A.
    for (int i = 1; i < n; ++i) {
        for (int kk = rp[i]; kk < rp[i + 1] && ci[kk] < i; ++kk) {
            const int k = ci[kk];
            const double piv = v[f.diag_pos_[k]];
            if (piv == 0.0) throw ZeroPivotError(k);
            const double factor = v[kk] / piv;
            v[kk] = factor;
            // Subtract factor * row k (upper part) from row i, pattern-limited.
            for (int kj = f.diag_pos_[k] + 1; kj < rp[k + 1]; ++kj) {
                const int j = ci[kj];
                if (double* p = f.lu_.find(i, j)) *p -= factor * v[kj];
            }
        }
        if (v[f.diag_pos_[i]] == 0.0) throw ZeroPivotError(i);
    }
    return f;
}

Vector ILU0Factor::apply(const Vector& r) const {
    const int n = dim();
    if (r.size() != n) throw DimensionError("ILU(0) apply length mismatch");
    const auto& rp = lu_.row_ptr();
    const auto& ci = lu_.col_idx();
    const auto& v = lu_.values();
    Vector y = r;
    for (int i = 0; i < n; ++i) {
        double acc = y[i];
        for (int k = rp[i]; k < rp[i + 1] && ci[k] < i; ++k) acc -= v[k] * y[ci[k]];
        y[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = y[i];
        for (int k = diag_pos_[i] + 1; k < rp[i + 1]; ++k) acc -= v[k] * y[ci[k]];
        y[i] = acc / v[diag_pos_[i]];
    }
    return y;
}

}  // namespace mprec
