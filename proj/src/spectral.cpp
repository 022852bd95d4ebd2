#include "mprec/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace mprec {

std::string to_string(Definiteness d) {
    switch (d) {
        case Definiteness::PositiveDefinite: return "positive-definite";
        case Definiteness::NegativeDefinite: return "negative-definite";
        case Definiteness::Indefinite: return "indefinite";
    }
    return "?";
}

namespace {

Definiteness classify(double min_sym, double max_sym) {
    const double scale = std::max(std::abs(min_sym), std::abs(max_sym));
    const double tol = 1e-12 * (scale > 0.0 ? scale : 1.0);
    if (min_sym > tol) return Definiteness::PositiveDefinite;
    if (max_sym < -tol) return Definiteness::NegativeDefinite;
    return Definiteness::Indefinite;
}

/// Largest-magnitude eigenvalue of the shifted symmetric operator S - shift*I.
bool power_extreme(const ScalarMatrix& s_upper, const ScalarMatrix& s_lower, double shift,
                   double& eig, int max_iter = 2000, double tol = 1e-8) {
    // s_upper/s_lower together apply the symmetric part without forming it.
    const int n = s_upper.rows();
    Vector v = Vector::Ones(n).normalized();
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = 0.5 * (s_upper.apply(v) + s_lower.apply_transpose(v)) - shift * v;
        // Rayleigh quotient of the unshifted symmetric part at the current vector
        const double lam = v.dot(w) + shift;
        const double norm = w.norm();
        if (norm == 0.0) {
            eig = lam;
            return true;
        }
        v = w / norm;
        if (it > 3 && std::abs(lam - prev) <= tol * std::max(1.0, std::abs(lam))) {
            eig = lam;
            return true;
        }
        prev = lam;
    }
    eig = prev;
    return false;
}

}  // namespace

SpectrumSummary spectral_diagnostic(const ScalarMatrix& b, SpectrumMode mode) {
    if (b.rows() != b.cols()) throw DimensionError("spectral diagnostic needs a square matrix");
    SpectrumSummary s;
    s.mode = mode;
    if (mode == SpectrumMode::FullDense) {
        if (b.rows() > 20000) throw DimensionError("full_dense limited to dimension 20000");
        const Eigen::MatrixXd d = b.to_dense();
        Eigen::EigenSolver<Eigen::MatrixXd> es(d, false);
        double max_abs_re = 0.0;
        for (int i = 0; i < d.rows(); ++i) {
            s.eigenvalues.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
            max_abs_re = std::max(max_abs_re, std::abs(es.eigenvalues()[i].real()));
        }
        const double near_tol = 1e-12 * (max_abs_re > 0.0 ? max_abs_re : 1.0);
        s.min_real = std::numeric_limits<double>::infinity();
        s.max_real = -std::numeric_limits<double>::infinity();
        for (const auto& e : s.eigenvalues) {
            s.min_real = std::min(s.min_real, e.real());
            s.max_real = std::max(s.max_real, e.real());
            if (std::abs(e.real()) <= near_tol)
                ++s.n_near_zero;
            else if (e.real() > 0.0)
                ++s.n_positive;
            else
                ++s.n_negative;
        }
        const Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ses(sym, Eigen::EigenvaluesOnly);
        s.symmetric_part = classify(ses.eigenvalues().minCoeff(), ses.eigenvalues().maxCoeff());
        return s;
    }

    // Extremal mode: dominant eigenvalue of the symmetric part, then the
    // opposite extreme through a spectral shift.
    double lam1 = 0.0, lam2 = 0.0;
    const bool ok1 = power_extreme(b, b, 0.0, lam1);
    const bool ok2 = power_extreme(b, b, lam1, lam2);
    s.extremal_converged = ok1 && ok2;
    s.min_real = std::min(lam1, lam2);
    s.max_real = std::max(lam1, lam2);
    s.symmetric_part = classify(s.min_real, s.max_real);
    return s;
}

}  // namespace mprec
