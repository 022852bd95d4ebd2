#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mprec/scalar_matrix.hpp"

namespace mprec {

enum class SpectrumMode { FullDense, Extremal };

enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite };

/// Eigenvalue report for a decoupled sub-system (offline diagnostic; never
/// invoked during solves).
struct SpectrumSummary {
    SpectrumMode mode = SpectrumMode::FullDense;
    std::vector<std::complex<double>> eigenvalues;  // full_dense only
    int n_positive = 0;   // real parts, full_dense only
    int n_negative = 0;
    int n_near_zero = 0;
    double min_real = 0.0;  // extremal estimates (exact in full_dense mode)
    double max_real = 0.0;
    Definiteness symmetric_part = Definiteness::Indefinite;
    bool extremal_converged = true;
};

std::string to_string(Definiteness d);

/// full_dense computes all eigenvalues (dimension <= 20000); extremal runs
/// power iterations on the symmetric part for the extreme real parts.
SpectrumSummary spectral_diagnostic(const ScalarMatrix& b,
                                    SpectrumMode mode = SpectrumMode::FullDense);

}  // namespace mprec
