#pragma once

#include "mprec/scalar_matrix.hpp"

namespace mprec {

/// Zero-fill incomplete LU factors sharing the sparsity pattern of the input
/// matrix. L carries a unit diagonal (not stored); U holds the pivots.
class ILU0Factor {
public:
    /// Deterministic row-order elimination. A zero pivot aborts; no diagonal
    /// perturbation is applied.
    static ILU0Factor factor(const ScalarMatrix& a);

    /// Forward/back triangular solves, y = U^-1 L^-1 r.
    Vector apply(const Vector& r) const;

    int dim() const { return lu_.rows(); }
    const ScalarMatrix& factors() const { return lu_; }

private:
    ScalarMatrix lu_;           // L strictly below, U on and above the diagonal
    std::vector<int> diag_pos_; // position of the diagonal entry in each row
};

}  // namespace mprec
