#pragma once

#include <Eigen/LU>

#include "mprec/scalar_matrix.hpp"

namespace mprec {

/// Dense LU with partial pivoting, used for exact sub-solves and AMG coarse
/// grids.
class DenseFactor {
public:
    DenseFactor() = default;

    static DenseFactor factor(const Eigen::MatrixXd& a);
    static DenseFactor factor(const ScalarMatrix& a) { return factor(a.to_dense()); }

    int dim() const { return static_cast<int>(lu_.rows()); }
    Vector solve(const Vector& r) const;

private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace mprec
