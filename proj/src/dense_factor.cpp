#include "mprec/dense_factor.hpp"

#include <cmath>

namespace mprec {

DenseFactor DenseFactor::factor(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionError("dense factor needs a square matrix");
    DenseFactor f;
    f.lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(a);
    if (a.rows() > 0) {
        const double scale = a.cwiseAbs().maxCoeff();
        const Eigen::MatrixXd& u = f.lu_.matrixLU();
        for (int i = 0; i < u.rows(); ++i)
            if (std::abs(u(i, i)) <= 1e-14 * scale)
                throw SingularBlockError(i, "dense-factor pivot");
    }
    return f;
}

Vector DenseFactor::solve(const Vector& r) const {
    if (r.size() != dim()) throw DimensionError("dense solve length mismatch");
    return lu_.solve(r);
}

}  // namespace mprec
