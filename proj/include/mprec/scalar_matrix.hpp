#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mprec/errors.hpp"

namespace mprec {

using Vector = Eigen::VectorXd;

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix of scalar (1x1) entries, kept in canonical
/// form: column indices strictly increasing within each row, no duplicates.
class ScalarMatrix {
public:
    ScalarMatrix() = default;
    ScalarMatrix(int rows, int cols) : n_rows_(rows), n_cols_(cols), row_ptr_(rows + 1, 0) {}

    /// Canonicalizing constructor; duplicate entries are summed.
    static ScalarMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
    static ScalarMatrix identity(int n);
    static ScalarMatrix from_dense(const Eigen::MatrixXd& d, double drop_below = 0.0);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    int nnz() const { return static_cast<int>(col_idx_.size()); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double coeff(int i, int j) const;       // 0 when structurally absent
    double* find(int i, int j);             // nullptr when absent
    bool has_entry(int i, int j) const;

    Vector apply(const Vector& x) const;    // y = A x
    Vector apply_transpose(const Vector& x) const;

    ScalarMatrix transpose() const;
    Eigen::MatrixXd to_dense() const;
    double frobenius_norm() const;

    /// C = A * B with exact sparse arithmetic.
    static ScalarMatrix multiply(const ScalarMatrix& a, const ScalarMatrix& b);
    /// C = alpha * A + beta * B (patterns merged).
    static ScalarMatrix add(double alpha, const ScalarMatrix& a, double beta,
                            const ScalarMatrix& b);

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

}  // namespace mprec
