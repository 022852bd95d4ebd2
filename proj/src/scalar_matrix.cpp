#include "mprec/scalar_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace mprec {

ScalarMatrix ScalarMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw IndexError("triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    ScalarMatrix m(rows, cols);
    m.col_idx_.reserve(entries.size());
    m.values_.reserve(entries.size());
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < entries.size() && entries[i].row == r) {
            const int c = entries[i].col;
            double v = 0.0;
            while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
                v += entries[i].value;
                ++i;
            }
            m.col_idx_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
    }
    return m;
}

ScalarMatrix ScalarMatrix::identity(int n) {
    ScalarMatrix m(n, n);
    m.col_idx_.resize(n);
    m.values_.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        m.col_idx_[i] = i;
        m.row_ptr_[i + 1] = i + 1;
    }
    return m;
}

ScalarMatrix ScalarMatrix::from_dense(const Eigen::MatrixXd& d, double drop_below) {
    std::vector<Triplet> t;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            if (std::abs(d(i, j)) > drop_below || (drop_below == 0.0 && d(i, j) != 0.0))
                t.push_back({i, j, d(i, j)});
    return from_triplets(static_cast<int>(d.rows()), static_cast<int>(d.cols()), std::move(t));
}

double ScalarMatrix::coeff(int i, int j) const {
    auto begin = col_idx_.begin() + row_ptr_[i];
    auto end = col_idx_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it != end && *it == j) return values_[it - col_idx_.begin()];
    return 0.0;
}

double* ScalarMatrix::find(int i, int j) {
    auto begin = col_idx_.begin() + row_ptr_[i];
    auto end = col_idx_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it != end && *it == j) return &values_[it - col_idx_.begin()];
    return nullptr;
}

bool ScalarMatrix::has_entry(int i, int j) const {
    auto begin = col_idx_.begin() + row_ptr_[i];
    auto end = col_idx_.begin() + row_ptr_[i + 1];
    return std::binary_search(begin, end, j);
}

Vector ScalarMatrix::apply(const Vector& x) const {
    if (x.size() != n_cols_) throw DimensionError("spmv length mismatch");
    Vector y = Vector::Zero(n_rows_);
    for (int i = 0; i < n_rows_; ++i) {
        double acc = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        y[i] = acc;
    }
    return y;
}

Vector ScalarMatrix::apply_transpose(const Vector& x) const {
    if (x.size() != n_rows_) throw DimensionError("spmv length mismatch");
    Vector y = Vector::Zero(n_cols_);
    for (int i = 0; i < n_rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * x[i];
    return y;
}

ScalarMatrix ScalarMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(col_idx_.size());
    for (int i = 0; i < n_rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            t.push_back({col_idx_[k], i, values_[k]});
    return from_triplets(n_cols_, n_rows_, std::move(t));
}

Eigen::MatrixXd ScalarMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_rows_, n_cols_);
    for (int i = 0; i < n_rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
    return d;
}

double ScalarMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

ScalarMatrix ScalarMatrix::multiply(const ScalarMatrix& a, const ScalarMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("sparse multiply dimension mismatch");
    ScalarMatrix c(a.rows(), b.cols());
    std::vector<double> work(b.cols(), 0.0);
    std::vector<char> mark(b.cols(), 0);
    std::vector<int> touched;
    touched.reserve(64);
    for (int i = 0; i < a.rows(); ++i) {
        touched.clear();
        for (int ka = a.row_ptr_[i]; ka < a.row_ptr_[i + 1]; ++ka) {
            const int j = a.col_idx_[ka];
            const double av = a.values_[ka];
            for (int kb = b.row_ptr_[j]; kb < b.row_ptr_[j + 1]; ++kb) {
                const int col = b.col_idx_[kb];
                if (!mark[col]) {
                    mark[col] = 1;
                    touched.push_back(col);
                }
                work[col] += av * b.values_[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int col : touched) {
            mark[col] = 0;
            c.col_idx_.push_back(col);
            c.values_.push_back(work[col]);
            work[col] = 0.0;
        }
        c.row_ptr_[i + 1] = static_cast<int>(c.col_idx_.size());
    }
    return c;
}

ScalarMatrix ScalarMatrix::add(double alpha, const ScalarMatrix& a, double beta,
                               const ScalarMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("sparse add dimension mismatch");
    ScalarMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        int ka = a.row_ptr_[i], kb = b.row_ptr_[i];
        const int ea = a.row_ptr_[i + 1], eb = b.row_ptr_[i + 1];
        while (ka < ea || kb < eb) {
            int ca = ka < ea ? a.col_idx_[ka] : a.cols();
            int cb = kb < eb ? b.col_idx_[kb] : b.cols();
            if (ca < cb) {
                c.col_idx_.push_back(ca);
                c.values_.push_back(alpha * a.values_[ka++]);
            } else if (cb < ca) {
                c.col_idx_.push_back(cb);
                c.values_.push_back(beta * b.values_[kb++]);
            } else {
                c.col_idx_.push_back(ca);
                c.values_.push_back(alpha * a.values_[ka++] + beta * b.values_[kb++]);
            }
        }
        c.row_ptr_[i + 1] = static_cast<int>(c.col_idx_.size());
    }
    return c;
}

}  // namespace mprec
