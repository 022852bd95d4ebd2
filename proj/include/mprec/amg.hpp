#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mprec/dense_factor.hpp"
#include "mprec/scalar_matrix.hpp"

namespace mprec {

struct AMGParams {
    double strength_threshold = 0.25;
    int max_coarse_size = 1000;
    int max_levels = 25;
};

/// Classical Ruge-Stuben hierarchy: strength-of-connection coarsening with the
/// negative-coupling convention, direct interpolation, Galerkin coarse
/// operators, symmetric Gauss-Seidel smoothing and a dense coarsest solve.
class AMGHierarchy {
public:
    struct Level {
        ScalarMatrix a;
        ScalarMatrix p;   // interpolation to this level's fine grid
        ScalarMatrix r;   // restriction, r = p^T
        std::vector<int> diag_pos;
    };

    static AMGHierarchy setup(const ScalarMatrix& a, const AMGParams& params = {});

    /// One V-cycle with one symmetric Gauss-Seidel pre- and post-sweep per
    /// level and a zero initial guess.
    Vector apply(const Vector& r) const;

    int n_levels() const { return static_cast<int>(levels_.size()); }
    const Level& level(int l) const { return levels_[l]; }
    int dim() const { return levels_.front().a.rows(); }

    /// Plain-text summary: level sizes, nnz and operator complexity.
    std::string summary() const;

private:
    void cycle(int l, const Vector& r, Vector& x) const;

    std::vector<Level> levels_;  // levels_[0].p / .r are unused (finest level)
    DenseFactor coarse_;
    AMGParams params_;
};

/// C/F splitting + direct interpolation for one level. Exposed for testing.
struct CoarseningResult {
    std::vector<char> is_coarse;
    ScalarMatrix p;
};
CoarseningResult rs_coarsen(const ScalarMatrix& a, double strength_threshold);

}  // namespace mprec
