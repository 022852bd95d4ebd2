#include "mprec/amg.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace mprec {

namespace {

enum class Mark : char { Undecided, Coarse, Fine };

std::vector<int> diag_positions(const ScalarMatrix& a) {
    std::vector<int> d(a.rows(), -1);
    for (int i = 0; i < a.rows(); ++i)
        for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
            if (a.col_idx()[k] == i) d[i] = k;
    for (int i = 0; i < a.rows(); ++i)
        if (d[i] < 0) throw SetupError("AMG: structurally absent diagonal");
    return d;
}

// One symmetric Gauss-Seidel sweep (ascending then descending), in place.
void sym_gauss_seidel(const ScalarMatrix& a, const std::vector<int>& diag, Vector& x,
                      const Vector& b) {
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    const int n = a.rows();
    for (int i = 0; i < n; ++i) {
        double acc = b[i];
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] != i) acc -= v[k] * x[ci[k]];
        x[i] = acc / v[diag[i]];
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] != i) acc -= v[k] * x[ci[k]];
        x[i] = acc / v[diag[i]];
    }
}

}  // namespace

CoarseningResult rs_coarsen(const ScalarMatrix& a, double theta) {
    const int n = a.rows();
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& av = a.values();

    // Strength of connection: j strongly influences i when -a_ij >= theta * max_k(-a_ik).
    std::vector<std::vector<int>> strong(n);       // S_i: i depends on these
    std::vector<std::vector<int>> strong_t(n);     // S^T_i: these depend on i
    for (int i = 0; i < n; ++i) {
        double m = 0.0;
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] != i) m = std::max(m, -av[k]);
        if (m <= 0.0) continue;
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            const int j = ci[k];
            if (j != i && -av[k] >= theta * m) {
                strong[i].push_back(j);
                strong_t[j].push_back(i);
            }
        }
    }

    std::vector<Mark> mark(n, Mark::Undecided);
    std::vector<int> lambda(n);
    // Lazy max-heap keyed by (lambda, lowest index wins ties).
    using Entry = std::pair<int, int>;  // (lambda, -index)
    std::priority_queue<Entry> heap;
    int n_undecided = 0;
    for (int i = 0; i < n; ++i) {
        lambda[i] = static_cast<int>(strong_t[i].size());
        if (strong[i].empty() && strong_t[i].empty()) {
            mark[i] = Mark::Fine;  // unconnected: smoothing handles it alone
        } else {
            heap.emplace(lambda[i], -i);
            ++n_undecided;
        }
    }

    while (n_undecided > 0) {
        int i = -1;
        while (!heap.empty()) {
            auto [lam, neg] = heap.top();
            heap.pop();
            const int cand = -neg;
            if (mark[cand] == Mark::Undecided && lam == lambda[cand]) {
                i = cand;
                break;
            }
        }
        if (i < 0) break;
        mark[i] = Mark::Coarse;
        --n_undecided;
        for (int j : strong_t[i]) {
            if (mark[j] != Mark::Undecided) continue;
            mark[j] = Mark::Fine;
            --n_undecided;
            for (int k : strong[j]) {
                if (mark[k] == Mark::Undecided) {
                    ++lambda[k];
                    heap.emplace(lambda[k], -k);
                }
            }
        }
    }

    // Second pass: a strong F-F pair must share a common interpolatory C
    // point; promote the offending neighbor otherwise.
    std::vector<char> in_ci(n, 0);
    for (int i = 0; i < n; ++i) {
        if (mark[i] != Mark::Fine || strong[i].empty()) continue;
        for (int j : strong[i])
            if (mark[j] == Mark::Coarse) in_ci[j] = 1;
        for (int j : strong[i]) {
            if (mark[j] != Mark::Fine) continue;
            bool shared = false;
            for (int k : strong[j])
                if (in_ci[k]) {
                    shared = true;
                    break;
                }
            if (!shared) {
                mark[j] = Mark::Coarse;
                in_ci[j] = 1;
            }
        }
        for (int j : strong[i]) in_ci[j] = 0;
        in_ci[i] = 0;
    }
    // Every connected F point must keep at least one strong C neighbor.
    for (int i = 0; i < n; ++i) {
        if (mark[i] != Mark::Fine || strong[i].empty()) continue;
        bool has_c = false;
        for (int j : strong[i])
            if (mark[j] == Mark::Coarse) has_c = true;
        if (!has_c) mark[i] = Mark::Coarse;
    }

    std::vector<int> coarse_id(n, -1);
    int nc = 0;
    for (int i = 0; i < n; ++i)
        if (mark[i] == Mark::Coarse) coarse_id[i] = nc++;

    // Direct interpolation from strong coarse neighbors.
    std::vector<Triplet> pt;
    for (int i = 0; i < n; ++i) {
        if (mark[i] == Mark::Coarse) {
            pt.push_back({i, coarse_id[i], 1.0});
            continue;
        }
        if (strong[i].empty()) continue;  // unconnected row interpolates zero
        double sum_neg_all = 0.0, sum_pos_all = 0.0, sum_neg_c = 0.0, sum_pos_c = 0.0;
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            const int j = ci[k];
            if (j == i) continue;
            (av[k] < 0.0 ? sum_neg_all : sum_pos_all) += av[k];
            if (coarse_id[j] >= 0 &&
                std::find(strong[i].begin(), strong[i].end(), j) != strong[i].end())
                (av[k] < 0.0 ? sum_neg_c : sum_pos_c) += av[k];
        }
        double aii = 0.0;
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] == i) aii = av[k];
        if (sum_pos_c == 0.0) aii += sum_pos_all;  // lump positives when no positive C entry
        const double alpha = sum_neg_c != 0.0 ? sum_neg_all / sum_neg_c : 0.0;
        const double beta = sum_pos_c != 0.0 ? sum_pos_all / sum_pos_c : 0.0;
        for (int j : strong[i]) {
            if (coarse_id[j] < 0) continue;
            const double aij = a.coeff(i, j);
            const double w = aij < 0.0 ? -alpha * aij / aii : -beta * aij / aii;
            if (w != 0.0) pt.push_back({i, coarse_id[j], w});
        }
    }

    CoarseningResult res;
    res.is_coarse.assign(n, 0);
    for (int i = 0; i < n; ++i) res.is_coarse[i] = coarse_id[i] >= 0 ? 1 : 0;
    res.p = ScalarMatrix::from_triplets(n, nc, std::move(pt));
    return res;
}

AMGHierarchy AMGHierarchy::setup(const ScalarMatrix& a, const AMGParams& params) {
    if (a.rows() != a.cols()) throw DimensionError("AMG needs a square matrix");
    AMGHierarchy h;
    h.params_ = params;
    Level finest;
    finest.a = a;
    finest.diag_pos = diag_positions(a);
    h.levels_.push_back(std::move(finest));

    while (h.levels_.back().a.rows() > params.max_coarse_size &&
           static_cast<int>(h.levels_.size()) < params.max_levels) {
        const ScalarMatrix& af = h.levels_.back().a;
        CoarseningResult cr = rs_coarsen(af, params.strength_threshold);
        const int nc = cr.p.cols();
        if (nc == 0) break;  // everything unconnected, coarse solve not needed
        if (nc > static_cast<int>(0.95 * af.rows()))
            throw SetupError("AMG coarsening stagnated at size " + std::to_string(af.rows()));
        Level lvl;
        lvl.p = std::move(cr.p);
        lvl.r = lvl.p.transpose();
        lvl.a = ScalarMatrix::multiply(lvl.r, ScalarMatrix::multiply(af, lvl.p));
        lvl.diag_pos = diag_positions(lvl.a);
        h.levels_.push_back(std::move(lvl));
    }
    h.coarse_ = DenseFactor::factor(h.levels_.back().a);
    return h;
}

void AMGHierarchy::cycle(int l, const Vector& r, Vector& x) const {
    const Level& lvl = levels_[l];
    if (l == n_levels() - 1) {
        x = coarse_.solve(r);
        return;
    }
    x.setZero();
    sym_gauss_seidel(lvl.a, lvl.diag_pos, x, r);
    const Vector resid = r - lvl.a.apply(x);
    const Level& next = levels_[l + 1];
    const Vector rc = next.r.apply(resid);
    Vector ec = Vector::Zero(rc.size());
    cycle(l + 1, rc, ec);
    x += next.p.apply(ec);
    sym_gauss_seidel(lvl.a, lvl.diag_pos, x, r);
}

Vector AMGHierarchy::apply(const Vector& r) const {
    if (r.size() != dim()) throw DimensionError("AMG apply length mismatch");
    Vector x = Vector::Zero(r.size());
    cycle(0, r, x);
    return x;
}

std::string AMGHierarchy::summary() const {
    std::ostringstream os;
    double nnz_total = 0.0;
    for (const auto& lvl : levels_) nnz_total += lvl.a.nnz();
    os << "AMG hierarchy: " << n_levels() << " level(s)\n";
    for (int l = 0; l < n_levels(); ++l)
        os << "  level " << l << ": n = " << levels_[l].a.rows()
           << ", nnz = " << levels_[l].a.nnz() << "\n";
    os << "  operator complexity = " << nnz_total / levels_.front().a.nnz() << "\n";
    return os.str();
}

}  // namespace mprec
