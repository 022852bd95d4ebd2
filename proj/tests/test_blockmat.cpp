#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "mprec/block_matrix.hpp"
#include "mprec/matrix_io.hpp"

using namespace mprec;

namespace {

Eigen::MatrixXd random_dense(int r, int c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

/// Random block tridiagonal system with a dominant diagonal.
BlockMatrix random_block_system(int n_cells, int n_s, std::mt19937_64& rng) {
    const FieldLayout layout = FieldLayout::uniform(n_cells, n_s, true, true);
    const int m = n_s + 2;
    std::vector<BlockEntry> entries;
    for (int c = 0; c < n_cells; ++c) {
        Eigen::MatrixXd d = random_dense(m, m, rng);
        d.diagonal().array() += 4.0 * m;
        entries.push_back({c, c, d});
        if (c + 1 < n_cells) {
            entries.push_back({c, c + 1, random_dense(m, m, rng)});
            entries.push_back({c + 1, c, random_dense(m, m, rng)});
        }
    }
    return BlockMatrix::assemble(entries, layout);
}

}  // namespace

TEST_CASE("field layout basics") {
    const FieldLayout lay = FieldLayout::uniform(3, 2, true, true);
    CHECK(lay.n_cells() == 3);
    CHECK(lay.n_unknowns() == 12);
    CHECK(lay.cell_size(1) == 4);
    CHECK(lay.p_index(1) == 6);
    CHECK(lay.t_index(1) == 7);
    CHECK(lay.field_of(4) == Field::S);
    CHECK(lay.field_of(6) == Field::P);
    CHECK(lay.field_of(7) == Field::T);
    CHECK(lay.cell_of(7) == 1);

    const std::vector<int> p = lay.indices_of(FieldSet::pressure());
    CHECK(p == std::vector<int>{2, 6, 10});
    const std::vector<int> e = lay.indices_of(FieldSet::elliptic());
    CHECK(e == std::vector<int>{2, 3, 6, 7, 10, 11});
}

TEST_CASE("field layout from tags round-trips uniform") {
    const FieldLayout lay = FieldLayout::uniform(2, 1, true, true);
    std::vector<std::pair<int, Field>> tags;
    for (int i = 0; i < lay.n_unknowns(); ++i) tags.emplace_back(lay.cell_of(i), lay.field_of(i));
    CHECK(FieldLayout::from_tags(tags) == lay);
}

TEST_CASE("field layout degenerate variants") {
    const FieldLayout no_t = FieldLayout::uniform(2, 1, true, false);
    CHECK(no_t.cell_size(0) == 2);
    CHECK(no_t.indices_of(FieldSet::temperature()).empty());
    const FieldLayout p_only = FieldLayout::uniform(4, 0, true, false);
    CHECK(p_only.n_unknowns() == 4);
    CHECK_THROWS_AS((void)p_only.t_index(0), IndexError);
}

TEST_CASE("scalar matrix canonical form and duplicate summation") {
    const ScalarMatrix a =
        ScalarMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {0, 0, 2.0}, {0, 1, 0.5}, {1, 1, 3.0}});
    CHECK(a.nnz() == 3);
    CHECK(a.coeff(0, 1) == 1.5);
    CHECK(a.coeff(0, 0) == 2.0);
    CHECK(a.coeff(1, 0) == 0.0);
    CHECK(!a.has_entry(1, 0));
}

TEST_CASE("scalar matrix products match dense oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> ta, tb;
    for (int k = 0; k < 120; ++k) {
        ta.push_back({int(rng() % 20), int(rng() % 20), u(rng)});
        tb.push_back({int(rng() % 20), int(rng() % 20), u(rng)});
    }
    const ScalarMatrix a = ScalarMatrix::from_triplets(20, 20, ta);
    const ScalarMatrix b = ScalarMatrix::from_triplets(20, 20, tb);

    const Eigen::MatrixXd prod = ScalarMatrix::multiply(a, b).to_dense();
    CHECK((prod - a.to_dense() * b.to_dense()).norm() < 1e-13);
    const Eigen::MatrixXd sum = ScalarMatrix::add(2.0, a, -0.5, b).to_dense();
    CHECK((sum - (2.0 * a.to_dense() - 0.5 * b.to_dense())).norm() < 1e-13);
    CHECK((a.transpose().to_dense() - a.to_dense().transpose()).norm() == 0.0);

    Vector x(20);
    for (int i = 0; i < 20; ++i) x[i] = u(rng);
    CHECK((a.apply(x) - a.to_dense() * x).norm() < 1e-13 * (a.to_dense() * x).norm() + 1e-15);
    CHECK((a.apply_transpose(x) - a.to_dense().transpose() * x).norm() < 1e-12);
}

TEST_CASE("spmv trivial cases") {
    const ScalarMatrix eye = ScalarMatrix::identity(5);
    Vector x(5);
    x << 1, 2, 3, 4, 5;
    CHECK((eye.apply(x) - x).norm() == 0.0);
    const ScalarMatrix zero(5, 5);
    CHECK(zero.apply(x).norm() == 0.0);
    CHECK_THROWS_AS(eye.apply(Vector::Zero(4)), DimensionError);
}

TEST_CASE("assemble: trivial and duplicate-merge cases") {
    const FieldLayout one = FieldLayout::uniform(1, 0, true, false);
    Eigen::MatrixXd two(1, 1);
    two << 2.0;
    const BlockMatrix a = BlockMatrix::assemble({{0, 0, two}}, one);
    CHECK(a.to_dense()(0, 0) == 2.0);

    Eigen::MatrixXd b1(1, 1), b2(1, 1);
    b1 << 1.0;
    b2 << 2.0;
    const BlockMatrix merged = BlockMatrix::assemble({{0, 0, b1}, {0, 0, b2}}, one);
    CHECK(merged.n_blocks() == 1);
    CHECK(merged.to_dense()(0, 0) == 3.0);
}

TEST_CASE("assemble: dense reconstruction oracle on a 2-cell chain") {
    std::mt19937_64 rng(3);
    const FieldLayout lay = FieldLayout::uniform(2, 0, true, true);
    const Eigen::MatrixXd d0 = random_dense(2, 2, rng);
    const Eigen::MatrixXd d1 = random_dense(2, 2, rng);
    const Eigen::MatrixXd off = random_dense(2, 2, rng);
    const BlockMatrix a = BlockMatrix::assemble({{0, 0, d0}, {1, 1, d1}, {0, 1, off}}, lay);
    CHECK(a.n_blocks() == 3);
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(4, 4);
    want.block(0, 0, 2, 2) = d0;
    want.block(2, 2, 2, 2) = d1;
    want.block(0, 2, 2, 2) = off;
    CHECK((a.to_dense() - want).norm() == 0.0);
}

TEST_CASE("assemble rejects bad blocks") {
    const FieldLayout lay = FieldLayout::uniform(2, 0, true, true);
    CHECK_THROWS_AS(BlockMatrix::assemble({{0, 0, Eigen::MatrixXd::Zero(3, 2)}}, lay),
                    DimensionError);
    CHECK_THROWS_AS(BlockMatrix::assemble({{0, 2, Eigen::MatrixXd::Zero(2, 2)}}, lay), IndexError);
}

TEST_CASE("extract_submatrix dimensions and values") {
    std::mt19937_64 rng(17);
    const BlockMatrix a = random_block_system(4, 2, rng);
    const ScalarMatrix pp = a.extract_submatrix(FieldSet::pressure(), FieldSet::pressure());
    CHECK(pp.rows() == 4);
    CHECK(pp.cols() == 4);
    const ScalarMatrix ee = a.extract_submatrix(FieldSet::elliptic(), FieldSet::elliptic());
    CHECK(ee.rows() == 8);

    // dense indexing oracle
    const Eigen::MatrixXd ad = a.to_dense();
    const auto rows = a.layout().indices_of(FieldSet::elliptic());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j)
            CHECK(ee.coeff(int(i), int(j)) == ad(rows[i], rows[j]));
    CHECK_THROWS_AS(a.extract_submatrix(FieldSet{}, FieldSet::pressure()), DimensionError);
}

TEST_CASE("extract over the full field partition reconstructs the matrix") {
    std::mt19937_64 rng(21);
    const BlockMatrix a = random_block_system(3, 2, rng);
    const Eigen::MatrixXd ad = a.to_dense();
    const Field fields[3] = {Field::S, Field::P, Field::T};
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(a.dim(), a.dim());
    for (Field fr : fields)
        for (Field fc : fields) {
            const ScalarMatrix sub = a.extract_submatrix(FieldSet::only(fr), FieldSet::only(fc));
            const auto rows = a.layout().indices_of(FieldSet::only(fr));
            const auto cols = a.layout().indices_of(FieldSet::only(fc));
            const Eigen::MatrixXd sd = sub.to_dense();
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < cols.size(); ++j) rebuilt(rows[i], cols[j]) = sd(i, j);
        }
    CHECK((rebuilt - ad).norm() == 0.0);
}

TEST_CASE("block_diagonal_of drops inter-cell coupling") {
    std::mt19937_64 rng(29);
    const FieldLayout lay = FieldLayout::uniform(2, 1, true, true);
    const Eigen::MatrixXd d0 = random_dense(3, 3, rng);
    const Eigen::MatrixXd d1 = random_dense(3, 3, rng);
    const Eigen::MatrixXd off = random_dense(3, 3, rng);
    const BlockMatrix a = BlockMatrix::assemble({{0, 0, d0}, {1, 1, d1}, {0, 1, off}}, lay);

    // block-diagonal input reproduced exactly, off-diagonal content ignored
    const DiagonalApprox hh = a.block_diagonal_of(FieldSet::hyperbolic(), FieldSet::hyperbolic());
    CHECK(hh.n_cells() == 2);
    CHECK(hh.block(0).rows() == 2);  // s and T rows
    const auto li = lay.local_indices_of(0, FieldSet::hyperbolic());
    for (std::size_t i = 0; i < li.size(); ++i)
        for (std::size_t j = 0; j < li.size(); ++j) CHECK(hh.block(0)(i, j) == d0(li[i], li[j]));
    for (std::size_t i = 0; i < li.size(); ++i)
        for (std::size_t j = 0; j < li.size(); ++j) CHECK(hh.block(1)(i, j) == d1(li[i], li[j]));

    const DiagonalApprox ph = a.block_diagonal_of(FieldSet::pressure(), FieldSet::hyperbolic());
    CHECK(ph.block(0).rows() == 1);
    CHECK(ph.block(0).cols() == 2);

    // scalar mode keeps only the diagonal entries of the square pair
    const DiagonalApprox hs =
        a.block_diagonal_of(FieldSet::hyperbolic(), FieldSet::hyperbolic(), DiagMode::Scalar);
    CHECK(hs.block(0)(0, 1) == 0.0);
    CHECK(hs.block(0)(0, 0) == hh.block(0)(0, 0));
}

TEST_CASE("D_hh per-cell dimension for a CPR layout") {
    std::mt19937_64 rng(31);
    const int n_s = 12;
    const BlockMatrix a = random_block_system(2, n_s, rng);
    const DiagonalApprox hh = a.block_diagonal_of(FieldSet::hyperbolic(), FieldSet::hyperbolic());
    CHECK(hh.block(0).rows() == n_s + 1);
    CHECK(hh.block(0).cols() == n_s + 1);
}

TEST_CASE("invert_diagonal: trivial and multiply-back oracle") {
    DiagonalApprox ident({Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)});
    const DiagonalApprox inv = ident.inverted_copy();
    CHECK((inv.block(0) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK(inv.inverted());

    Eigen::MatrixXd d(2, 2);
    d << 2, 0, 0, 4;
    const DiagonalApprox di = DiagonalApprox({d}).inverted_copy();
    CHECK(di.block(0)(0, 0) == 0.5);
    CHECK(di.block(0)(1, 1) == 0.25);

    std::mt19937_64 rng(37);
    std::vector<Eigen::MatrixXd> blocks;
    for (int c = 0; c < 20; ++c) {
        Eigen::MatrixXd b = random_dense(3, 3, rng);
        b.diagonal().array() += 4.0;
        blocks.push_back(b);
    }
    const DiagonalApprox orig(blocks);
    const DiagonalApprox oinv = orig.inverted_copy();
    for (int c = 0; c < 20; ++c)
        CHECK((orig.block(c) * oinv.block(c) - Eigen::MatrixXd::Identity(3, 3))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
}

TEST_CASE("invert_diagonal flags singular blocks with the cell id") {
    std::vector<Eigen::MatrixXd> blocks{Eigen::MatrixXd::Identity(2, 2),
                                        Eigen::MatrixXd::Zero(2, 2)};
    try {
        DiagonalApprox(blocks).inverted_copy();
        FAIL("expected SingularBlockError");
    } catch (const SingularBlockError& e) {
        CHECK(e.cell_id == 1);
    }
}

TEST_CASE("schur_update: zero factor and dense oracle") {
    std::mt19937_64 rng(41);
    const BlockMatrix a = random_block_system(3, 2, rng);
    const ScalarMatrix a_pp = a.extract_submatrix(FieldSet::pressure(), FieldSet::pressure());
    const ScalarMatrix a_hp = a.extract_submatrix(FieldSet::hyperbolic(), FieldSet::pressure());
    const DiagonalApprox d_ph = a.block_diagonal_of(FieldSet::pressure(), FieldSet::hyperbolic());
    const DiagonalApprox d_hh_inv =
        a.block_diagonal_of(FieldSet::hyperbolic(), FieldSet::hyperbolic()).inverted_copy();

    DiagonalApprox zero({Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 3),
                         Eigen::MatrixXd::Zero(1, 3)});
    const ScalarMatrix unchanged = schur_update(a_pp, zero, d_hh_inv, a_hp);
    CHECK((unchanged.to_dense() - a_pp.to_dense()).norm() == 0.0);

    const ScalarMatrix b_pp = schur_update(a_pp, d_ph, d_hh_inv, a_hp);
    Eigen::MatrixXd dl = Eigen::MatrixXd::Zero(3, 9), dm = Eigen::MatrixXd::Zero(9, 9);
    for (int c = 0; c < 3; ++c) {
        dl.block(c, 3 * c, 1, 3) = d_ph.block(c);
        dm.block(3 * c, 3 * c, 3, 3) = d_hh_inv.block(c);
    }
    const Eigen::MatrixXd want = a_pp.to_dense() - dl * dm * a_hp.to_dense();
    CHECK((b_pp.to_dense() - want).norm() < 1e-14 * want.norm());

    // cell-local D factors preserve the inter-cell stencil
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (b_pp.has_entry(i, j)) CHECK((a_pp.has_entry(i, j) || a_hp.has_entry(i, j)));
}

TEST_CASE("schur_update dense equivalence on a 50-cell system") {
    std::mt19937_64 rng(43);
    const BlockMatrix a = random_block_system(50, 2, rng);
    const ScalarMatrix a_pp = a.extract_submatrix(FieldSet::pressure(), FieldSet::pressure());
    const ScalarMatrix a_hp = a.extract_submatrix(FieldSet::hyperbolic(), FieldSet::pressure());
    const DiagonalApprox d_ph = a.block_diagonal_of(FieldSet::pressure(), FieldSet::hyperbolic());
    const DiagonalApprox d_hh_inv =
        a.block_diagonal_of(FieldSet::hyperbolic(), FieldSet::hyperbolic()).inverted_copy();
    const ScalarMatrix b_pp = schur_update(a_pp, d_ph, d_hh_inv, a_hp);

    Eigen::MatrixXd dl = Eigen::MatrixXd::Zero(50, 150), dm = Eigen::MatrixXd::Zero(150, 150);
    for (int c = 0; c < 50; ++c) {
        dl.block(c, 3 * c, 1, 3) = d_ph.block(c);
        dm.block(3 * c, 3 * c, 3, 3) = d_hh_inv.block(c);
    }
    const Eigen::MatrixXd want = a_pp.to_dense() - dl * dm * a_hp.to_dense();
    CHECK((b_pp.to_dense() - want).norm() / want.norm() < 1e-13);
}

TEST_CASE("row_combine matches the dense row operation") {
    std::mt19937_64 rng(47);
    BlockMatrix a = random_block_system(4, 2, rng);
    const Eigen::MatrixXd before = a.to_dense();

    std::vector<Eigen::MatrixXd> w;
    for (int c = 0; c < 4; ++c) w.push_back(random_dense(1, 3, rng));
    a.row_combine(w, FieldSet::pressure(), FieldSet::hyperbolic());

    Eigen::MatrixXd want = before;
    const auto& lay = a.layout();
    for (int c = 0; c < 4; ++c) {
        const auto h = lay.local_indices_of(c, FieldSet::hyperbolic());
        Eigen::MatrixXd hrows(3, a.dim());
        for (int k = 0; k < 3; ++k) hrows.row(k) = before.row(lay.cell_offset(c) + h[k]);
        want.row(lay.p_index(c)) -= (w[c] * hrows).row(0);
    }
    CHECK((a.to_dense() - want).norm() < 1e-14 * want.norm());
}

TEST_CASE("block matrix apply matches dense") {
    std::mt19937_64 rng(53);
    const BlockMatrix a = random_block_system(6, 1, rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(a.dim());
    for (int i = 0; i < a.dim(); ++i) x[i] = u(rng);
    CHECK((a.apply(x) - a.to_dense() * x).norm() < 1e-13 * x.norm() * a.to_dense().norm());
}

TEST_CASE("matrix market and sidecar round-trips") {
    std::mt19937_64 rng(59);
    const BlockMatrix a = random_block_system(5, 2, rng);

    write_block_matrix(a, "io_test.mtx", "io_test.layout");
    const BlockMatrix back = read_block_matrix("io_test.mtx", "io_test.layout");
    CHECK(back.layout() == a.layout());
    CHECK((back.to_dense() - a.to_dense()).norm() == 0.0);  // %.17g round-trip is exact

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(7);
    for (int i = 0; i < 7; ++i) v[i] = u(rng);
    write_vector(v, "io_test.rhs");
    CHECK((read_vector("io_test.rhs") - v).norm() == 0.0);

    std::remove("io_test.mtx");
    std::remove("io_test.layout");
    std::remove("io_test.rhs");
}
