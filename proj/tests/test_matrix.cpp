#include <doctest.h>

#include "cane/error.hpp"
#include "cane/matrix.hpp"
#include "cane/rng.hpp"

using namespace cane;

namespace {

CsrMatrix random_sparse(Rng& rng, std::size_t rows, std::size_t cols, double density) {
    std::vector<Triplet> triplets;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (rng.uniform() < density) triplets.push_back({r, c, rng.uniform(-2.0, 2.0)});
        }
    }
    return CsrMatrix::from_triplets(rows, cols, std::move(triplets));
}

}  // namespace

TEST_CASE("from_triplets sorts, sums duplicates, and rejects out-of-range entries") {
    const CsrMatrix mat = CsrMatrix::from_triplets(
        3, 4, {{2, 1, 1.0}, {0, 3, 2.0}, {0, 3, 0.5}, {0, 0, -1.0}});
    CHECK(mat.nnz() == 3);
    CHECK(mat.at(0, 0) == -1.0);
    CHECK(mat.at(0, 3) == 2.5);
    CHECK(mat.at(2, 1) == 1.0);
    CHECK(mat.at(1, 2) == 0.0);
    CHECK(mat.row_indices(0)[0] == 0);
    CHECK(mat.row_indices(0)[1] == 3);
    CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), BoundsError);
}

TEST_CASE("transpose round-trips and matches entrywise lookup") {
    Rng rng(7);
    const CsrMatrix mat = random_sparse(rng, 9, 5, 0.3);
    const CsrMatrix t = mat.transpose();
    REQUIRE(t.rows() == 5);
    REQUIRE(t.cols() == 9);
    for (std::size_t r = 0; r < mat.rows(); ++r) {
        for (std::size_t c = 0; c < mat.cols(); ++c) {
            CHECK(mat.at(r, c) == t.at(c, r));
        }
    }
    const CsrMatrix back = t.transpose();
    CHECK(back.indices() == mat.indices());
    CHECK(back.values() == mat.values());
    CHECK(back.indptr() == mat.indptr());
}

TEST_CASE("spmm agrees with a dense triple-loop product") {
    Rng rng(11);
    for (int round = 0; round < 5; ++round) {
        const std::size_t n = 3 + rng.uniform_u64(8);
        const std::size_t k = 2 + rng.uniform_u64(6);
        const std::size_t d = 1 + rng.uniform_u64(5);
        const CsrMatrix a = random_sparse(rng, n, k, 0.4);
        DenseMatrix b(k, d);
        for (double& x : b.data()) x = rng.uniform(-1.0, 1.0);

        const DenseMatrix fast = spmm(a, b);
        const DenseMatrix a_dense = a.to_dense();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                double want = 0.0;
                for (std::size_t t = 0; t < k; ++t) want += a_dense(r, t) * b(t, c);
                CHECK(fast(r, c) == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("spmm rejects mismatched shapes") {
    const CsrMatrix a = CsrMatrix::from_triplets(2, 3, {{0, 0, 1.0}});
    CHECK_THROWS_AS(spmm(a, DenseMatrix(2, 2)), BoundsError);
}
