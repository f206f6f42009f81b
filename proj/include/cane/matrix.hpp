#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cane {

// Row-major dense matrix of doubles. Training keeps everything in double;
// single precision only ever appears in exported files.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void set_zero() { data_.assign(data_.size(), 0.0); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

// Compressed sparse row matrix. Column indices inside a row are strictly
// increasing, which makes membership a binary search and every traversal
// order deterministic.
class CsrMatrix {
public:
    CsrMatrix() : indptr_(1, 0) {}
    CsrMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), indptr_(rows + 1, 0) {}

    // Duplicate (row, col) entries are summed.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return indices_.size(); }

    std::size_t row_nnz(std::size_t i) const { return indptr_[i + 1] - indptr_[i]; }
    std::span<const std::uint32_t> row_indices(std::size_t i) const {
        return {indices_.data() + indptr_[i], row_nnz(i)};
    }
    std::span<const double> row_values(std::size_t i) const {
        return {values_.data() + indptr_[i], row_nnz(i)};
    }
    std::span<double> row_values_mut(std::size_t i) {
        return {values_.data() + indptr_[i], row_nnz(i)};
    }

    bool contains(std::size_t i, std::size_t j) const;
    // Value at (i, j); zero when the entry is absent.
    double at(std::size_t i, std::size_t j) const;

    CsrMatrix transpose() const;
    DenseMatrix to_dense() const;

    const std::vector<std::size_t>& indptr() const { return indptr_; }
    const std::vector<std::uint32_t>& indices() const { return indices_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> indptr_;
    std::vector<std::uint32_t> indices_;
    std::vector<double> values_;
};

// C = A * B with A sparse and B dense. Accumulation runs in stored index
// order, so results are bit-reproducible across runs.
DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& b);

}  // namespace cane
