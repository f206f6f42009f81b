#include "cane/matrix.hpp"

#include <algorithm>
#include <stdexcept>

#include "cane/error.hpp"

namespace cane {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw BoundsError("triplet (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(rows) +
                              "x" + std::to_string(cols) + " matrix");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix out(rows, cols);
    out.indices_.reserve(triplets.size());
    out.values_.reserve(triplets.size());
    for (std::size_t i = 0; i < triplets.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        out.indices_.push_back(static_cast<std::uint32_t>(triplets[i].col));
        out.values_.push_back(sum);
        out.indptr_[triplets[i].row + 1] += 1;
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) out.indptr_[r + 1] += out.indptr_[r];
    return out;
}

bool CsrMatrix::contains(std::size_t i, std::size_t j) const {
    const auto cols_in_row = row_indices(i);
    return std::binary_search(cols_in_row.begin(), cols_in_row.end(),
                              static_cast<std::uint32_t>(j));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const auto cols_in_row = row_indices(i);
    const auto it = std::lower_bound(cols_in_row.begin(), cols_in_row.end(),
                                     static_cast<std::uint32_t>(j));
    if (it == cols_in_row.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols_in_row.begin())];
}

CsrMatrix CsrMatrix::transpose() const {
    CsrMatrix out(cols_, rows_);
    out.indices_.resize(nnz());
    out.values_.resize(nnz());
    for (std::size_t k = 0; k < nnz(); ++k) out.indptr_[indices_[k] + 1] += 1;
    for (std::size_t c = 0; c < cols_; ++c) out.indptr_[c + 1] += out.indptr_[c];

    std::vector<std::size_t> cursor(out.indptr_.begin(), out.indptr_.end() - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = indptr_[r]; k < indptr_[r + 1]; ++k) {
            const std::size_t pos = cursor[indices_[k]]++;
            out.indices_[pos] = static_cast<std::uint32_t>(r);
            out.values_[pos] = values_[k];
        }
    }
    return out;
}

DenseMatrix CsrMatrix::to_dense() const {
    DenseMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto cols_in_row = row_indices(r);
        const auto vals = row_values(r);
        for (std::size_t k = 0; k < cols_in_row.size(); ++k) out(r, cols_in_row[k]) = vals[k];
    }
    return out;
}

DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw BoundsError("spmm dimension mismatch");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto cols_in_row = a.row_indices(r);
        const auto vals = a.row_values(r);
        auto out_row = out.row(r);
        for (std::size_t k = 0; k < cols_in_row.size(); ++k) {
            const double w = vals[k];
            const auto b_row = b.row(cols_in_row[k]);
            for (std::size_t c = 0; c < b_row.size(); ++c) out_row[c] += w * b_row[c];
        }
    }
    return out;
}

}  // namespace cane
