#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "invgae/common.hpp"
#include "invgae/kernels.hpp"
#include "invgae/tensor.hpp"

namespace invgae {

struct Triplet {
    int row;
    int col;
    double value;
};

// Sparse matrix built from coordinate entries, stored CSR for the kernels.
class CsrMatrix {
public:
    CsrMatrix() = default;

    CsrMatrix(int rows, int cols, std::vector<Triplet> entries) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw ShapeError("CsrMatrix: negative dimension");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        row_ptr_.assign(rows + 1, 0);
        col_idx_.reserve(entries.size());
        values_.reserve(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const Triplet& t = entries[i];
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw ShapeError("CsrMatrix: entry (" + std::to_string(t.row) + "," +
                                 std::to_string(t.col) + ") out of range for " + shape_str());
            if (i > 0 && entries[i - 1].row == t.row && entries[i - 1].col == t.col)
                throw ShapeError("CsrMatrix: duplicate entry (" + std::to_string(t.row) + "," +
                                 std::to_string(t.col) + ")");
            ++row_ptr_[t.row + 1];
            col_idx_.push_back(t.col);
            values_.push_back(t.value);
        }
        for (int r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    std::string shape_str() const {
        return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
    }

    // c = this * b
    Tensor multiply(const Tensor& b) const {
        if (b.rows() != cols_)
            throw ShapeError("CsrMatrix::multiply: shape mismatch " + shape_str() + " vs " +
                             b.shape_str());
        Tensor c(rows_, b.cols());
        kernels::active().spmm(row_ptr_.data(), col_idx_.data(), values_.data(), rows_, b.data(),
                               c.data(), b.cols());
        return c;
    }

    // c = this^T * g
    Tensor multiply_transposed(const Tensor& g) const {
        if (g.rows() != rows_)
            throw ShapeError("CsrMatrix::multiply_transposed: shape mismatch " + shape_str() +
                             "^T vs " + g.shape_str());
        Tensor c(cols_, g.cols());
        kernels::active().spmm_t(row_ptr_.data(), col_idx_.data(), values_.data(), rows_, cols_,
                                 g.data(), c.data(), g.cols());
        return c;
    }

    Tensor to_dense() const {
        Tensor d(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) d.at(r, col_idx_[e]) = values_[e];
        return d;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

}  // namespace invgae
