#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "invgae/common.hpp"

namespace invgae {

// Dense row-major matrix of 64-bit floats. Vectors are 1xC or Nx1 tensors.
class Tensor {
public:
    Tensor() = default;

    Tensor(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw ShapeError("Tensor: negative dimension");
        data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    }

    static Tensor filled(int rows, int cols, double v) {
        Tensor t(rows, cols);
        for (auto& x : t.data_) x = v;
        return t;
    }

    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
        Tensor t(r, c);
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c)
                throw ShapeError("Tensor::from_rows: ragged rows");
            int j = 0;
            for (double v : row) t.at(i, j++) = v;
            ++i;
        }
        return t;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<double> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::string shape_str() const {
        return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace invgae
