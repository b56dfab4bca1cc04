#pragma once

#include "genplan/error.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace genplan::ad {

#ifdef GENPLAN_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

/// Dense row-major matrix. Vectors are 1 x n or n x 1 matrices.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, real fill = 0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Tensor(std::size_t rows, std::size_t cols, std::initializer_list<real> values)
        : rows_(rows), cols_(cols), data_(values) {
        if (data_.size() != rows * cols)
            throw Error(ErrorCode::ShapeMismatch, "initializer does not match shape");
    }
    Tensor(std::size_t rows, std::size_t cols, std::vector<real> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != rows * cols)
            throw Error(ErrorCode::ShapeMismatch, "value count does not match shape");
    }

    static Tensor scalar(real v) { return Tensor(1, 1, {v}); }
    static Tensor column(std::vector<real> v) {
        auto n = v.size();
        return Tensor(n, 1, std::move(v));
    }
    static Tensor row(std::vector<real> v) {
        auto n = v.size();
        return Tensor(1, n, std::move(v));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    std::vector<std::size_t> shape() const { return {rows_, cols_}; }
    bool empty() const { return data_.empty(); }
    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    real* data() { return data_.data(); }
    const real* data() const { return data_.data(); }
    std::span<real> values() { return data_; }
    std::span<const real> values() const { return data_; }
    std::span<real> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const real> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    real operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    real& operator[](std::size_t i) { return data_[i]; }
    real operator[](std::size_t i) const { return data_[i]; }

    real item() const {
        if (data_.size() != 1)
            throw Error(ErrorCode::ShapeMismatch, "item() on a tensor with " + std::to_string(size()) + " entries");
        return data_[0];
    }

    void fill(real v) { std::fill(data_.begin(), data_.end(), v); }
    void reshape(std::size_t rows, std::size_t cols) {
        if (rows * cols != data_.size())
            throw Error(ErrorCode::ShapeMismatch, "reshape changes the value count");
        rows_ = rows;
        cols_ = cols;
    }

    Tensor& operator+=(const Tensor& o) {
        if (!same_shape(o))
            throw Error(ErrorCode::ShapeMismatch, "tensor += with different shapes");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += o.data_[i];
        return *this;
    }

    bool operator==(const Tensor&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<real> data_;
};

} // namespace genplan::ad
