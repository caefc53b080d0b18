#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fedgwc/common.hpp"

namespace fedgwc {

/// Dense row-major matrix of doubles. Federations stay small enough
/// (a few thousand clients per cluster at most) that dense storage is fine.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

    double* row_data(std::size_t i) { return v_.data() + i * cols_; }
    const double* row_data(std::size_t i) const { return v_.data() + i * cols_; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

/// Square submatrix keeping the given row/column indices, in the given order.
inline Matrix select_square(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
    return out;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.values()) s += x * x;
    return std::sqrt(s);
}

}  // namespace fedgwc
