#ifndef AERANGE_MATRIX_HPP
#define AERANGE_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace aerange
{

// Dense row-major matrix. Dimensions in this library stay small (a handful
// of states), so no expression templates or blocking.
template <class T>
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n, T(0.0));
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T(1.0);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> row(std::size_t i) const
    {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using IntervalMatrix = Matrix<Interval>;

inline IntervalMatrix to_interval(const RealMatrix& m)
{
    IntervalMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = Interval(m(i, j));
        }
    }
    return out;
}

inline RealMatrix midpoint(const IntervalMatrix& m)
{
    RealMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j).mid();
        }
    }
    return out;
}

// Rigorous enclosure of a product of float matrices.
inline IntervalMatrix multiply(const IntervalMatrix& a, const IntervalMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("multiply: dimension mismatch");
    }
    IntervalMatrix out(a.rows(), b.cols(), Interval(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return out;
}

inline std::vector<Interval> multiply(const IntervalMatrix& a, std::span<const Interval> x)
{
    if (a.cols() != x.size()) {
        throw std::invalid_argument("multiply: dimension mismatch");
    }
    std::vector<Interval> out(a.rows(), Interval(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[i] += a(i, j) * x[j];
        }
    }
    return out;
}

// Plain floating-point product, used only where rigor is not required.
inline std::vector<double> multiply(const RealMatrix& a, std::span<const double> x)
{
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[i] += a(i, j) * x[j];
        }
    }
    return out;
}

// log|det a| by floating-point LU; -inf for singular input.
inline double log_abs_det(const RealMatrix& a)
{
    const std::size_t n = a.rows();
    if (n != a.cols()) {
        throw std::invalid_argument("log_abs_det: matrix is not square");
    }
    RealMatrix w = a;
    double acc = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(w(r, col)) > std::fabs(w(pivot, col))) {
                pivot = r;
            }
        }
        if (w(pivot, col) == 0) {
            return -std::numeric_limits<double>::infinity();
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(pivot, j), w(col, j));
            }
        }
        acc += std::log(std::fabs(w(col, col)));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = w(r, col) / w(col, col);
            for (std::size_t j = col; j < n; ++j) {
                w(r, j) -= factor * w(col, j);
            }
        }
    }
    return acc;
}

// Gaussian elimination with partial pivoting in floating point. Returns
// nullopt for (numerically) singular input. The result is an approximate
// inverse; callers that need rigor certify it separately.
inline std::optional<RealMatrix> invert(const RealMatrix& a)
{
    const std::size_t n = a.rows();
    if (n != a.cols()) {
        throw std::invalid_argument("invert: matrix is not square");
    }
    RealMatrix work = a;
    RealMatrix inv = RealMatrix::identity(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::fabs(a(i, j)));
        }
    }
    if (!(scale > 0) || !std::isfinite(scale)) {
        return std::nullopt;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) {
                pivot = r;
            }
        }
        if (std::fabs(work(pivot, col)) <= 1e-14 * scale) {
            return std::nullopt;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const double d = work(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const double factor = work(r, col);
            if (factor == 0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= factor * work(col, j);
                inv(r, j) -= factor * inv(col, j);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(inv(i, j))) {
                return std::nullopt;
            }
        }
    }
    return inv;
}

} // namespace aerange

#endif
