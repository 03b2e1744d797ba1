#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>

namespace coreset {

// Points are stored one per row so that a row is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Point = std::span<const double>;

inline Point row(const Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline Point as_point(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Eigen::Map<const Eigen::VectorXd> as_eigen(Point p) {
    return {p.data(), static_cast<Eigen::Index>(p.size())};
}

} // namespace coreset
