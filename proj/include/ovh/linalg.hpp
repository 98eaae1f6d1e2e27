#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ovh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff used for every rank computation.
inline constexpr double kRankTolerance = 1e-7;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on NaN/Inf values, diverging training and similar numeric failures.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a configured resource cap (pivots, simplex count) is exceeded.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

inline std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace detail

/// x -> linear * x + offset
class AffineMap {
 public:
  AffineMap() = default;

  AffineMap(Matrix linear, Vector offset)
      : linear_(std::move(linear)), offset_(std::move(offset)) {
    if (linear_.rows() != offset_.size()) {
      throw DimensionError("AffineMap: offset length " + std::to_string(offset_.size()) +
                           " does not match linear part " +
                           detail::shape(linear_.rows(), linear_.cols()));
    }
    detail::require_finite(linear_, "AffineMap linear part");
    detail::require_finite(offset_, "AffineMap offset");
  }

  static AffineMap identity(Eigen::Index n) {
    return {Matrix::Identity(n, n), Vector::Zero(n)};
  }

  const Matrix& linear() const noexcept { return linear_; }
  const Vector& offset() const noexcept { return offset_; }
  Eigen::Index in_dim() const noexcept { return linear_.cols(); }
  Eigen::Index out_dim() const noexcept { return linear_.rows(); }

  Vector operator()(const Vector& x) const {
    if (x.size() != linear_.cols()) {
      throw DimensionError("AffineMap: input of length " + std::to_string(x.size()) +
                           " for map with " + std::to_string(linear_.cols()) + " columns");
    }
    return linear_ * x + offset_;
  }

 private:
  Matrix linear_;
  Vector offset_;
};

/// Returns outer ∘ inner.
inline AffineMap compose_affine(const AffineMap& outer, const AffineMap& inner) {
  if (outer.in_dim() != inner.out_dim()) {
    throw DimensionError("compose_affine: outer expects " + std::to_string(outer.in_dim()) +
                         " inputs, inner produces " + std::to_string(inner.out_dim()));
  }
  return {outer.linear() * inner.linear(), outer.linear() * inner.offset() + outer.offset()};
}

/// Number of singular values above tol * (largest singular value).
inline std::size_t numerical_rank(const Matrix& m, double tol = kRankTolerance) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("numerical_rank: tolerance must be positive");
  }
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

/// Symmetric, nonnegative, zero-diagonal n x n matrix. Off-diagonal zeros are
/// allowed, so this also carries pseudometrics.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  explicit DistanceMatrix(Matrix d) : d_(std::move(d)) {
    if (d_.rows() != d_.cols()) {
      throw DimensionError("DistanceMatrix: not square (" + detail::shape(d_.rows(), d_.cols()) +
                           ")");
    }
    for (Eigen::Index i = 0; i < d_.rows(); ++i) {
      if (d_(i, i) != 0.0) throw std::invalid_argument("DistanceMatrix: nonzero diagonal");
      for (Eigen::Index j = i + 1; j < d_.cols(); ++j) {
        const double a = d_(i, j);
        if (!std::isfinite(a) || a < 0.0 || a != d_(j, i)) {
          throw std::invalid_argument("DistanceMatrix: entries must be finite, nonnegative and "
                                      "symmetric");
        }
      }
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(d_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return d_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const noexcept { return d_; }

 private:
  Matrix d_;
};

/// Euclidean distances between the rows of `points`.
inline DistanceMatrix pairwise_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (points.row(i) - points.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d));
}

}  // namespace ovh
