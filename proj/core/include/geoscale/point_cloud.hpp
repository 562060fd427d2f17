#pragma once

#include <Eigen/Core>

namespace geoscale {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// N x r sample coordinates, one point per row.
///
/// Construction validates that there are at least two points, at least one
/// coordinate, and that every entry is finite.
class PointCloud {
public:
  explicit PointCloud(Matrix points);

  const Matrix& points() const noexcept { return points_; }
  Index size() const noexcept { return points_.rows(); }
  Index ambient_dim() const noexcept { return points_.cols(); }

  auto row(Index i) const { return points_.row(i); }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_.rows() == b.points_.rows() &&
           a.points_.cols() == b.points_.cols() && a.points_ == b.points_;
  }

private:
  Matrix points_;
};

} // namespace geoscale
