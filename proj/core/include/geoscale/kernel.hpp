#pragma once

#include <vector>

#include "geoscale/point_cloud.hpp"

namespace geoscale {

/// Heat-kernel weights w_ij = exp(-|x_i - x_j|^2 / eps^2).
struct WeightMatrix {
  Matrix w;
  double epsilon = 0.0;
};

/// Symmetric renormalized kernel W'_ij = W_ij / (d_i d_j) with its row
/// sums d'_i. The random walk P = diag(d')^-1 W' is row-stochastic.
struct RenormalizedKernel {
  Matrix w_prime;
  Vector degree;
  double epsilon = 0.0;
};

/// L = (4 / eps^2) (P - I), scaled so that L approximates the
/// Laplace-Beltrami operator for this kernel.
struct GraphLaplacian {
  Matrix l;
  double epsilon = 0.0;

  Index size() const noexcept { return l.rows(); }
};

/// Increasing, logarithmically spaced bandwidth candidates.
class EpsilonGrid {
public:
  /// Values must be positive and strictly increasing, at least two of them.
  explicit EpsilonGrid(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const noexcept { return values_.size(); }
  double eps_min() const noexcept { return values_.front(); }
  double eps_max() const noexcept { return values_.back(); }

  /// Every value multiplied by factor > 0.
  EpsilonGrid scaled(double factor) const;

private:
  std::vector<double> values_;
};

/// Entry (i, j) = |x_i - x_j|^2, computed coordinate by coordinate.
Matrix pairwise_sq_dists(const PointCloud& cloud);

WeightMatrix heat_kernel(const Matrix& sq_dists, double epsilon);

RenormalizedKernel renormalize(const WeightMatrix& weights);

GraphLaplacian renormalized_laplacian(const WeightMatrix& weights);

/// Square root of the mean squared distance over unordered pairs.
double epsilon_max(const Matrix& sq_dists);

/// max_j (sum_i W_ij(eps)) - 1, the statistic epsilon_min bisects on.
double kernel_excess(const Matrix& sq_dists, double epsilon);

/// Smallest eps (to 1e-3 relative) at which kernel_excess reaches gamma;
/// below it the kernel is numerically the identity.
double epsilon_min(const Matrix& sq_dists, double gamma = 1e-4);

EpsilonGrid log_grid(double eps_min, double eps_max, std::size_t count = 20);

/// log_grid(epsilon_min(d), epsilon_max(d), count) for a cloud.
EpsilonGrid default_grid(const Matrix& sq_dists, std::size_t count = 20, double gamma = 1e-4);

} // namespace geoscale
