#pragma once

#include "geoscale/kernel.hpp"
#include "geoscale/point_cloud.hpp"

namespace geoscale {

/// Weighted recentered design matrix. Row j of z is
/// w_j (x_j - center) / sum(w), with center the w-weighted mean.
struct WeightedCenter {
  Matrix z;
  Vector center;
};

WeightedCenter weighted_recenter(const Matrix& points, const Vector& weights);

/// Local chart from weighted local PCA around one point.
struct TangentFrame {
  Matrix basis;            ///< r x d', orthonormal columns
  Vector center;           ///< weighted mean
  Matrix projected;        ///< N x d', (X - 1 center^T) basis
  Vector singular_values;  ///< leading d' singular values of Z, non-increasing
  bool degenerate_spectrum = false;
};

/// Weighted local PCA (tangent plane projection).
///
/// The basis spans the leading d' right singular vectors of Z, taken from the
/// full eigen-decomposition of Z^T Z so that a smaller d' always yields the
/// leading columns of a larger one. Each basis column is sign-fixed so its
/// largest-magnitude entry is positive. When the d'-th and (d'+1)-th
/// eigenvalues tie (1e-12 relative) the frame is flagged degenerate and tied
/// vectors are ordered lexicographically.
TangentFrame tangent_projection(const PointCloud& cloud, const Vector& weights, Index d_prime);

enum class MetricForm { dual, inverse };

struct MetricEstimate {
  Matrix h;
  MetricForm form = MetricForm::dual;
};

/// Dual metric at point i in the frame's coordinates,
/// H_kl = 1/2 sum_j L_ij (Y_jk - Y_ik)(Y_jl - Y_il), symmetrized.
/// With MetricForm::inverse returns H^-1 and throws NonInvertibleMetric
/// when H has a non-positive eigenvalue or condition number above 1e12.
MetricEstimate riemannian_metric(const TangentFrame& frame, Index i, const GraphLaplacian& laplacian,
                                 MetricForm form = MetricForm::dual);

/// Inverse of a symmetric positive-definite metric, same checks as above.
Matrix invert_metric(const Matrix& h, Index point);

} // namespace geoscale
