#pragma once

#include <optional>
#include <vector>

#include "geoscale/kernel.hpp"
#include "geoscale/point_cloud.hpp"

namespace geoscale {

struct Embedding {
  Matrix coords;       ///< N x m
  double epsilon = 0.0;
  Vector eigenvalues;  ///< eigenvalues of P for the returned columns, descending
};

/// Laplacian eigenmap from the renormalized random walk P at bandwidth eps.
/// Columns are the eigenvectors of P for eigenvalues ranked 2..m+1, each
/// scaled to unit norm with its largest-magnitude entry positive.
Embedding laplacian_eigenmaps(const PointCloud& cloud, double epsilon, Index m);
Embedding laplacian_eigenmaps(const Matrix& sq_dists, double epsilon, Index m);

struct ProcrustesResult {
  Matrix aligned;     ///< source mapped onto target
  Matrix rotation;    ///< orthogonal m x m, applied on the right of row vectors
  double scale = 1.0;
  Vector translation;
  double rms = 0.0;
};

/// Similarity transform (orthogonal Q, scale s, translation t) minimizing
/// sum_i |target_i - (s Q source_i + t)|^2; rms = sqrt(min / N).
ProcrustesResult procrustes_align(const Matrix& target, const Matrix& source);

struct SmoothingCurve {
  EpsilonGrid grid;
  EpsilonGrid star_grid;
  std::vector<double> delta{};///< NaN where missing
  std::vector<std::optional<std::size_t>> argmin_star{};
  std::vector<bool> missing{};
};

/// For every eps on `grid`: delta_eps = min over eps* on `star_grid` of the
/// Procrustes RMS between embed(noisy, eps) and the target embed(clean, eps*).
SmoothingCurve smoothing_delta(const PointCloud& clean, const PointCloud& noisy,
                               const EpsilonGrid& grid, const EpsilonGrid& star_grid, Index m = 3);

} // namespace geoscale
