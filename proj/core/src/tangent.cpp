#include "geoscale/tangent.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "geoscale/errors.hpp"

namespace geoscale {
namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kMaxConditionNumber = 1e12;

void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) {
    v = -v;
  }
}

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct OrderedSpectrum {
  Vector values;   // descending
  Matrix vectors;  // matching columns, sign-fixed
  bool degenerate_at = false;
};

// Descending eigenpairs of a symmetric PSD matrix with deterministic signs
// and ordering inside clusters of tied eigenvalues.
OrderedSpectrum ordered_spectrum(const Matrix& gram, Index d_prime) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen-decomposition of the local covariance did not converge");
  }
  const Index r = gram.rows();
  Vector values = solver.eigenvalues().reverse();
  Matrix vectors = solver.eigenvectors().rowwise().reverse();
  for (Index k = 0; k < r; ++k) {
    fix_sign(vectors.col(k));
  }

  const double scale = std::max(std::abs(values(0)), std::numeric_limits<double>::min());
  const auto tied = [&](Index a, Index b) {
    return std::abs(values(a) - values(b)) <= kTieTolerance * scale;
  };

  // Reorder each cluster of tied eigenvalues lexicographically.
  Index start = 0;
  while (start < r) {
    Index end = start + 1;
    while (end < r && tied(end - 1, end)) {
      ++end;
    }
    if (end - start > 1) {
      std::vector<Index> order(static_cast<std::size_t>(end - start));
      std::iota(order.begin(), order.end(), start);
      std::vector<Vector> cols;
      for (Index k : order) {
        cols.emplace_back(vectors.col(k));
      }
      std::vector<std::size_t> perm(cols.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return lexicographically_less(cols[b], cols[a]);
      });
      const Vector block_values = values.segment(start, end - start);
      for (std::size_t k = 0; k < perm.size(); ++k) {
        vectors.col(start + static_cast<Index>(k)) = cols[perm[k]];
        values(start + static_cast<Index>(k)) = block_values(static_cast<Index>(perm[k]));
      }
    }
    start = end;
  }

  const bool degenerate = d_prime < r && tied(d_prime - 1, d_prime);
  return {std::move(values), std::move(vectors), degenerate};
}

} // namespace

WeightedCenter weighted_recenter(const Matrix& points, const Vector& weights) {
  if (weights.size() != points.rows()) {
    throw InvalidArgument("weight vector length " + std::to_string(weights.size()) +
                          " does not match " + std::to_string(points.rows()) + " points");
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw InvalidArgument("weights must be finite and non-negative");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw InvalidArgument("weights must not all be zero");
  }

  Vector center = (points.transpose() * weights) / total;
  Matrix z = points.rowwise() - center.transpose();
  z.array().colwise() *= (weights / total).array();
  return {std::move(z), std::move(center)};
}

TangentFrame tangent_projection(const PointCloud& cloud, const Vector& weights, Index d_prime) {
  const Index r = cloud.ambient_dim();
  const Index limit = std::min(r, cloud.size() - 1);
  if (d_prime < 1 || d_prime > limit) {
    throw InvalidArgument("working dimension must be in [1, " + std::to_string(limit) + "], got " +
                          std::to_string(d_prime));
  }

  WeightedCenter wc = weighted_recenter(cloud.points(), weights);
  const Matrix gram = wc.z.transpose() * wc.z;
  OrderedSpectrum spectrum = ordered_spectrum(gram, d_prime);

  TangentFrame frame;
  frame.basis = spectrum.vectors.leftCols(d_prime);
  frame.singular_values = spectrum.values.head(d_prime).cwiseMax(0.0).cwiseSqrt();
  frame.degenerate_spectrum = spectrum.degenerate_at;

  // Column by column so that a frame's k-th column never depends on d'.
  const Matrix centered = cloud.points().rowwise() - wc.center.transpose();
  frame.projected.resize(cloud.size(), d_prime);
  for (Index k = 0; k < d_prime; ++k) {
    frame.projected.col(k).noalias() = centered * frame.basis.col(k);
  }
  frame.center = std::move(wc.center);
  return frame;
}

Matrix invert_metric(const Matrix& h, Index point) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NonInvertibleMetric(point, "eigen-decomposition failed");
  }
  const Vector& values = solver.eigenvalues();
  const double smallest = values.minCoeff();
  const double largest = values.maxCoeff();
  if (!(smallest > 0.0)) {
    throw NonInvertibleMetric(point, "smallest eigenvalue " + std::to_string(smallest) + " <= 0");
  }
  if (largest / smallest > kMaxConditionNumber) {
    throw NonInvertibleMetric(point, "condition number " + std::to_string(largest / smallest) +
                                         " exceeds 1e12");
  }
  const Matrix& v = solver.eigenvectors();
  Matrix inverse = v * values.cwiseInverse().asDiagonal() * v.transpose();
  return 0.5 * (inverse + inverse.transpose());
}

MetricEstimate riemannian_metric(const TangentFrame& frame, Index i, const GraphLaplacian& laplacian,
                                 MetricForm form) {
  const Matrix& y = frame.projected;
  const Index n = y.rows();
  if (laplacian.size() != n) {
    throw InvalidArgument("Laplacian has " + std::to_string(laplacian.size()) +
                          " rows but the frame has " + std::to_string(n) + " points");
  }
  if (i < 0 || i >= n) {
    throw InvalidArgument("point index " + std::to_string(i) + " out of range");
  }

  const Index d = y.cols();
  Matrix h = Matrix::Zero(d, d);
  for (Index j = 0; j < n; ++j) {
    const double lij = laplacian.l(i, j);
    if (lij == 0.0) {
      continue;
    }
    for (Index k = 0; k < d; ++k) {
      const double dk = y(j, k) - y(i, k);
      for (Index m = 0; m <= k; ++m) {
        h(k, m) += lij * dk * (y(j, m) - y(i, m));
      }
    }
  }
  for (Index k = 0; k < d; ++k) {
    for (Index m = 0; m < k; ++m) {
      h(m, k) = h(k, m);
    }
  }
  h *= 0.5;

  if (form == MetricForm::inverse) {
    return {invert_metric(h, i), form};
  }
  return {std::move(h), form};
}

} // namespace geoscale
