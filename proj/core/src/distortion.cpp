#include "geoscale/distortion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "geoscale/dataset.hpp"
#include "geoscale/errors.hpp"
#include "geoscale/parallel.hpp"

namespace geoscale {

double spectral_norm(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("spectral_norm needs a square matrix");
  }
  if (a.size() == 0) {
    return 0.0;
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("spectral_norm needs a symmetric matrix");
  }
  if (a.rows() == 1) {
    return std::abs(a(0, 0));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue computation for the spectral norm failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double mean_distortion(std::span<const PointDistortion> per_point, bool squared) {
  if (per_point.empty()) {
    throw DistortionUndefined("no evaluated points");
  }
  double total = 0.0;
  for (const auto& p : per_point) {
    total += squared ? p.norm * p.norm : p.norm;
  }
  return total / static_cast<double>(per_point.size());
}

DistortionResult compute_distortion(const PointCloud& cloud, double epsilon, Index d_prime,
                                    std::span<const Index> eval_indices,
                                    const DistortionOptions& options) {
  return compute_distortion(cloud, pairwise_sq_dists(cloud), epsilon, d_prime, eval_indices,
                            options);
}

DistortionResult compute_distortion(const PointCloud& cloud, const Matrix& sq_dists, double epsilon,
                                    Index d_prime, std::span<const Index> eval_indices,
                                    const DistortionOptions& options) {
  if (eval_indices.empty()) {
    throw InvalidArgument("no evaluation points given");
  }
  if (d_prime < 1) {
    throw InvalidArgument("working dimension must be >= 1");
  }
  if (sq_dists.rows() != cloud.size()) {
    throw InvalidArgument("distance matrix does not match the cloud");
  }
  for (Index i : eval_indices) {
    if (i < 0 || i >= cloud.size()) {
      throw InvalidArgument("evaluation index " + std::to_string(i) + " out of range");
    }
  }

  const WeightMatrix weights = heat_kernel(sq_dists, epsilon);
  const GraphLaplacian laplacian = renormalized_laplacian(weights);
  const Matrix identity = Matrix::Identity(d_prime, d_prime);

  std::vector<std::optional<double>> norms(eval_indices.size());
  parallel_for(eval_indices.size(), [&](std::size_t k) {
    const Index i = eval_indices[k];
    try {
      const TangentFrame frame = tangent_projection(cloud, weights.w.col(i), d_prime);
      const MetricEstimate metric = riemannian_metric(frame, i, laplacian, options.form);
      const double norm = spectral_norm(metric.h - identity);
      if (std::isfinite(norm)) {
        norms[k] = norm;
      }
    } catch (const NumericalError&) {
      // recorded as a failure below
    }
  });

  DistortionResult result;
  result.epsilon = epsilon;
  for (std::size_t k = 0; k < eval_indices.size(); ++k) {
    if (norms[k]) {
      result.per_point.push_back({eval_indices[k], *norms[k]});
    } else {
      result.failures.push_back(eval_indices[k]);
    }
  }
  if (result.per_point.empty()) {
    throw DistortionUndefined("metric failed at every evaluation point for eps = " +
                              std::to_string(epsilon));
  }
  result.distortion = mean_distortion(result.per_point, options.squared);
  result.reliable = static_cast<double>(result.failures.size()) <=
                    options.max_failure_fraction * static_cast<double>(eval_indices.size());
  return result;
}

std::optional<std::size_t> argmin_first(std::span<const double> values,
                                        std::span<const bool> usable) {
  if (!usable.empty() && usable.size() != values.size()) {
    throw InvalidArgument("usable mask length does not match values");
  }
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if ((!usable.empty() && !usable[k]) || std::isnan(values[k])) {
      continue;
    }
    if (!best || values[k] < values[*best]) {
      best = k;
    }
  }
  return best;
}

DistortionCurve select_bandwidth(const PointCloud& cloud, Index d_prime, const EpsilonGrid& grid,
                                 const SelectionOptions& options) {
  if (options.n_prime < 1 || options.n_prime > cloud.size()) {
    throw InvalidArgument("n_prime must be in [1, " + std::to_string(cloud.size()) + "], got " +
                          std::to_string(options.n_prime));
  }

  DistortionCurve curve{grid};
  curve.d_prime = d_prime;
  curve.n_prime = options.n_prime;
  curve.seed = options.seed;
  curve.options = options.distortion;
  curve.eval_indices = subsample(cloud, options.n_prime, options.seed);

  const Matrix sq_dists = pairwise_sq_dists(cloud);
  std::vector<double> values;
  const auto usable = std::make_unique<bool[]>(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    try {
      curve.results.push_back(compute_distortion(cloud, sq_dists, grid[g], d_prime,
                                                 curve.eval_indices, options.distortion));
    } catch (const DistortionUndefined&) {
      DistortionResult failed;
      failed.epsilon = grid[g];
      failed.distortion = std::numeric_limits<double>::quiet_NaN();
      failed.failures = curve.eval_indices;
      failed.reliable = false;
      curve.results.push_back(std::move(failed));
    }
    values.push_back(curve.results.back().distortion);
    usable[g] = curve.results.back().reliable;
  }

  const auto best = argmin_first(values, std::span<const bool>(usable.get(), grid.size()));
  if (!best) {
    throw SelectionError("no bandwidth on the grid produced a reliable distortion");
  }
  curve.eps_hat_index = *best;
  curve.eps_hat = grid[*best];
  return curve;
}

} // namespace geoscale
