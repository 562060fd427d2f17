#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geoscale/kernel.hpp"
#include "geoscale/point_cloud.hpp"
#include "geoscale/tangent.hpp"

namespace geoscale {

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm(const Matrix& a);

struct PointDistortion {
  Index index = 0;
  double norm = 0.0;  ///< |H - I| at this point
};

struct DistortionOptions {
  MetricForm form = MetricForm::dual;
  /// Average |H - I|^2 (default) or |H - I|.
  bool squared = true;
  /// A bandwidth where more than this fraction of points fail is unreliable.
  double max_failure_fraction = 0.2;
};

struct DistortionResult {
  double epsilon = 0.0;
  double distortion = 0.0;
  std::vector<PointDistortion> per_point;
  std::vector<Index> failures;
  bool reliable = true;

  std::size_t evaluated() const noexcept { return per_point.size(); }
};

/// Mean of |H - I| (or its square) over the successfully evaluated points.
double mean_distortion(std::span<const PointDistortion> per_point, bool squared);

DistortionResult compute_distortion(const PointCloud& cloud, double epsilon, Index d_prime,
                                    std::span<const Index> eval_indices,
                                    const DistortionOptions& options = {});

/// Same, reusing precomputed pairwise squared distances.
DistortionResult compute_distortion(const PointCloud& cloud, const Matrix& sq_dists, double epsilon,
                                    Index d_prime, std::span<const Index> eval_indices,
                                    const DistortionOptions& options = {});

struct SelectionOptions {
  Index n_prime = 200;
  std::uint64_t seed = 0;
  DistortionOptions distortion{};
};

struct DistortionCurve {
  EpsilonGrid grid;
  std::vector<DistortionResult> results{};
  std::size_t eps_hat_index = 0;
  double eps_hat = 0.0;
  Index d_prime = 1;
  Index n_prime = 0;
  std::uint64_t seed = 0;
  DistortionOptions options{};
  std::vector<Index> eval_indices{};
};

/// Index of the smallest value among usable entries, earliest on ties.
std::optional<std::size_t> argmin_first(std::span<const double> values,
                                        std::span<const bool> usable = {});

/// Evaluates the distortion at every grid bandwidth on one shared subsample
/// and returns the curve with its argmin. Throws SelectionError when no
/// grid point is reliable.
DistortionCurve select_bandwidth(const PointCloud& cloud, Index d_prime, const EpsilonGrid& grid,
                                 const SelectionOptions& options = {});

} // namespace geoscale
