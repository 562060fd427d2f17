#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "geoscale/kernel.hpp"
#include "geoscale/point_cloud.hpp"

namespace geoscale {

/// Heat-kernel reconstruction error
/// R(eps) = sum_i |x_i - sum_{j != i} w_ij x_j / sum_{l != i} w_il|^2.
double reconstruction_error(const PointCloud& cloud, double epsilon);
double reconstruction_error(const PointCloud& cloud, const Matrix& sq_dists, double epsilon);

struct ReconstructionCurve {
  EpsilonGrid grid;
  std::vector<double> errors{};
  std::size_t eps_hat_index = 0;
  double eps_hat = 0.0;
};

ReconstructionCurve select_bandwidth_rec(const PointCloud& cloud, const EpsilonGrid& grid);

/// Mean over evaluation points of the leading weighted local singular values
/// at each grid bandwidth. values[k][g] is the (k+1)-th value at grid[g].
struct SingularValueProfile {
  EpsilonGrid grid;
  std::vector<std::vector<double>> values{};

  std::size_t count() const noexcept { return values.size(); }
};

/// Singular values of the weighted recentered matrix Z at every grid
/// bandwidth, rescaled by sum(w) / sqrt(sum(w^2)) so that 0/1 weights give
/// ordinary local PCA scaling. k must not exceed min(r, N - 1).
SingularValueProfile multiscale_svd(const PointCloud& cloud, const EpsilonGrid& grid, Index k,
                                    std::span<const Index> eval_indices);

struct ClmrRange {
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  Index k = 0;
  bool defined_lo = false;
  bool defined_hi = false;
};

/// Scale range from the first descents of the singular value profile.
///
/// eps_lo is the first grid point where lambda_{K+1} stops increasing; eps_hi
/// is the first grid point (not before eps_lo) from which lambda_1 stays flat
/// to the end of the grid. Relative forward differences within `tolerance`
/// count as flat. Either endpoint may be undefined.
ClmrRange clmr_range(const SingularValueProfile& profile, Index k, double tolerance = 1e-3);

/// Grid indices [first, last] spanning every bandwidth at which gap
/// s_gap - s_{gap+1} (1-based) is the largest gap of the profile, or nullopt
/// if it never is.
std::optional<std::pair<std::size_t, std::size_t>>
dominant_eigengap_range(const SingularValueProfile& profile, Index gap);

} // namespace geoscale
