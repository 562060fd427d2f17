#include "geoscale/baselines.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoscale/distortion.hpp"
#include "geoscale/errors.hpp"
#include "geoscale/parallel.hpp"
#include "geoscale/tangent.hpp"

namespace geoscale {
namespace {

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("bandwidth must be finite and > 0");
  }
}

// Relative forward difference of a sequence; values far below `floor` count
// as zero so rank-deficient directions read as flat.
double relative_step(double from, double to, double floor) {
  const double scale = std::max({std::abs(from), std::abs(to), floor});
  return scale > 0.0 ? (to - from) / scale : 0.0;
}

} // namespace

double reconstruction_error(const PointCloud& cloud, double epsilon) {
  return reconstruction_error(cloud, pairwise_sq_dists(cloud), epsilon);
}

double reconstruction_error(const PointCloud& cloud, const Matrix& sq_dists, double epsilon) {
  require_positive_epsilon(epsilon);
  const Index n = cloud.size();
  if (sq_dists.rows() != n || sq_dists.cols() != n) {
    throw InvalidArgument("distance matrix does not match the cloud");
  }
  const Matrix& x = cloud.points();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);

  std::vector<double> per_point(static_cast<std::size_t>(n));
  parallel_for(per_point.size(), [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    // Shift by the nearest neighbour's distance; the normalized weights are
    // unchanged and never all underflow.
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) {
        nearest = std::min(nearest, sq_dists(i, j));
      }
    }
    Eigen::RowVectorXd reconstruction = Eigen::RowVectorXd::Zero(x.cols());
    double total = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      const double w = std::exp(-(sq_dists(i, j) - nearest) * inv_eps2);
      reconstruction += w * x.row(j);
      total += w;
    }
    per_point[row] = (x.row(i) - reconstruction / total).squaredNorm();
  });

  double sum = 0.0;
  for (double e : per_point) {
    sum += e;
  }
  return sum;
}

ReconstructionCurve select_bandwidth_rec(const PointCloud& cloud, const EpsilonGrid& grid) {
  const Matrix sq_dists = pairwise_sq_dists(cloud);
  ReconstructionCurve curve{grid};
  for (double eps : grid.values()) {
    curve.errors.push_back(reconstruction_error(cloud, sq_dists, eps));
  }
  const auto best = argmin_first(curve.errors);
  if (!best) {
    throw SelectionError("reconstruction error undefined on the whole grid");
  }
  curve.eps_hat_index = *best;
  curve.eps_hat = grid[*best];
  return curve;
}

SingularValueProfile multiscale_svd(const PointCloud& cloud, const EpsilonGrid& grid, Index k,
                                    std::span<const Index> eval_indices) {
  const Index limit = std::min(cloud.ambient_dim(), cloud.size() - 1);
  if (k < 1 || k > limit) {
    throw InvalidArgument("number of singular values must be in [1, " + std::to_string(limit) +
                          "], got " + std::to_string(k));
  }
  if (eval_indices.empty()) {
    throw InvalidArgument("no evaluation points given");
  }
  for (Index i : eval_indices) {
    if (i < 0 || i >= cloud.size()) {
      throw InvalidArgument("evaluation index " + std::to_string(i) + " out of range");
    }
  }

  const Matrix sq_dists = pairwise_sq_dists(cloud);
  const auto count = static_cast<std::size_t>(k);
  SingularValueProfile profile{grid, std::vector<std::vector<double>>(count)};

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double inv_eps2 = 1.0 / (grid[g] * grid[g]);
    Matrix per_point(static_cast<Index>(eval_indices.size()), k);
    parallel_for(eval_indices.size(), [&](std::size_t e) {
      const Index i = eval_indices[e];
      Vector w(cloud.size());
      for (Index j = 0; j < cloud.size(); ++j) {
        const double v = std::exp(-sq_dists(i, j) * inv_eps2);
        w(j) = v < 1e-300 ? 0.0 : v;
      }
      w(i) = 1.0;
      const WeightedCenter wc = weighted_recenter(cloud.points(), w);
      // Zero-weight rows of Z vanish; QR then SVD of R keeps tiny singular values accurate,
      // which the normal equations would not.
      const Index r = cloud.ambient_dim();
      Index rows = 0;
      Matrix compact(cloud.size(), r);
      for (Index j = 0; j < cloud.size(); ++j) {
        if (w(j) != 0.0) compact.row(rows++) = wc.z.row(j);
      }
      compact.conservativeResize(rows, r);
      Matrix core = compact;
      if (rows > r) {
        Eigen::HouseholderQR<Matrix> qr(compact);
        core = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
      }
      const Eigen::JacobiSVD<Matrix> svd(core);
      const Vector& sv = svd.singularValues();
      const double rescale = w.sum() / w.norm();
      for (Index c = 0; c < k; ++c) {
        per_point(static_cast<Index>(e), c) = c < sv.size() ? rescale * sv(c) : 0.0;
      }
    });
    for (Index c = 0; c < k; ++c) {
      double total = 0.0;
      for (Index e = 0; e < per_point.rows(); ++e) {
        total += per_point(e, c);
      }
      profile.values[static_cast<std::size_t>(c)].push_back(total /
                                                            static_cast<double>(per_point.rows()));
    }
  }
  return profile;
}

ClmrRange clmr_range(const SingularValueProfile& profile, Index k, double tolerance) {
  if (k < 1 || static_cast<std::size_t>(k) + 1 > profile.count()) {
    throw InvalidArgument("CLMR range with K = " + std::to_string(k) + " needs " +
                          std::to_string(k + 1) + " singular value sequences");
  }
  const auto& grid = profile.grid;
  const auto& top = profile.values.front();
  const auto& noise = profile.values[static_cast<std::size_t>(k)];
  const std::size_t steps = grid.size() - 1;

  ClmrRange range;
  range.k = k;

  std::size_t lo_index = 0;
  for (std::size_t g = 0; g < steps; ++g) {
    const double floor = 1e-9 * std::abs(top[g]);
    if (relative_step(noise[g], noise[g + 1], floor) <= tolerance) {
      range.defined_lo = true;
      range.eps_lo = grid[g];
      lo_index = g;
      break;
    }
  }

  // Scan backwards for the longest flat tail of lambda_1.
  std::size_t tail_start = steps;
  while (tail_start > 0) {
    const std::size_t g = tail_start - 1;
    if (std::abs(relative_step(top[g], top[g + 1], 0.0)) > tolerance) {
      break;
    }
    tail_start = g;
  }
  if (tail_start < steps) {
    const std::size_t hi_index = std::max(tail_start, lo_index);
    if (hi_index < steps) {
      range.defined_hi = true;
      range.eps_hi = grid[hi_index];
    }
  }
  return range;
}

std::optional<std::pair<std::size_t, std::size_t>>
dominant_eigengap_range(const SingularValueProfile& profile, Index gap) {
  if (gap < 1 || static_cast<std::size_t>(gap) + 1 > profile.count()) {
    throw InvalidArgument("eigengap index " + std::to_string(gap) + " needs " +
                          std::to_string(gap + 1) + " singular value sequences");
  }
  std::optional<std::pair<std::size_t, std::size_t>> range;
  for (std::size_t g = 0; g < profile.grid.size(); ++g) {
    std::size_t best = 0;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < profile.count(); ++j) {
      const double value = profile.values[j][g] - profile.values[j + 1][g];
      if (value > best_gap) {
        best_gap = value;
        best = j;
      }
    }
    if (best + 1 == static_cast<std::size_t>(gap)) {
      if (!range) {
        range.emplace(g, g);
      } else {
        range->second = g;
      }
    }
  }
  return range;
}

} // namespace geoscale
