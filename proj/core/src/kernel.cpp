#include "geoscale/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoscale/errors.hpp"
#include "geoscale/parallel.hpp"

namespace geoscale {
namespace {

constexpr double kFlushBelow = 1e-300;

double kernel_value(double sq_dist, double inv_eps2) {
  const double w = std::exp(-sq_dist * inv_eps2);
  return w < kFlushBelow ? 0.0 : w;
}

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("bandwidth must be finite and > 0, got " + std::to_string(epsilon));
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw InvalidArgument(std::string(what) + " must be a square matrix with at least 2 rows");
  }
}

} // namespace

EpsilonGrid::EpsilonGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw InvalidArgument("bandwidth grid needs at least 2 values");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] > 0.0) || !std::isfinite(values_[k])) {
      throw InvalidArgument("bandwidth grid values must be finite and > 0");
    }
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw InvalidArgument("bandwidth grid values must be strictly increasing");
    }
  }
}

EpsilonGrid EpsilonGrid::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw InvalidArgument("grid scale factor must be > 0");
  }
  std::vector<double> out = values_;
  for (double& v : out) {
    v *= factor;
  }
  return EpsilonGrid(std::move(out));
}

Matrix pairwise_sq_dists(const PointCloud& cloud) {
  // Columns of the transpose are points, contiguous in memory.
  const Matrix xt = cloud.points().transpose();
  const Index n = cloud.size();
  const Index r = cloud.ambient_dim();
  Matrix d = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    const double* xi = xt.col(i).data();
    for (Index j = i + 1; j < n; ++j) {
      const double* xj = xt.col(j).data();
      double s = 0.0;
      for (Index c = 0; c < r; ++c) {
        const double diff = xi[c] - xj[c];
        s += diff * diff;
      }
      d(i, j) = s;
      d(j, i) = s;
    }
  });
  return d;
}

WeightMatrix heat_kernel(const Matrix& sq_dists, double epsilon) {
  require_positive_epsilon(epsilon);
  require_square(sq_dists, "squared distance matrix");
  const Index n = sq_dists.rows();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  Matrix w(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t col) {
    const auto j = static_cast<Index>(col);
    for (Index i = 0; i < n; ++i) {
      w(i, j) = kernel_value(sq_dists(i, j), inv_eps2);
    }
    w(j, j) = 1.0;
  });
  return {std::move(w), epsilon};
}

RenormalizedKernel renormalize(const WeightMatrix& weights) {
  const Matrix& w = weights.w;
  require_square(w, "weight matrix");
  const Index n = w.rows();

  // W is symmetric, so column sums equal row sums; columns are contiguous.
  Vector degree(n);
  for (Index j = 0; j < n; ++j) {
    degree(j) = w.col(j).sum();
  }

  Matrix w_prime(n, n);
  Vector degree_prime(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t col) {
    const auto j = static_cast<Index>(col);
    for (Index i = 0; i < n; ++i) {
      w_prime(i, j) = w(i, j) / (degree(i) * degree(j));
    }
    degree_prime(j) = w_prime.col(j).sum();
  });
  return {std::move(w_prime), std::move(degree_prime), weights.epsilon};
}

GraphLaplacian renormalized_laplacian(const WeightMatrix& weights) {
  require_positive_epsilon(weights.epsilon);
  RenormalizedKernel kernel = renormalize(weights);
  const Index n = kernel.w_prime.rows();
  const double scale = 4.0 / (weights.epsilon * weights.epsilon);

  // P_ij = W'_ij / d'_i. W' is symmetric so row i of W' is column i.
  Matrix l(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    const double inv_degree = 1.0 / kernel.degree(i);
    for (Index j = 0; j < n; ++j) {
      l(i, j) = scale * (kernel.w_prime(j, i) * inv_degree);
    }
    l(i, i) -= scale;
  });
  return {std::move(l), weights.epsilon};
}

double epsilon_max(const Matrix& sq_dists) {
  require_square(sq_dists, "squared distance matrix");
  const Index n = sq_dists.rows();
  double total = 0.0;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      total += sq_dists(i, j);
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return std::sqrt(total / pairs);
}

double kernel_excess(const Matrix& sq_dists, double epsilon) {
  require_positive_epsilon(epsilon);
  require_square(sq_dists, "squared distance matrix");
  const Index n = sq_dists.rows();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  double worst = 0.0;
  for (Index j = 0; j < n; ++j) {
    double off_diagonal = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (i != j) {
        off_diagonal += kernel_value(sq_dists(i, j), inv_eps2);
      }
    }
    worst = std::max(worst, off_diagonal);
  }
  return worst;
}

double epsilon_min(const Matrix& sq_dists, double gamma) {
  require_square(sq_dists, "squared distance matrix");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be finite and > 0");
  }
  const Index n = sq_dists.rows();
  if (gamma >= static_cast<double>(n - 1)) {
    throw InvalidArgument("gamma must be below N - 1 = " + std::to_string(n - 1));
  }

  double min_sq = std::numeric_limits<double>::infinity();
  double max_sq = 0.0;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (sq_dists(i, j) == 0.0) {
        throw InvalidArgument("points " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide; the kernel never reduces to the identity");
      }
      min_sq = std::min(min_sq, sq_dists(i, j));
      max_sq = std::max(max_sq, sq_dists(i, j));
    }
  }

  // Below lo every off-diagonal column sum is at most (N - 1) exp(-min_sq / lo^2) = gamma / 2.
  double lo = std::sqrt(min_sq / std::log(2.0 * static_cast<double>(n - 1) / gamma));
  double hi = std::sqrt(max_sq);
  while (kernel_excess(sq_dists, hi) < gamma) {
    lo = hi;
    hi *= 2.0;
  }
  double f_hi = kernel_excess(sq_dists, hi);

  constexpr double kRelativeWidth = 1e-3;
  constexpr double kStatisticSlack = 1.01;
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= kRelativeWidth * hi && f_hi <= kStatisticSlack * gamma) {
      break;
    }
    const double mid = 0.5 * (lo + hi);
    const double f_mid = kernel_excess(sq_dists, mid);
    if (f_mid >= gamma) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

EpsilonGrid log_grid(double eps_min, double eps_max, std::size_t count) {
  if (!(eps_min > 0.0) || !(eps_max > eps_min) || !std::isfinite(eps_max)) {
    throw InvalidArgument("log grid needs 0 < eps_min < eps_max");
  }
  if (count < 2) {
    throw InvalidArgument("log grid needs at least 2 points");
  }
  const double ratio = eps_max / eps_min;
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = eps_min * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  values.back() = eps_max;
  return EpsilonGrid(std::move(values));
}

EpsilonGrid default_grid(const Matrix& sq_dists, std::size_t count, double gamma) {
  return log_grid(epsilon_min(sq_dists, gamma), epsilon_max(sq_dists), count);
}

} // namespace geoscale
