#include "geoscale/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <dlfcn.h>
#include <lapacke.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "geoscale/errors.hpp"
#include "geoscale/parallel.hpp"

namespace geoscale {
namespace {

// OpenBLAS may split LAPACK work across its own threads, which changes
// rounding with the machine; keep it to one thread and parallelize above it.
void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] {
    using SetThreads = void (*)(int);
    if (void* symbol = dlsym(RTLD_DEFAULT, "openblas_set_num_threads")) {
      reinterpret_cast<SetThreads>(symbol)(1);
    }
  });
}

struct Eigenpairs {
  Vector values;   ///< ascending
  Matrix vectors;  ///< one column per value
};

// Some OpenBLAS builds pick kernels that return wrong eigenvectors on newer CPUs
// without reporting an error, so every pair is checked before it is trusted.
bool accurate(const Matrix& s, const Eigenpairs& pairs) {
  constexpr double kTolerance = 1e-8;
  const Matrix residual = s * pairs.vectors - pairs.vectors * pairs.values.asDiagonal();
  const Index k = pairs.vectors.cols();
  const Matrix gram = pairs.vectors.transpose() * pairs.vectors - Matrix::Identity(k, k);
  return residual.allFinite() && residual.colwise().norm().maxCoeff() <= kTolerance &&
         gram.cwiseAbs().maxCoeff() <= kTolerance;
}

// Largest `count` eigenpairs of a symmetric matrix with spectrum in [-1, 1].
Eigenpairs top_eigenpairs(const Matrix& s, Index count, double epsilon) {
  const Index n = s.rows();
  const auto order = static_cast<lapack_int>(n);
  const auto wanted = static_cast<lapack_int>(count);
  Matrix work = s;
  lapack_int found = 0;
  Vector values(n);
  Matrix vectors(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', order, work.data(), order,
                                         0.0, 0.0, order - wanted + 1, order, 0.0, &found,
                                         values.data(), vectors.data(), order, support.data());
  if (info == 0 && found == wanted) {
    Eigenpairs pairs{values.head(count), std::move(vectors)};
    if (accurate(s, pairs)) {
      return pairs;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed for eps = " + std::to_string(epsilon) +
                         " (N = " + std::to_string(n) + ", LAPACK info = " + std::to_string(info) +
                         ", found " + std::to_string(found) + " of " + std::to_string(wanted) +
                         " eigenpairs; fallback solver did not converge)");
  }
  Eigenpairs pairs{solver.eigenvalues().tail(count), solver.eigenvectors().rightCols(count)};
  if (!accurate(s, pairs)) {
    throw NumericalError("eigenpairs failed verification for eps = " + std::to_string(epsilon) +
                         " (N = " + std::to_string(n) + ")");
  }
  return pairs;
}

void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) {
    v = -v;
  }
}

} // namespace

Embedding laplacian_eigenmaps(const PointCloud& cloud, double epsilon, Index m) {
  return laplacian_eigenmaps(pairwise_sq_dists(cloud), epsilon, m);
}

Embedding laplacian_eigenmaps(const Matrix& sq_dists, double epsilon, Index m) {
  const Index n = sq_dists.rows();
  if (m < 1 || m + 1 > n) {
    throw InvalidArgument("embedding dimension must be in [1, " + std::to_string(n - 1) + "]");
  }
  pin_blas_threads();

  const RenormalizedKernel kernel = renormalize(heat_kernel(sq_dists, epsilon));
  const Vector inv_sqrt_degree = kernel.degree.cwiseSqrt().cwiseInverse();

  // Symmetric conjugate S = D'^-1/2 W' D'^-1/2 of the random walk P = D'^-1 W'.
  const Matrix s = inv_sqrt_degree.asDiagonal() * kernel.w_prime * inv_sqrt_degree.asDiagonal();
  const Eigenpairs pairs = top_eigenpairs(s, m + 1, epsilon);
  const Vector& values = pairs.values;
  const Matrix& vectors = pairs.vectors;

  // Ascending output; column m is the trivial top eigenvector.
  Embedding out;
  out.epsilon = epsilon;
  out.coords.resize(n, m);
  out.eigenvalues.resize(m);
  for (Index c = 0; c < m; ++c) {
    const Index source = m - 1 - c;
    Vector psi = inv_sqrt_degree.cwiseProduct(vectors.col(source));
    psi /= psi.norm();
    fix_sign(psi);
    out.coords.col(c) = psi;
    out.eigenvalues(c) = values(source);
  }
  if (!out.coords.allFinite()) {
    throw NumericalError("non-finite embedding coordinates for eps = " + std::to_string(epsilon));
  }
  return out;
}

ProcrustesResult procrustes_align(const Matrix& target, const Matrix& source) {
  if (target.rows() != source.rows() || target.cols() != source.cols() || target.size() == 0) {
    throw InvalidArgument("Procrustes inputs must have identical, non-empty shapes");
  }
  const Eigen::RowVectorXd target_mean = target.colwise().mean();
  const Eigen::RowVectorXd source_mean = source.colwise().mean();
  const Matrix a = target.rowwise() - target_mean;
  const Matrix b = source.rowwise() - source_mean;
  const double source_ss = b.squaredNorm();
  if (!(source_ss > 0.0) || !(a.squaredNorm() > 0.0)) {
    throw InvalidArgument("Procrustes input is degenerate: all points identical");
  }

  Eigen::JacobiSVD<Matrix> svd(b.transpose() * a, Eigen::ComputeFullU | Eigen::ComputeFullV);

  ProcrustesResult out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.scale = svd.singularValues().sum() / source_ss;
  out.translation = (target_mean - out.scale * source_mean * out.rotation).transpose();
  out.aligned = (out.scale * source * out.rotation).rowwise() + out.translation.transpose();
  out.rms = std::sqrt((target - out.aligned).squaredNorm() / static_cast<double>(target.rows()));
  return out;
}

SmoothingCurve smoothing_delta(const PointCloud& clean, const PointCloud& noisy,
                               const EpsilonGrid& grid, const EpsilonGrid& star_grid, Index m) {
  if (clean.size() != noisy.size()) {
    throw InvalidArgument("clean and noisy clouds must have the same number of points (" +
                          std::to_string(clean.size()) + " vs " + std::to_string(noisy.size()) +
                          ")");
  }
  const Matrix clean_sq = pairwise_sq_dists(clean);
  const Matrix noisy_sq = pairwise_sq_dists(noisy);

  // Each distinct bandwidth is embedded once; index < grid.size() is noisy.
  const std::size_t cells = grid.size() + star_grid.size();
  std::vector<std::optional<Embedding>> embeddings(cells);
  parallel_for(cells, [&](std::size_t c) {
    try {
      embeddings[c] = c < grid.size()
                          ? laplacian_eigenmaps(noisy_sq, grid[c], m)
                          : laplacian_eigenmaps(clean_sq, star_grid[c - grid.size()], m);
    } catch (const NumericalError&) {
      // cell stays missing
    }
  });

  SmoothingCurve curve{grid, star_grid};
  curve.delta.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  curve.argmin_star.assign(grid.size(), std::nullopt);
  curve.missing.assign(grid.size(), true);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!embeddings[g]) {
      continue;
    }
    for (std::size_t s = 0; s < star_grid.size(); ++s) {
      const auto& target = embeddings[grid.size() + s];
      if (!target) {
        continue;
      }
      const double rms = procrustes_align(target->coords, embeddings[g]->coords).rms;
      if (!curve.argmin_star[g] || rms < curve.delta[g]) {
        curve.delta[g] = rms;
        curve.argmin_star[g] = s;
        curve.missing[g] = false;
      }
    }
  }
  return curve;
}

} // namespace geoscale
