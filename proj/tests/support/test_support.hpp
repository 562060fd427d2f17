#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "geoscale/point_cloud.hpp"

namespace geoscale::testing {

// Self-deleting scratch directory under the system temp dir.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("geoscale-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  return (a + a.transpose()) / 2.0;
}

// Random orthogonal matrix from a QR factorization with sign-corrected R.
inline Matrix random_rotation(Index n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

// Flip each column so its largest-magnitude entry is positive.
inline Matrix canonical_signs(Matrix m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0) m.col(j) = -m.col(j);
  }
  return m;
}

// Largest |eigenvalue| of a symmetric matrix by power iteration on A^2. Each iteration squares
// the normalized iterate, so iteration k applies (A^2)^(2^k): near-ties between |lambda_max| and
// |lambda_min|, common for random symmetric matrices, still separate to machine precision.
inline double power_iteration_norm(const Matrix& a, int iterations = 10000) {
  const Matrix a2 = a * a;
  Matrix power = a2;
  for (int it = 0; it < iterations; ++it) {
    const double scale = power.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const Matrix next = (power / scale) * (power / scale);
    if (next.cwiseAbs().maxCoeff() == 0.0) break;
    power = next;
  }
  // The dominant eigenspace is the range of the converged power; take its largest column.
  Index col = 0;
  power.colwise().norm().maxCoeff(&col);
  const Vector v = power.col(col);
  if (v.norm() == 0.0) return 0.0;
  return std::sqrt(v.dot(a2 * v) / v.squaredNorm());
}

} // namespace geoscale::testing
