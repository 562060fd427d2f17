#include <doctest.h>

#include <cmath>
#include <random>

#include "geoscale/baselines.hpp"
#include "geoscale/dataset.hpp"
#include "geoscale/errors.hpp"
#include "geoscale/kernel.hpp"
#include "test_support.hpp"

using namespace geoscale;
using namespace geoscale::testing;

namespace {

double reconstruction_oracle(const Matrix& x, double eps) {
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    Eigen::RowVectorXd recon = Eigen::RowVectorXd::Zero(x.cols());
    double wsum = 0.0;
    for (Index j = 0; j < x.rows(); ++j) {
      if (j == i) continue;
      const double w = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (eps * eps));
      recon += w * x.row(j);
      wsum += w;
    }
    total += (x.row(i) - recon / wsum).squaredNorm();
  }
  return total;
}

SingularValueProfile hand_profile(std::vector<std::vector<double>> values) {
  return {log_grid(0.01, 1.0, values.front().size()), std::move(values)};
}

} // namespace

TEST_SUITE("baselines") {

TEST_CASE("two points reconstruct each other") {
  Matrix x(2, 3);
  x << 0, 1, 2, 3, -1, 0.5;
  const double d2 = (x.row(0) - x.row(1)).squaredNorm();
  for (double eps : {0.01, 1.0, 100.0})
    CHECK(reconstruction_error(PointCloud(x), eps) == doctest::Approx(2.0 * d2).epsilon(1e-14));
}

TEST_CASE("collinear equally spaced points") {
  Matrix x(3, 1);
  x << 0, 1, 2;
  const double eps = 1.5;
  const double near = std::exp(-1.0 / (eps * eps)), far = std::exp(-4.0 / (eps * eps));
  // End points: reconstruction (near * 1 + far * 2) / (near + far); the middle point is exact.
  const double end_err = std::pow((near + 2 * far) / (near + far), 2);
  CHECK(reconstruction_error(PointCloud(x), eps) == doctest::Approx(2 * end_err).epsilon(1e-13));
}

TEST_CASE("reconstruction error matches a direct loop") {
  std::mt19937_64 rng(9);
  const Matrix x = random_matrix(10, 4, rng);
  for (double eps : {0.7, 1.5, 4.0})
    CHECK(std::abs(reconstruction_error(PointCloud(x), eps) - reconstruction_oracle(x, eps)) <
          1e-12 * std::max(1.0, reconstruction_oracle(x, eps)));
}

TEST_CASE("reconstruction error survives tiny bandwidths") {
  std::mt19937_64 rng(10);
  const Matrix x = random_matrix(10, 2, rng);
  const double r = reconstruction_error(PointCloud(x), 1e-3);
  CHECK(std::isfinite(r));
  // Each point falls back to its nearest neighbour.
  double nn = 0.0;
  for (Index i = 0; i < 10; ++i) {
    double best = INFINITY;
    for (Index j = 0; j < 10; ++j)
      if (j != i) best = std::min(best, (x.row(i) - x.row(j)).squaredNorm());
    nn += best;
  }
  CHECK(r == doctest::Approx(nn).epsilon(1e-9));
}

TEST_CASE("Rec selection on the flat plane is interior and deterministic") {
  const PointCloud cloud = embed_with_noise(generate_square(600, 2), {13, 0.0, 0});
  const EpsilonGrid grid = default_grid(pairwise_sq_dists(cloud));
  const ReconstructionCurve a = select_bandwidth_rec(cloud, grid);
  const ReconstructionCurve b = select_bandwidth_rec(cloud, grid);
  CHECK(a.errors == b.errors);
  CHECK(a.eps_hat_index > 0);
  CHECK(a.eps_hat_index + 1 < grid.size());
  CHECK(std::isfinite(a.eps_hat));
}

TEST_CASE("Rec selection on a monotone curve picks an endpoint") {
  // Two points: the error is constant, so the first grid value wins the tie.
  Matrix x(2, 1);
  x << 0, 1;
  const ReconstructionCurve c = select_bandwidth_rec(PointCloud(x), log_grid(0.1, 10.0, 5));
  CHECK(c.eps_hat_index == 0);
}

TEST_CASE("planar data has rank two at every scale") {
  std::mt19937_64 rng(2);
  const Matrix basis = random_rotation(13, rng).leftCols(2);
  const PointCloud cloud(generate_square(400, 4).points() * basis.transpose());
  const EpsilonGrid grid = default_grid(pairwise_sq_dists(cloud), 12);
  const std::vector<Index> eval = subsample(cloud, 100, 1);
  const SingularValueProfile p = multiscale_svd(cloud, grid, 3, eval);
  REQUIRE(p.count() == 3);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(p.values[2][g] < 1e-9 * p.values[0][g]);
    CHECK(p.values[0][g] >= p.values[1][g]);
  }
}

TEST_CASE("curvature raises the third singular value with scale") {
  const PointCloud cloud = generate_dome(1500, 5);
  const EpsilonGrid grid = log_grid(0.02, 0.5, 12);
  const std::vector<Index> eval = subsample(cloud, 150, 2);
  const SingularValueProfile p = multiscale_svd(cloud, grid, 3, eval);
  for (std::size_t g = 1; g < grid.size() / 2; ++g) {
    CAPTURE(g);
    CHECK(p.values[2][g] / p.values[0][g] > p.values[2][g - 1] / p.values[0][g - 1]);
  }
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t k = 1; k < 3; ++k) CHECK(p.values[k][g] <= p.values[k - 1][g]);
}

TEST_CASE("multiscale SVD validates its arguments") {
  const PointCloud cloud = generate_dome(30, 5);
  const std::vector<Index> eval{0, 1};
  CHECK_THROWS_AS(multiscale_svd(cloud, log_grid(0.1, 1, 3), 4, eval), InvalidArgument);
  CHECK_THROWS_AS(multiscale_svd(cloud, log_grid(0.1, 1, 3), 0, eval), InvalidArgument);
}

TEST_CASE("CLMR range on a hand profile") {
  const SingularValueProfile p = hand_profile({
      {1.0, 2.0, 2.7, 3.0, 3.0, 3.0, 3.0, 3.0},
      {0.8, 1.0, 1.1, 1.1, 1.1, 1.1, 1.1, 1.1},
      {0.1, 0.2, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05},
  });
  const ClmrRange r = clmr_range(p, 2);
  CHECK(r.defined_lo);
  CHECK(r.defined_hi);
  CHECK(r.eps_lo == p.grid[2]);
  CHECK(r.eps_hi == p.grid[3]);
  CHECK(r.k == 2);
}

TEST_CASE("CLMR lower end is undefined without a descent") {
  const SingularValueProfile p = hand_profile({
      {1.0, 2.0, 3.0, 4.0, 5.0},
      {0.5, 0.6, 0.7, 0.8, 0.9},
      {0.1, 0.2, 0.3, 0.4, 0.5},
  });
  const ClmrRange r = clmr_range(p, 2);
  CHECK_FALSE(r.defined_lo);
  CHECK_FALSE(r.defined_hi);
  CHECK_THROWS_AS(clmr_range(p, 3), InvalidArgument);
}

TEST_CASE("dominant eigengap range") {
  const SingularValueProfile p = hand_profile({
      {1.0, 1.0, 1.0, 1.0, 1.0},
      {0.95, 0.9, 0.9, 0.95, 0.99},
      {0.94, 0.1, 0.1, 0.2, 0.985},
  });
  const auto range = dominant_eigengap_range(p, 2);
  REQUIRE(range.has_value());
  CHECK(range->first == 1);
  CHECK(range->second == 3);
  CHECK_FALSE(dominant_eigengap_range(hand_profile({{1, 1}, {0.1, 0.1}, {0.09, 0.09}}), 2).has_value());
}

}
