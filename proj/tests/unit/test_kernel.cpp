#include <doctest.h>

#include <cmath>
#include <random>

#include "geoscale/dataset.hpp"
#include "geoscale/errors.hpp"
#include "geoscale/kernel.hpp"
#include "test_support.hpp"

using namespace geoscale;
using doctest::Approx;

namespace {

PointCloud line_cloud(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return PointCloud(m);
}

// Column-sum excess of the heat kernel, recomputed independently.
double excess_oracle(const Matrix& sq, double eps) {
  double worst = 0.0;
  for (Index j = 0; j < sq.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < sq.rows(); ++i) s += std::exp(-sq(i, j) / (eps * eps));
    worst = std::max(worst, s - 1.0);
  }
  return worst;
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("pairwise distances of a 3-4-5 triangle") {
  Matrix m(2, 2);
  m << 0, 0, 3, 4;
  const Matrix sq = pairwise_sq_dists(PointCloud(m));
  CHECK(sq(0, 1) == 25.0);
  CHECK(sq(1, 0) == 25.0);
  CHECK(sq.diagonal().isZero(0.0));
}

TEST_CASE("pairwise distances match a direct loop") {
  std::mt19937_64 rng(11);
  const PointCloud cloud(geoscale::testing::random_matrix(5, 4, rng));
  const Matrix sq = pairwise_sq_dists(cloud);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) {
      double d = 0.0;
      for (Index k = 0; k < 4; ++k) {
        const double diff = cloud.points()(i, k) - cloud.points()(j, k);
        d += diff * diff;
      }
      CHECK(std::abs(sq(i, j) - d) < 1e-12);
    }
}

TEST_CASE("heat kernel hand values") {
  const Matrix sq = pairwise_sq_dists(line_cloud({0, 1, 3}));
  const WeightMatrix w = heat_kernel(sq, 2.0);
  CHECK(w.w(0, 0) == 1.0);
  CHECK(w.w(0, 1) == Approx(std::exp(-0.25)).epsilon(1e-15));
  CHECK(w.w(0, 2) == Approx(std::exp(-2.25)).epsilon(1e-15));
  CHECK(w.w(1, 2) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(w.w == w.w.transpose());
}

TEST_CASE("heat kernel at distance epsilon is 1/e") {
  const Matrix sq = pairwise_sq_dists(line_cloud({0, 0.7}));
  CHECK(heat_kernel(sq, 0.7).w(0, 1) == Approx(0.367879441171442).epsilon(1e-12));
}

TEST_CASE("heat kernel rejects non-positive bandwidth") {
  const Matrix sq = pairwise_sq_dists(line_cloud({0, 1}));
  CHECK_THROWS_AS(heat_kernel(sq, 0.0), InvalidArgument);
  CHECK_THROWS_AS(heat_kernel(sq, -1.0), InvalidArgument);
  CHECK_THROWS_AS(heat_kernel(sq, std::nan("")), InvalidArgument);
}

TEST_CASE("two identical points give the averaging operator") {
  const Matrix sq = pairwise_sq_dists(line_cloud({2, 2}));
  const double eps = 0.5;
  const GraphLaplacian lap = renormalized_laplacian(heat_kernel(sq, eps));
  Matrix expected(2, 2);
  expected << -0.5, 0.5, 0.5, -0.5;
  expected *= 4.0 / (eps * eps);
  CHECK((lap.l - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("renormalized kernel matches its definition") {
  std::mt19937_64 rng(5);
  const PointCloud cloud(geoscale::testing::random_matrix(7, 3, rng));
  const WeightMatrix w = heat_kernel(pairwise_sq_dists(cloud), 1.3);
  const RenormalizedKernel k = renormalize(w);
  const Vector d = w.w.rowwise().sum();
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 7; ++j)
      CHECK(k.w_prime(i, j) == Approx(w.w(i, j) / (d(i) * d(j))).epsilon(1e-14));
  CHECK((k.degree - k.w_prime.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Laplacian rows sum to zero and kill constants") {
  const PointCloud cloud = embed_with_noise(generate_hourglass(300, 2), {13, 0.01, 1});
  const Matrix sq = pairwise_sq_dists(cloud);
  for (double eps : {0.05, 0.2, 1.0}) {
    const GraphLaplacian lap = renormalized_laplacian(heat_kernel(sq, eps));
    const double scale = lap.l.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(lap.l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK((lap.l * Vector::Constant(300, 3.7)).cwiseAbs().maxCoeff() <= 1e-9 * 3.7 * scale);
  }
}

TEST_CASE("Laplacian is translation invariant") {
  std::mt19937_64 rng(3);
  const Matrix x = geoscale::testing::random_matrix(40, 3, rng);
  const Matrix shifted = x.rowwise() + Eigen::RowVector3d(5.0, -2.0, 0.25);
  const Matrix a = renormalized_laplacian(heat_kernel(pairwise_sq_dists(PointCloud(x)), 0.8)).l;
  const Matrix b = renormalized_laplacian(heat_kernel(pairwise_sq_dists(PointCloud(shifted)), 0.8)).l;
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("scaling data and bandwidth together scales L by 1/c^2") {
  std::mt19937_64 rng(4);
  const Matrix x = geoscale::testing::random_matrix(40, 3, rng);
  const double c = 2.0, eps = 0.8;
  const WeightMatrix w1 = heat_kernel(pairwise_sq_dists(PointCloud(x)), eps);
  const WeightMatrix w2 = heat_kernel(pairwise_sq_dists(PointCloud(c * x)), c * eps);
  CHECK((w1.w - w2.w).cwiseAbs().maxCoeff() <= 1e-12);
  const Matrix l1 = renormalized_laplacian(w1).l;
  const Matrix l2 = renormalized_laplacian(w2).l;
  CHECK((l2 - l1 / (c * c)).cwiseAbs().maxCoeff() <= 1e-12 * l1.cwiseAbs().maxCoeff());
}

TEST_CASE("epsilon_max hand values") {
  CHECK(epsilon_max(pairwise_sq_dists(line_cloud({0, 5}))) == Approx(5.0).epsilon(1e-15));
  Matrix corners(4, 2);
  corners << 0, 0, 1, 0, 0, 1, 1, 1;
  const Matrix sq = pairwise_sq_dists(PointCloud(corners));
  CHECK(epsilon_max(sq) == Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
  CHECK(epsilon_max(pairwise_sq_dists(PointCloud(3.0 * corners))) ==
        Approx(3.0 * std::sqrt(4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("epsilon_min for two points has a closed form") {
  const Matrix sq = pairwise_sq_dists(line_cloud({0, 1}));
  const double eps = epsilon_min(sq, 1e-4);
  const double exact = 1.0 / std::sqrt(std::log(1e4));
  CHECK(eps == Approx(exact).epsilon(1e-3));
  CHECK(exact == Approx(0.32945).epsilon(1e-4));
}

TEST_CASE("epsilon_min satisfies the bisection contract") {
  const PointCloud cloud = embed_with_noise(generate_dome(400, 6), {13, 0.01, 2});
  const Matrix sq = pairwise_sq_dists(cloud);
  for (double gamma : {1e-4, 1e-2}) {
    const double eps = epsilon_min(sq, gamma);
    const double excess = excess_oracle(sq, eps);
    CHECK(excess >= gamma);
    CHECK(excess <= 1.01 * gamma);
    CHECK(kernel_excess(sq, eps) == Approx(excess).epsilon(1e-12));
  }
}

TEST_CASE("epsilon_min is homogeneous") {
  const PointCloud cloud = generate_square(200, 3);
  const double a = epsilon_min(pairwise_sq_dists(cloud));
  const double b = epsilon_min(pairwise_sq_dists(PointCloud(4.0 * cloud.points())));
  CHECK(b / a == Approx(4.0).epsilon(2e-3));
}

TEST_CASE("epsilon_min rejects bad input") {
  CHECK_THROWS_AS(epsilon_min(pairwise_sq_dists(line_cloud({0, 1})), 0.0), InvalidArgument);
  CHECK_THROWS_AS(epsilon_min(pairwise_sq_dists(line_cloud({0, 1, 1}))), InvalidArgument);
}

TEST_CASE("log grid") {
  const EpsilonGrid g = log_grid(1, 100, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == Approx(10.0).epsilon(1e-14));
  CHECK(g[2] == 100.0);

  const EpsilonGrid h = log_grid(0.1, 10, 20);
  CHECK(h.eps_min() == 0.1);
  CHECK(h.eps_max() == 10.0);
  const double ratio = h[1] / h[0];
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(std::abs(h[k] / h[k - 1] - ratio) < 1e-12);

  CHECK_THROWS_AS(log_grid(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(log_grid(2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(log_grid(1.0, 2.0, 1), InvalidArgument);
  CHECK_THROWS_AS(EpsilonGrid({1.0, 1.0}), InvalidArgument);
}

TEST_CASE("default grid spans epsilon_min to epsilon_max") {
  const Matrix sq = pairwise_sq_dists(generate_square(150, 2));
  const EpsilonGrid g = default_grid(sq);
  CHECK(g.size() == 20);
  CHECK(g.eps_min() == epsilon_min(sq));
  CHECK(g.eps_max() == epsilon_max(sq));
  CHECK(g.scaled(2.0).eps_max() == 2.0 * g.eps_max());
}

}
