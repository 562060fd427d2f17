#include "geoscale/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "geoscale/errors.hpp"

namespace geoscale {
namespace {

// Stream tags keep the generators independent for the same user seed.
enum class Stream : std::uint32_t { hourglass = 1, dome = 2, square = 3, noise = 4, subsample = 5 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void require_sample_size(Index n) {
  if (n < 10) {
    throw InvalidArgument("generator needs n >= 10, got " + std::to_string(n));
  }
}

double hourglass_area_density(double z) {
  const double slope = 2.0 * z;
  return hourglass_radius(z) * std::sqrt(1.0 + slope * slope);
}

} // namespace

PointCloud generate_hourglass(Index n, std::uint64_t seed) {
  require_sample_size(n);
  auto engine = make_engine(seed, Stream::hourglass);
  std::uniform_real_distribution<double> height(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  // Density is even in z and increasing in |z|, so its maximum is at z = 1.
  const double max_density = hourglass_area_density(1.0);

  Matrix points(n, 3);
  for (Index i = 0; i < n; ++i) {
    double z = 0.0;
    do {
      z = height(engine);
    } while (unit(engine) * max_density > hourglass_area_density(z));
    const double theta = angle(engine);
    const double rho = hourglass_radius(z);
    points(i, 0) = rho * std::cos(theta);
    points(i, 1) = rho * std::sin(theta);
    points(i, 2) = z;
  }
  return PointCloud(std::move(points));
}

PointCloud generate_dome(Index n, std::uint64_t seed) {
  require_sample_size(n);
  auto engine = make_engine(seed, Stream::dome);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix points(n, 3);
  for (Index i = 0; i < n; ++i) {
    Eigen::Vector3d v;
    do {
      v = {normal(engine), normal(engine), normal(engine)};
    } while (v.squaredNorm() < 1e-24);
    v /= v.norm();
    v.z() = std::abs(v.z());
    points.row(i) = v.transpose();
  }
  return PointCloud(std::move(points));
}

PointCloud generate_square(Index n, std::uint64_t seed) {
  require_sample_size(n);
  auto engine = make_engine(seed, Stream::square);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix points(n, 2);
  for (Index i = 0; i < n; ++i) {
    points(i, 0) = unit(engine);
    points(i, 1) = unit(engine);
  }
  return PointCloud(std::move(points));
}

PointCloud embed_with_noise(const PointCloud& cloud, const NoiseSpec& spec) {
  if (spec.ambient_dim < cloud.ambient_dim()) {
    throw InvalidArgument("ambient_dim " + std::to_string(spec.ambient_dim) +
                          " is smaller than the cloud dimension " +
                          std::to_string(cloud.ambient_dim()));
  }
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw InvalidArgument("noise sigma must be finite and >= 0");
  }

  Matrix points = Matrix::Zero(cloud.size(), spec.ambient_dim);
  points.leftCols(cloud.ambient_dim()) = cloud.points();
  if (spec.sigma > 0.0) {
    auto engine = make_engine(spec.seed, Stream::noise);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    // Row-major fill order so the stream does not depend on storage order.
    for (Index i = 0; i < points.rows(); ++i) {
      for (Index c = 0; c < points.cols(); ++c) {
        points(i, c) += noise(engine);
      }
    }
  }
  return PointCloud(std::move(points));
}

std::vector<Index> subsample(const PointCloud& cloud, Index n_prime, std::uint64_t seed) {
  if (n_prime < 1 || n_prime > cloud.size()) {
    throw InvalidArgument("subsample size must be in [1, " + std::to_string(cloud.size()) +
                          "], got " + std::to_string(n_prime));
  }
  std::vector<Index> all(static_cast<std::size_t>(cloud.size()));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(n_prime));
  auto engine = make_engine(seed, Stream::subsample);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), n_prime, engine);
  return chosen;
}

} // namespace geoscale
