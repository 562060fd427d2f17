#pragma once

#include <cstdint>
#include <vector>

#include "geoscale/point_cloud.hpp"

namespace geoscale {

/// Radius of the hourglass surface of revolution at height z in [-1, 1].
constexpr double hourglass_radius(double z) noexcept { return 0.3 + z * z; }

/// n points uniform w.r.t. surface area on the hourglass
/// x^2 + y^2 = (0.3 + z^2)^2, z in [-1, 1]. Requires n >= 10.
PointCloud generate_hourglass(Index n, std::uint64_t seed);

/// n points uniform on the closed unit upper hemisphere. Requires n >= 10.
PointCloud generate_dome(Index n, std::uint64_t seed);

/// n points uniform on the unit square [0, 1]^2 (a flat 2-manifold with
/// border, r = 2). Requires n >= 10.
PointCloud generate_square(Index n, std::uint64_t seed);

struct NoiseSpec {
  Index ambient_dim = 13;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Pads the cloud with zero columns up to spec.ambient_dim, then adds iid
/// N(0, sigma^2) noise to every coordinate.
PointCloud embed_with_noise(const PointCloud& cloud, const NoiseSpec& spec);

/// n_prime distinct row indices drawn uniformly without replacement,
/// returned in increasing order.
std::vector<Index> subsample(const PointCloud& cloud, Index n_prime, std::uint64_t seed);

} // namespace geoscale
