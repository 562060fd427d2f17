#include "geoscale/point_cloud.hpp"

#include <string>

#include "geoscale/errors.hpp"

namespace geoscale {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw InvalidArgument("point cloud needs at least 2 points, got " +
                          std::to_string(points_.rows()));
  }
  if (points_.cols() < 1) {
    throw InvalidArgument("point cloud needs at least 1 coordinate");
  }
  if (!points_.allFinite()) {
    throw InvalidArgument("point cloud contains non-finite coordinates");
  }
}

} // namespace geoscale
