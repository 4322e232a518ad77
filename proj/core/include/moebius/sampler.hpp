#pragma once

#include <cstddef>
#include <functional>

#include "moebius/vec.hpp"

namespace moebius {

// Arc-length view of a closed curve, used by the distance routines.
// point() and tangent() accept any t and wrap it modulo length.
struct CurveSampler {
  double length = 0.0;
  std::function<Vec3(double)> point;
  std::function<Vec3(double)> tangent;
  std::size_t segments = 0;  // edge count for polygons, 0 for smooth curves
};

}  // namespace moebius
