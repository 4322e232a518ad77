#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <random>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/polygon.hpp"
#include "moebius/vec.hpp"

namespace moebius::testing {

// Rotation by `angle` about the unit axis `axis` (Rodrigues).
inline Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(axis, v) + (1.0 - c) * dot(axis, v) * axis;
}

inline ClosedPolygon rigid_motion(const ClosedPolygon& p, const Vec3& axis, double angle,
                                  const Vec3& shift) {
  std::vector<Vec3> v;
  for (const Vec3& x : p.vertices()) v.push_back(rotate(x, axis, angle) + shift);
  return ClosedPolygon(std::move(v), 3);
}

inline const ArcLengthCurve& unit_circle() {
  static const ArcLengthCurve c = arclength_reparametrize(ParametricCurve::circle(1.0));
  return c;
}

inline const ArcLengthCurve& trefoil() {
  static const ArcLengthCurve c = arclength_reparametrize(ParametricCurve::torus_knot(2, 3, 2.0, 1.0));
  return c;
}

inline const ArcLengthCurve& ellipse(double a, double b) {
  static std::map<std::pair<double, double>, ArcLengthCurve> cache;
  auto it = cache.find({a, b});
  if (it == cache.end()) {
    it = cache.emplace(std::make_pair(a, b), arclength_reparametrize(ParametricCurve::ellipse(a, b))).first;
  }
  return it->second;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace moebius::testing
