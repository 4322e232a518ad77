#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "moebius/sampler.hpp"
#include "moebius/vec.hpp"

namespace moebius {

// Closed polygon v_0 .. v_{n-1}; the closing edge v_{n-1} -> v_0 is implicit.
// Edge i runs from v_i to v_{i+1}; a_i is the arclength at v_i (a_0 = 0).
class ClosedPolygon {
 public:
  ClosedPolygon() = default;
  // Throws kInvalidInput for n < 3, zero-length edges or dim not in {2, 3}.
  explicit ClosedPolygon(std::vector<Vec3> vertices, int dim = 3);

  std::size_t size() const { return vertices_.size(); }
  int dim() const { return dim_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  const std::vector<double>& edge_lengths() const { return edges_; }
  double edge_length(std::size_t i) const { return edges_[i % edges_.size()]; }
  const std::vector<double>& arc_parameters() const { return arcs_; }
  double length() const { return length_; }
  Vec3 centroid() const;

  ClosedPolygon scaled(double factor) const;
  ClosedPolygon translated(const Vec3& offset) const;
  ClosedPolygon reversed() const;               // v_0, v_{n-1}, ..., v_1
  ClosedPolygon cyclic_shift(std::size_t k) const;  // new v_0 = old v_k

  // Arc-length sampler after uniform scaling to `target_length`.
  CurveSampler sampler(double target_length) const;
  CurveSampler sampler() const { return sampler(length_); }

 private:
  std::vector<Vec3> vertices_;
  std::vector<double> edges_;
  std::vector<double> arcs_;
  double length_ = 0.0;
  int dim_ = 3;
};

struct EquilateralityCertificate {
  double max_relative_deviation = 0.0;  // max_i |l_i - mean| / mean
  double closure_residual = 0.0;        // zero for stored polygons: closure is implicit

  bool is_member(double tol = 1e-9) const {
    return max_relative_deviation <= tol && closure_residual == 0.0;
  }
};

EquilateralityCertificate certify_equilateral(const ClosedPolygon& p);

// Planar regular n-gon with perimeter L, first vertex on the positive x axis.
ClosedPolygon regular_ngon(std::size_t n, double L, int dim = 2);

// Length of the k-th diagonal (k = 1 is an edge) of the regular n-gon with perimeter L.
double chord_length_regular(std::size_t n, std::size_t k, double L);

struct SampledPolygon {
  ClosedPolygon polygon;
  double closure_residual = 0.0;  // |sum of unit edge vectors| before closing
  unsigned attempts = 1;
};

// Alternating projection of edge directions onto {unit length} and
// {zero sum}; vertices are partial sums starting at the origin. Returns an
// empty optional-like result (attempts == 0) when 10^4 sweeps do not reach
// residual 1e-12.
SampledPolygon close_directions(std::vector<Vec3> directions, int dim);

// Seeded unit-edge closed polygon; deterministic in (n, dim, seed).
SampledPolygon sample_random_equilateral(std::size_t n, int dim, std::uint64_t seed);
ClosedPolygon random_equilateral_polygon(std::size_t n, int dim, std::uint64_t seed);

// Piecewise linear arclength evaluation, t taken modulo L_p.
Vec3 polygon_eval(const ClosedPolygon& p, double t);
// Edge index containing t (modulo L_p).
std::size_t polygon_edge_at(const ClosedPolygon& p, double t);

enum class NormKind { kLq, kW1q };

struct CurveNorm {
  NormKind kind = NormKind::kLq;
  double q = 2.0;  // in [1, inf]

  static CurveNorm lq(double q) { return {NormKind::kLq, q}; }
  static CurveNorm w1q(double q) { return {NormKind::kW1q, q}; }
  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
};

struct DistanceReport {
  double value = 0.0;         // on `grid` midpoints
  double coarse_value = 0.0;  // on grid / 2 midpoints
  double refinement_estimate() const;
};

// Composite-midpoint L^q or W^{1,q} distance of two length-1 closed curves.
// Throws kInvalidInput when the lengths differ from 1 by more than 1e-9 or
// grid < 2 max(segments, 256).
DistanceReport curve_distance(const CurveSampler& f, const CurveSampler& g, CurveNorm norm,
                              std::size_t grid);

}  // namespace moebius
