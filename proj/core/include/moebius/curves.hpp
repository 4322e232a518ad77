#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moebius/sampler.hpp"
#include "moebius/vec.hpp"

namespace moebius {

// Catalog entry describing how a curve was built. Round-trips through the
// JSON curve descriptor {"kind": ..., "params": {...}}.
struct CurveDescriptor {
  std::string kind;                       // circle | ellipse | rounded_polygon | torus_knot | samples | custom
  std::map<std::string, double> params;
  std::vector<Vec3> samples;              // only for kind == "samples"
};

// Closed curve u in [0, 1) -> R^d, d in {2, 3}, periodic in u.
class ParametricCurve {
 public:
  using Map = std::function<Vec3(double)>;

  static ParametricCurve circle(double radius);
  static ParametricCurve ellipse(double semi_x, double semi_y);
  // Regular polygon with `sides` straight pieces of length `side` joined by
  // circular arcs of radius `corner_radius`. C^{1,1}, curvature jumps.
  static ParametricCurve rounded_polygon(int sides, double side, double corner_radius);
  // (p, q) torus knot on a torus with center-line radius `major` and tube
  // radius `minor`; needs gcd(p, q) = 1 and major > minor.
  static ParametricCurve torus_knot(int p, int q, double major, double minor);
  // Periodic cubic spline through uniformly spaced samples.
  static ParametricCurve from_samples(std::vector<Vec3> samples, int dim);
  static ParametricCurve custom(Map point, int dim, Map derivative = {}, Map second = {});

  static ParametricCurve from_descriptor(const CurveDescriptor& desc);

  Vec3 point(double u) const;
  Vec3 derivative(double u) const;
  Vec3 second_derivative(double u) const;

  int dim() const { return dim_; }
  const CurveDescriptor& descriptor() const { return descriptor_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

  // x -> scale * x, applied to all evaluators.
  ParametricCurve scaled(double scale) const;
  // x -> f(x) with Jacobian jac(x); used for rigid motions and inversions.
  ParametricCurve mapped(std::function<Vec3(const Vec3&)> f,
                         std::function<Vec3(const Vec3&, const Vec3&)> jacobian_times) const;

 private:
  ParametricCurve(Map point, Map derivative, Map second, int dim, CurveDescriptor desc);

  Map point_;
  Map derivative_;
  Map second_;
  int dim_ = 3;
  CurveDescriptor descriptor_;
};

// Unit-speed reparametrisation s in [0, L) of a ParametricCurve.
class ArcLengthCurve {
 public:
  double length() const { return length_; }
  int dim() const { return source_.dim(); }
  const ParametricCurve& source() const { return source_; }
  std::size_t node_count() const { return s_nodes_.size() - 1; }

  // Source parameter u(s); s is taken modulo L.
  double parameter_at(double s) const;
  Vec3 point(double s) const;
  Vec3 tangent(double s) const;
  // One inversion of s for both; used by root finders.
  std::pair<Vec3, Vec3> point_and_tangent(double s) const;
  double curvature(double s) const;

  // Sampler of the curve rescaled to total length `target_length`.
  CurveSampler sampler(double target_length) const;
  CurveSampler sampler() const { return sampler(length_); }

 private:
  friend ArcLengthCurve arclength_reparametrize(const ParametricCurve&, std::size_t, double);

  explicit ArcLengthCurve(ParametricCurve source) : source_(std::move(source)) {}
  double arc_between(double u0, double u1) const;

  ParametricCurve source_;
  double length_ = 0.0;
  std::vector<double> s_nodes_;   // cumulative length at u = k / M, k = 0..M
  std::vector<double> speed_;     // |c'(u_k)|
};

// Builds the arc-length table with at least `nodes` intervals, doubling until
// the total length changes by less than tol * L. Throws on degenerate input.
ArcLengthCurve arclength_reparametrize(const ParametricCurve& curve, std::size_t nodes = 1024,
                                       double tol = 1e-13);

// Shortest distance between s and t on the circle of circumference L.
double intrinsic_distance(double L, double s, double t);

// Grid estimate of a geometric constant and the 5% inflated bound handed
// to downstream code.
struct ConstantEstimate {
  double estimate = 0.0;
  double bound = 0.0;
};

inline constexpr double kConstantInflation = 1.05;

// sup |gamma''| from centred second differences on `grid` points.
ConstantEstimate curvature_bound(const ArcLengthCurve& curve, std::size_t grid = 2048);

// max d(s,t) / |gamma(t) - gamma(s)| over grid pairs. Throws kSingularity
// when a pair at intrinsic distance > 1e-3 L has chord < 1e-9 L.
ConstantEstimate bilipschitz_estimate(const ArcLengthCurve& curve, std::size_t grid = 512);

}  // namespace moebius
