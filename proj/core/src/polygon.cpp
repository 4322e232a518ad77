#include "moebius/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "moebius/error.hpp"
#include "moebius/summation.hpp"

namespace moebius {

ClosedPolygon::ClosedPolygon(std::vector<Vec3> vertices, int dim)
    : vertices_(std::move(vertices)), dim_(dim) {
  if (dim_ != 2 && dim_ != 3) fail_input("polygon dimension must be 2 or 3");
  const std::size_t n = vertices_.size();
  if (n < 3) fail_input("polygon needs at least 3 vertices, got " + std::to_string(n));
  if (dim_ == 2) {
    for (const Vec3& v : vertices_) {
      if (v.z != 0.0) fail_input("planar polygon has nonzero z coordinate");
    }
  }
  edges_.resize(n);
  arcs_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    edges_[i] = distance(vertices_[i], vertices_[(i + 1) % n]);
    if (!(edges_[i] > 0.0)) fail_input("zero-length edge " + std::to_string(i));
    arcs_[i] = acc;
    acc += edges_[i];
  }
  length_ = acc;
}

Vec3 ClosedPolygon::centroid() const {
  Vec3 c;
  for (const Vec3& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

ClosedPolygon ClosedPolygon::scaled(double factor) const {
  std::vector<Vec3> v = vertices_;
  for (Vec3& x : v) x *= factor;
  return ClosedPolygon(std::move(v), dim_);
}

ClosedPolygon ClosedPolygon::translated(const Vec3& offset) const {
  std::vector<Vec3> v = vertices_;
  for (Vec3& x : v) x += offset;
  return ClosedPolygon(std::move(v), dim_);
}

ClosedPolygon ClosedPolygon::reversed() const {
  std::vector<Vec3> v(vertices_.size());
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) v[i] = vertices_[(n - i) % n];
  return ClosedPolygon(std::move(v), dim_);
}

ClosedPolygon ClosedPolygon::cyclic_shift(std::size_t k) const {
  std::vector<Vec3> v(vertices_.size());
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) v[i] = vertices_[(i + k) % n];
  return ClosedPolygon(std::move(v), dim_);
}

CurveSampler ClosedPolygon::sampler(double target_length) const {
  if (!(target_length > 0.0)) fail_input("sampler length must be positive");
  const ClosedPolygon scaled_copy = scaled(target_length / length_);
  CurveSampler out;
  out.length = scaled_copy.length();
  out.segments = size();
  out.point = [scaled_copy](double t) { return polygon_eval(scaled_copy, t); };
  out.tangent = [scaled_copy](double t) {
    const std::size_t i = polygon_edge_at(scaled_copy, t);
    return (scaled_copy.vertex(i + 1) - scaled_copy.vertex(i)) / scaled_copy.edge_length(i);
  };
  return out;
}

EquilateralityCertificate certify_equilateral(const ClosedPolygon& p) {
  const auto& e = p.edge_lengths();
  const double mean = p.length() / static_cast<double>(e.size());
  double dev = 0.0;
  for (double l : e) dev = std::max(dev, std::abs(l - mean) / mean);
  return {dev, 0.0};
}

ClosedPolygon regular_ngon(std::size_t n, double L, int dim) {
  if (n < 3) fail_input("regular n-gon needs n >= 3");
  if (!(L > 0.0)) fail_input("regular n-gon needs positive length");
  const double nn = static_cast<double>(n);
  const double radius = L / (2.0 * nn * std::sin(std::numbers::pi / nn));
  std::vector<Vec3> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / nn;
    v[k] = {radius * std::cos(a), radius * std::sin(a), 0.0};
  }
  return ClosedPolygon(std::move(v), dim);
}

double chord_length_regular(std::size_t n, std::size_t k, double L) {
  if (n < 3) fail_input("regular n-gon needs n >= 3");
  if (k < 1 || k > n - 1) fail_input("diagonal order must lie in [1, n-1]");
  const double nn = static_cast<double>(n);
  const std::size_t kk = std::min(k, n - k);  // exact symmetry k <-> n-k
  return L * std::sin(static_cast<double>(kk) * std::numbers::pi / nn) /
         (nn * std::sin(std::numbers::pi / nn));
}

SampledPolygon close_directions(std::vector<Vec3> u, int dim) {
  const std::size_t n = u.size();
  if (n < 3) fail_input("need at least 3 directions");
  constexpr int kMaxSweeps = 10000;
  double residual = 0.0;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Vec3 mean;
    for (const Vec3& d : u) mean += d;
    mean /= static_cast<double>(n);
    for (Vec3& d : u) {
      d -= mean;
      const double len = norm(d);
      if (len == 0.0) return {ClosedPolygon{}, 0.0, 0};
      d /= len;
    }
    Vec3 sum;
    for (const Vec3& d : u) sum += d;
    residual = norm(sum);
    if (residual < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged) return {ClosedPolygon{}, residual, 0};

  std::vector<Vec3> v(n);
  for (std::size_t i = 1; i < n; ++i) v[i] = v[i - 1] + u[i - 1];
  // Coincident vertices count as degenerate.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(v[i], v[j]) < 1e-9) return {ClosedPolygon{}, residual, 0};
    }
  }
  return {ClosedPolygon(std::move(v), dim), residual, 1};
}

SampledPolygon sample_random_equilateral(std::size_t n, int dim, std::uint64_t seed) {
  if (n < 3) fail_input("random polygon needs n >= 3");
  if (dim != 2 && dim != 3) fail_input("polygon dimension must be 2 or 3");
  constexpr unsigned kMaxAttempts = 100;
  for (unsigned attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      attempt};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> dirs(n);
    for (Vec3& d : dirs) {
      do {
        d = {gauss(rng), gauss(rng), dim == 3 ? gauss(rng) : 0.0};
      } while (norm(d) < 1e-8);
      d /= norm(d);
    }
    SampledPolygon out = close_directions(std::move(dirs), dim);
    if (out.attempts != 0) {
      out.attempts = attempt + 1;
      return out;
    }
  }
  fail_convergence("random equilateral polygon: closure projection failed after 100 attempts");
}

ClosedPolygon random_equilateral_polygon(std::size_t n, int dim, std::uint64_t seed) {
  return sample_random_equilateral(n, dim, seed).polygon;
}

std::size_t polygon_edge_at(const ClosedPolygon& p, double t) {
  const double L = p.length();
  double w = std::fmod(t, L);
  if (w < 0.0) w += L;
  const auto& a = p.arc_parameters();
  const auto it = std::upper_bound(a.begin(), a.end(), w);
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - a.begin() - 1));
}

Vec3 polygon_eval(const ClosedPolygon& p, double t) {
  const double L = p.length();
  double w = std::fmod(t, L);
  if (w < 0.0) w += L;
  const std::size_t i = polygon_edge_at(p, w);
  const double frac = (w - p.arc_parameters()[i]) / p.edge_length(i);
  return p.vertex(i) + frac * (p.vertex(i + 1) - p.vertex(i));
}

double DistanceReport::refinement_estimate() const { return std::abs(value - coarse_value); }

namespace {

double discrete_distance(const CurveSampler& f, const CurveSampler& g, CurveNorm nrm,
                         std::size_t grid) {
  const bool sup = std::isinf(nrm.q);
  const double h = 1.0 / static_cast<double>(grid);
  CompensatedSum pos_acc, tan_acc;
  double pos_max = 0.0, tan_max = 0.0;
  for (std::size_t m = 0; m < grid; ++m) {
    const double t = (static_cast<double>(m) + 0.5) * h;
    const double dp = distance(f.point(t), g.point(t));
    double dt = 0.0;
    if (nrm.kind == NormKind::kW1q) dt = distance(f.tangent(t), g.tangent(t));
    if (sup) {
      pos_max = std::max(pos_max, dp);
      tan_max = std::max(tan_max, dt);
    } else {
      pos_acc.add(std::pow(dp, nrm.q) * h);
      tan_acc.add(std::pow(dt, nrm.q) * h);
    }
  }
  if (sup) return std::max(pos_max, tan_max);
  return std::pow(pos_acc.value() + tan_acc.value(), 1.0 / nrm.q);
}

}  // namespace

DistanceReport curve_distance(const CurveSampler& f, const CurveSampler& g, CurveNorm nrm,
                              std::size_t grid) {
  if (std::abs(f.length - 1.0) > 1e-9 || std::abs(g.length - 1.0) > 1e-9) {
    fail_input("curve_distance expects length-1 curves; rescale first");
  }
  if (!(nrm.q >= 1.0)) fail_input("norm exponent q must lie in [1, inf]");
  const std::size_t min_grid = 2 * std::max<std::size_t>({f.segments, g.segments, 256});
  if (grid < min_grid) {
    fail_input("distance grid " + std::to_string(grid) + " below minimum " +
               std::to_string(min_grid));
  }
  return {discrete_distance(f, g, nrm, grid), discrete_distance(f, g, nrm, grid / 2)};
}

}  // namespace moebius
