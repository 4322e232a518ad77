#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/polygon.hpp"
#include "moebius/vec.hpp"

namespace moebius {

// Edge weights of the discrete energy. kForward weights vertex i by the
// arc d(a_{i+1}, a_i); kAveraged by (d(a_{i-1}, a_i) + d(a_i, a_{i+1})) / 2.
enum class WeightScheme { kForward, kAveraged };

const char* to_string(WeightScheme scheme);
WeightScheme weight_scheme_from_string(const std::string& name);

// Dense n x n matrix of per-pair contributions; the diagonal is zero.
struct TermMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

struct EnergyDiagnostics {
  double smallest_chord = 0.0;
  double largest_term = 0.0;
  // Smooth energy only.
  bool converged = true;
  int levels = 0;
  std::size_t grid = 0;
  std::vector<double> level_estimates;
};

struct EnergyReport {
  double value = 0.0;
  std::size_t term_count = 0;
  std::string scheme;
  std::optional<TermMatrix> terms;
  EnergyDiagnostics diagnostics;
  std::vector<std::string> flags;  // "vacuous sum", "unconverged"

  bool has_flag(const std::string& flag) const;
};

// Sum over i != j of (1/|v_j - v_i|^2 - 1/d(a_j, a_i)^2) w_i w_j, accumulated
// row by row with compensated summation. Throws kSingularity when two
// vertices are closer than 1e-12 L_p.
EnergyReport discrete_moebius_energy(const ClosedPolygon& p,
                                     WeightScheme scheme = WeightScheme::kForward,
                                     bool keep_terms = false);

// Closed form of the discrete energy on the regular n-gon, built from the
// diagonal lengths of chord_length_regular.
double regular_ngon_energy(std::size_t n);

struct Segment {
  Vec3 a;
  Vec3 b;
};

// Euclidean distance between two closed segments of positive length.
double segment_distance(const Segment& s, const Segment& t);

// U(p) - U(g_n), U summing |X_i||X_j| / dist(X_i, X_j)^2 over ordered pairs
// of edges that share no vertex. n = 3 gives 0 and the "vacuous sum" flag.
EnergyReport minimum_distance_energy(const ClosedPolygon& p, bool keep_terms = false);

// Double integral of 1/|g(t)-g(s)|^2 - 1/d(t,s)^2 over S_L x S_L.
//
// The kernel of the round circle of the same length, whose integral is
// exactly 4, is subtracted first. What remains is bounded and periodic on
// the torus and is integrated with the tensor-product trapezoidal rule on
// an N x N grid. Diagonal nodes use the limit value
// (kappa(s)^2 - (2 pi / L)^2) / 12 of the remainder. N doubles from 64 per
// level until successive levels differ by less than tol * max(1, value);
// after 12 levels the report carries the "unconverged" flag.
//
// Throws kSingularity when the sampled curve has a double point.
EnergyReport smooth_moebius_energy(const ArcLengthCurve& curve, double tol = 1e-8);

// Sphere inversion x -> center + r^2 (x - center) / |x - center|^2.
// Throws kInvalidInput when the center lies within 1e-6 L of the object.
ParametricCurve moebius_inversion(const ParametricCurve& curve, const Vec3& center, double radius);
ClosedPolygon moebius_inversion(const ClosedPolygon& p, const Vec3& center, double radius);

}  // namespace moebius
