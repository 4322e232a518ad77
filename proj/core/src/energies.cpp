#include "moebius/energies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "moebius/error.hpp"
#include "moebius/parallel.hpp"
#include "moebius/summation.hpp"

namespace moebius {
namespace {

constexpr double kPi = std::numbers::pi;

// First offending pair seen by any worker, reported after the join.
struct PairFault {
  std::atomic<bool> set{false};
  std::size_t i = 0, j = 0;

  void record(std::size_t a, std::size_t b) {
    bool expected = false;
    if (set.compare_exchange_strong(expected, true)) {
      i = a;
      j = b;
    }
  }
};

double sum_rows(const std::vector<CompensatedSum>& rows) {
  CompensatedSum total;
  for (const auto& r : rows) total.add(r);
  return total.value();
}

}  // namespace

const char* to_string(WeightScheme scheme) {
  return scheme == WeightScheme::kForward ? "forward" : "averaged";
}

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "forward") return WeightScheme::kForward;
  if (name == "averaged") return WeightScheme::kAveraged;
  fail_input("unknown weight scheme '" + name + "'");
}

bool EnergyReport::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

EnergyReport discrete_moebius_energy(const ClosedPolygon& p, WeightScheme scheme,
                                     bool keep_terms) {
  const std::size_t n = p.size();
  const double L = p.length();
  const auto& a = p.arc_parameters();
  const auto& v = p.vertices();

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Edges never exceed L/2, so d(a_{i+1}, a_i) is the edge length.
    w[i] = scheme == WeightScheme::kForward
               ? p.edge_length(i)
               : 0.5 * (p.edge_length(i + n - 1) + p.edge_length(i));
  }

  EnergyReport report;
  report.scheme = to_string(scheme);
  report.term_count = n * (n - 1);
  if (keep_terms) report.terms = TermMatrix{n, std::vector<double>(n * n, 0.0)};

  const double min_chord = 1e-12 * L;
  std::vector<CompensatedSum> rows(n);
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  std::vector<double> row_max(n, -std::numeric_limits<double>::infinity());
  PairFault fault;

  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double chord = distance(v[i], v[j]);
      if (chord < min_chord) {
        fault.record(i, j);
        return;
      }
      const double d = intrinsic_distance(L, a[i], a[j]);
      const double term = (1.0 / (chord * chord) - 1.0 / (d * d)) * w[i] * w[j];
      rows[i].add(term);
      row_min[i] = std::min(row_min[i], chord);
      row_max[i] = std::max(row_max[i], term);
      if (keep_terms) report.terms->at(i, j) = term;
    }
  });
  if (fault.set) {
    fail_singular("infinite energy: double point at (" + std::to_string(fault.i) + "," +
                  std::to_string(fault.j) + ")");
  }

  report.value = sum_rows(rows);
  report.diagnostics.smallest_chord = *std::min_element(row_min.begin(), row_min.end());
  report.diagnostics.largest_term = *std::max_element(row_max.begin(), row_max.end());
  return report;
}

double regular_ngon_energy(std::size_t n) {
  if (n < 3) fail_input("regular n-gon energy needs n >= 3");
  const double nn = static_cast<double>(n);
  CompensatedSum acc;
  for (std::size_t k = 1; k < n; ++k) {
    const double chord = chord_length_regular(n, k, 1.0);
    const double arc = static_cast<double>(std::min(k, n - k)) / nn;
    acc.add(nn * (1.0 / (chord * chord) - 1.0 / (arc * arc)) / (nn * nn));
  }
  return acc.value();
}

double segment_distance(const Segment& s, const Segment& t) {
  const Vec3 d1 = s.b - s.a;
  const Vec3 d2 = t.b - t.a;
  const Vec3 r = s.a - t.a;
  const double aa = dot(d1, d1);
  const double ee = dot(d2, d2);
  if (!(aa > 0.0) || !(ee > 0.0)) fail_input("segment_distance: zero-length segment");
  const double f = dot(d2, r);
  const double c = dot(d1, r);
  const double b = dot(d1, d2);
  const double denom = aa * ee - b * b;

  double u = 0.0;
  if (denom > 1e-14 * aa * ee) u = std::clamp((b * f - c * ee) / denom, 0.0, 1.0);
  double w = (b * u + f) / ee;
  if (w < 0.0) {
    w = 0.0;
    u = std::clamp(-c / aa, 0.0, 1.0);
  } else if (w > 1.0) {
    w = 1.0;
    u = std::clamp((b - c) / aa, 0.0, 1.0);
  }
  return distance(s.a + u * d1, t.a + w * d2);
}

namespace {

struct MinDistanceSum {
  double value = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
};

MinDistanceSum min_distance_sum(const ClosedPolygon& p, TermMatrix* terms) {
  const std::size_t n = p.size();
  const double L = p.length();
  std::vector<CompensatedSum> rows(n);
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  std::vector<double> row_max(n, 0.0);
  PairFault fault;

  parallel_for(n, [&](std::size_t i) {
    const Segment si{p.vertex(i), p.vertex(i + 1)};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || j == (i + 1) % n || (j + 1) % n == i) continue;
      const double dist = segment_distance(si, Segment{p.vertex(j), p.vertex(j + 1)});
      if (dist < 1e-12 * L) {
        fault.record(i, j);
        return;
      }
      const double term = p.edge_length(i) * p.edge_length(j) / (dist * dist);
      rows[i].add(term);
      row_min[i] = std::min(row_min[i], dist);
      row_max[i] = std::max(row_max[i], term);
      if (terms) terms->at(i, j) = term;
    }
  });
  if (fault.set) {
    fail_singular("infinite energy: segment pair (" + std::to_string(fault.i) + "," +
                  std::to_string(fault.j) + ")");
  }
  return {sum_rows(rows), *std::min_element(row_min.begin(), row_min.end()),
          *std::max_element(row_max.begin(), row_max.end())};
}

}  // namespace

EnergyReport minimum_distance_energy(const ClosedPolygon& p, bool keep_terms) {
  const std::size_t n = p.size();
  EnergyReport report;
  report.scheme = "mindist";
  report.term_count = n > 3 ? n * (n - 3) : 0;
  if (keep_terms) report.terms = TermMatrix{n, std::vector<double>(n * n, 0.0)};
  if (n == 3) {
    report.value = 0.0;
    report.flags.push_back("vacuous sum");
    return report;
  }
  const MinDistanceSum own = min_distance_sum(p, keep_terms ? &*report.terms : nullptr);
  const MinDistanceSum reference = min_distance_sum(regular_ngon(n, p.length(), p.dim()), nullptr);
  report.value = own.value - reference.value;
  report.diagnostics.smallest_chord = own.smallest;
  report.diagnostics.largest_term = own.largest;
  return report;
}

namespace {

struct GridEnergy {
  double value;
  double smallest_chord;
  double largest_term;
};

GridEnergy smooth_energy_on_grid(const ArcLengthCurve& curve, std::size_t grid) {
  const double L = curve.length();
  const double h = L / static_cast<double>(grid);
  std::vector<Vec3> pts(grid);
  std::vector<double> kappa(grid);
  parallel_for(grid, [&](std::size_t i) {
    const double s = static_cast<double>(i) * h;
    pts[i] = curve.point(s);
    kappa[i] = curve.curvature(s);
  });

  // Inverse squared chord of the round circle of length L, by index offset.
  std::vector<double> circle_inv(grid, 0.0);
  const double rc = L / kPi;
  for (std::size_t k = 1; k < grid; ++k) {
    const double c = rc * std::sin(kPi * static_cast<double>(k) / static_cast<double>(grid));
    circle_inv[k] = 1.0 / (c * c);
  }
  const double circle_kappa2 = (2.0 * kPi / L) * (2.0 * kPi / L);

  const double tiny = 1e-9 * L;
  std::vector<CompensatedSum> rows(grid);
  std::vector<double> row_min(grid, std::numeric_limits<double>::infinity());
  std::vector<double> row_max(grid, -std::numeric_limits<double>::infinity());
  PairFault fault;

  parallel_for(grid, [&](std::size_t i) {
    const double diag = (kappa[i] * kappa[i] - circle_kappa2) / 12.0;
    rows[i].add(diag);
    row_max[i] = diag;
    for (std::size_t j = i + 1; j < grid; ++j) {
      const double c2 = norm2(pts[j] - pts[i]);
      if (c2 < tiny * tiny) {
        const std::size_t k = j - i;
        if (static_cast<double>(std::min(k, grid - k)) * h > 1e-3 * L) {
          fault.record(i, j);
          return;
        }
      }
      const double term = 1.0 / c2 - circle_inv[j - i];
      rows[i].add(2.0 * term);  // (i, j) and (j, i)
      row_min[i] = std::min(row_min[i], c2);
      row_max[i] = std::max(row_max[i], term);
    }
  });
  if (fault.set) {
    fail_singular("non-embedded curve: grid points " + std::to_string(fault.i) + " and " +
                  std::to_string(fault.j) + " coincide");
  }
  const double remainder = sum_rows(rows) * h * h;
  return {4.0 + remainder, std::sqrt(*std::min_element(row_min.begin(), row_min.end())),
          *std::max_element(row_max.begin(), row_max.end())};
}

}  // namespace

EnergyReport smooth_moebius_energy(const ArcLengthCurve& curve, double tol) {
  if (!(tol >= 1e-10 && tol <= 1e-3)) fail_input("smooth energy tolerance must lie in [1e-10, 1e-3]");
  constexpr int kMaxLevels = 12;
  constexpr std::size_t kBaseGrid = 64;

  EnergyReport report;
  report.scheme = "smooth";
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int level = 1; level <= kMaxLevels; ++level) {
    const std::size_t grid = kBaseGrid << (level - 1);
    const GridEnergy e = smooth_energy_on_grid(curve, grid);
    report.value = e.value;
    report.term_count = grid * grid;
    report.diagnostics.levels = level;
    report.diagnostics.grid = grid;
    report.diagnostics.smallest_chord = e.smallest_chord;
    report.diagnostics.largest_term = e.largest_term;
    report.diagnostics.level_estimates.push_back(e.value);
    if (level > 1 && std::abs(e.value - previous) < tol * std::max(1.0, std::abs(e.value))) {
      report.diagnostics.converged = true;
      return report;
    }
    previous = e.value;
  }
  report.diagnostics.converged = false;
  report.flags.push_back("unconverged");
  return report;
}

namespace {

double point_segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 e = b - a;
  const double e2 = norm2(e);
  const double t = e2 > 0.0 ? std::clamp(dot(x - a, e) / e2, 0.0, 1.0) : 0.0;
  return distance(a + t * e, x);
}

Vec3 invert_point(const Vec3& x, const Vec3& center, double r2) {
  const Vec3 y = x - center;
  return center + (r2 / norm2(y)) * y;
}

}  // namespace

ParametricCurve moebius_inversion(const ParametricCurve& curve, const Vec3& center, double radius) {
  if (!(radius > 0.0)) fail_input("inversion radius must be positive");
  constexpr std::size_t kProbe = 4096;
  double length = 0.0, closest = std::numeric_limits<double>::infinity();
  Vec3 prev = curve.point(0.0);
  for (std::size_t i = 0; i < kProbe; ++i) {
    const Vec3 x = curve.point(static_cast<double>(i + 1) / kProbe);
    length += distance(prev, x);
    closest = std::min(closest, point_segment_distance(center, prev, x));
    prev = x;
  }
  if (closest <= 1e-6 * length) fail_input("inversion center lies on the curve");

  const double r2 = radius * radius;
  return curve.mapped([center, r2](const Vec3& x) { return invert_point(x, center, r2); },
                      [center, r2](const Vec3& x, const Vec3& v) {
                        const Vec3 y = x - center;
                        const double y2 = norm2(y);
                        return (r2 / y2) * (v - (2.0 * dot(y, v) / y2) * y);
                      });
}

ClosedPolygon moebius_inversion(const ClosedPolygon& p, const Vec3& center, double radius) {
  if (!(radius > 0.0)) fail_input("inversion radius must be positive");
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    closest = std::min(closest, point_segment_distance(center, p.vertex(i), p.vertex(i + 1)));
  }
  if (closest <= 1e-6 * p.length()) fail_input("inversion center lies on the polygon");
  const double r2 = radius * radius;
  std::vector<Vec3> v;
  v.reserve(p.size());
  for (const Vec3& x : p.vertices()) v.push_back(invert_point(x, center, r2));
  return ClosedPolygon(std::move(v), p.dim());
}

}  // namespace moebius
