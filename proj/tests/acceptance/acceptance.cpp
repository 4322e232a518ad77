#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/energies.hpp"
#include "moebius/error.hpp"
#include "moebius/experiments.hpp"
#include "moebius/inscription.hpp"
#include "moebius/optimize.hpp"
#include "moebius/polygon.hpp"

namespace {

using namespace moebius;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(axis, v) + (1.0 - c) * dot(axis, v) * axis;
}

std::vector<std::size_t> doublings(std::size_t from, std::size_t to) {
  std::vector<std::size_t> n;
  for (std::size_t k = from; k <= to; k *= 2) n.push_back(k);
  return n;
}

Outcome circle_energy() {
  const ArcLengthCurve c = arclength_reparametrize(ParametricCurve::circle(1.0));
  const double e = smooth_moebius_energy(c, 1e-8).value;
  return {std::abs(e - 4.0) <= 1e-6, "E = " + fmt("%.12f", e)};
}

Outcome square_and_hexagon() {
  const double sq = discrete_moebius_energy(regular_ngon(4, 1.0)).value;
  const double hex = discrete_moebius_energy(regular_ngon(6, 1.0)).value;
  return {std::abs(sq - 1.0) <= 1e-12 && std::abs(hex - 11.0 / 6.0) <= 1e-12,
          "square " + fmt("%.15f", sq) + ", hexagon " + fmt("%.15f", hex)};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (std::size_t n = 3; n <= 256; ++n) {
    const double direct = discrete_moebius_energy(regular_ngon(n, 1.0)).value;
    const double oracle = regular_ngon_energy(n);
    // The triangle has zero energy; compare it absolutely.
    worst = std::max(worst, n == 3 ? std::abs(direct - oracle) : rel(direct, oracle));
  }
  return {worst <= 1e-10, "max relative difference " + fmt("%.3g", worst)};
}

Outcome rate_reproduction() {
  StudyOptions circle_opts;
  circle_opts.reference = 4.0;
  const ConvergenceReport circle =
      convergence_study(arclength_reparametrize(ParametricCurve::circle(1.0)), doublings(8, 1024),
                        SubdivisionMode::kUniform, circle_opts);
  const ConvergenceReport knot =
      convergence_study(arclength_reparametrize(ParametricCurve::torus_knot(2, 3, 2.0, 1.0)),
                        doublings(32, 1024), SubdivisionMode::kEquilateral);
  const bool ok = circle.slope >= 0.85 && circle.slope <= 1.15 && knot.slope >= 0.85;
  return {ok, "circle slope " + fmt("%.4f", circle.slope) + ", torus knot slope " + fmt("%.4f", knot.slope)};
}

Outcome gamma_recovery() {
  const GammaRecoveryReport r =
      gamma_recovery_study(arclength_reparametrize(ParametricCurve::torus_knot(2, 3, 2.0, 1.0)), doublings(64, 2048));
  const auto& a = r.rows.front();
  const auto& b = r.rows.back();
  const double gap_ratio = a.gap / b.gap, dist_ratio = a.w1inf / b.w1inf;
  return {gap_ratio >= 10.0 && dist_ratio >= 10.0,
          "gap shrinks " + fmt("%.1fx", gap_ratio) + ", W1inf shrinks " + fmt("%.1fx", dist_ratio)};
}

Outcome minimality() {
  std::size_t below = 0, flat = 0;
  double min_gap = INFINITY;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t n = 4 + seed % 29;
    const ClosedPolygon p = random_equilateral_polygon(n, 3, seed);
    const double gap = discrete_moebius_energy(p).value - regular_ngon_energy(n);
    if (gap < -1e-9) ++below;
    if (procrustes_to_regular(p) > 1e-3) {
      if (!(gap > 1e-6)) ++flat;
      min_gap = std::min(min_gap, gap);
    }
  }
  return {below == 0 && flat == 0, std::to_string(below) + " below g_n, " + std::to_string(flat) +
                                       " far polygons without strict gap, smallest far gap " +
                                       fmt("%.3g", min_gap)};
}

Outcome minimizer_descent() {
  bool ok = true;
  std::vector<std::string> parts;
  for (std::size_t n : {4u, 8u, 16u}) {
    const ClosedPolygon g = regular_ngon(n, 1.0, 3);
    std::mt19937_64 rng(100 + n);
    std::normal_distribution<double> noise(0.0, 0.01 / static_cast<double>(n));
    std::vector<Vec3> v = g.vertices();
    for (Vec3& x : v) x += Vec3{noise(rng), noise(rng), noise(rng)};
    OptimizerConfig cfg;
    cfg.max_iterations = 5000;
    const DescentTrace t = minimize_discrete_energy(ClosedPolygon(v, 3), cfg);
    const double residual = procrustes_to_regular(t.final_polygon);
    ok = ok && t.regular_gap < 1e-8 && residual < 1e-4;
    parts.push_back("n=" + std::to_string(n) + " gap " + fmt("%.2g", t.regular_gap) + " residual " +
                    fmt("%.2g", residual) + " (" + to_string(t.reason) + ", " +
                    std::to_string(t.rows.empty() ? 0 : t.rows.back().iteration) + " it)");
  }
  std::string detail;
  for (const std::string& s : parts) detail += (detail.empty() ? "" : "; ") + s;
  return {ok, detail};
}

Outcome circle_limit() {
  std::vector<std::uint64_t> seeds(10);
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = k;
  const MinimizerReport r = minimizer_study({8, 16, 32, 64}, seeds, 3);
  std::string detail = "W1inf to circle:";
  for (const auto& row : r.rows) detail += " " + fmt("%.3g", row.circle_w1inf);
  return {r.circle_decreasing, detail};
}

ParametricCurve transformed(const ParametricCurve& c, double shift, const Vec3& axis, double angle,
                            const Vec3& offset) {
  return ParametricCurve::custom(
      [c, shift, axis, angle, offset](double u) {
        return rotate(c.point(u + shift - std::floor(u + shift)), axis, angle) + offset;
      },
      3);
}

Outcome invariance() {
  double worst = 0.0;
  const Vec3 axis = Vec3{1.0, 2.0, 2.0} / 3.0;
  const Vec3 offset{0.4, -7.0, 2.5};
  const ClosedPolygon p = random_equilateral_polygon(40, 3, 77);
  std::vector<Vec3> moved;
  for (const Vec3& x : p.vertices()) moved.push_back(rotate(x, axis, 1.1) + offset);
  const ClosedPolygon q(moved, 3);

  const std::vector<std::function<double(const ClosedPolygon&)>> energies = {
      [](const ClosedPolygon& x) { return discrete_moebius_energy(x, WeightScheme::kForward).value; },
      [](const ClosedPolygon& x) { return discrete_moebius_energy(x, WeightScheme::kAveraged).value; },
      [](const ClosedPolygon& x) { return minimum_distance_energy(x).value; },
  };
  for (const auto& e : energies) {
    const double base = e(p);
    for (double lambda : {0.1, 17.0}) worst = std::max(worst, rel(base, e(p.scaled(lambda))));
    worst = std::max(worst, rel(base, e(q)));
    worst = std::max(worst, rel(base, e(p.cyclic_shift(13))));
    worst = std::max(worst, rel(base, e(p.reversed())));
  }

  const ParametricCurve knot = ParametricCurve::torus_knot(2, 3, 2.0, 1.0);
  const double smooth = smooth_moebius_energy(arclength_reparametrize(knot), 1e-8).value;
  for (double lambda : {0.1, 17.0}) {
    worst = std::max(worst, rel(smooth, smooth_moebius_energy(arclength_reparametrize(knot.scaled(lambda)), 1e-8).value));
  }
  const double rigid =
      smooth_moebius_energy(arclength_reparametrize(transformed(knot, 0.0, axis, 1.1, offset)), 1e-8).value;
  const double relabelled =
      smooth_moebius_energy(arclength_reparametrize(transformed(knot, 0.37, axis, 0.0, {})), 1e-8).value;
  const double smooth_worst = std::max(rel(smooth, rigid), rel(smooth, relabelled));
  worst = std::max(worst, smooth_worst);

  const double tol = 1e-8;
  const double inverted = smooth_moebius_energy(
      arclength_reparametrize(moebius_inversion(ParametricCurve::circle(1.0), {3.0, 0.0, 0.0}, 1.0)), tol).value;
  const double circle = smooth_moebius_energy(arclength_reparametrize(ParametricCurve::circle(1.0)), tol).value;
  const bool inversion_ok = std::abs(inverted - circle) <= 2.0 * tol;
  return {worst <= 1e-10 && inversion_ok,
          "max relative change " + fmt("%.3g", worst) + " (smooth rigid/relabel " + fmt("%.3g", smooth_worst) +
              "), inversion difference " + fmt("%.3g", std::abs(inverted - circle))};
}

Outcome gradient_correctness() {
  double worst = 0.0;
  std::mt19937_64 pick(17);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 5 + pick() % 20;
    const ClosedPolygon p = random_equilateral_polygon(n, 3, 1000 + seed);
    const std::vector<Vec3> g = energy_gradient(p);
    const double h = 1e-6 * p.length();
    double gmax = 0.0, err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gmax = std::max(gmax, norm(g[i]));
      Vec3 fd;
      for (int c = 0; c < 3; ++c) {
        std::vector<Vec3> plus = p.vertices(), minus = p.vertices();
        plus[i][c] += h;
        minus[i][c] -= h;
        fd[c] = (discrete_moebius_energy(ClosedPolygon(plus, 3)).value -
                 discrete_moebius_energy(ClosedPolygon(minus, 3)).value) /
                (2.0 * h);
      }
      err = std::max(err, norm(fd - g[i]));
    }
    worst = std::max(worst, err / gmax);
  }
  return {worst <= 1e-5, "max relative deviation " + fmt("%.3g", worst)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // <= 0: no runtime bound
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "circle energy", 10.0, circle_energy},
      {2, "square and hexagon oracle", 0.0, square_and_hexagon},
      {3, "oracle equivalence n = 3..256", 30.0, oracle_equivalence},
      {4, "rate reproduction", 300.0, rate_reproduction},
      {5, "gamma recovery", 600.0, gamma_recovery},
      {6, "minimality of the regular polygon", 0.0, minimality},
      {7, "minimizer descent", 0.0, minimizer_descent},
      {8, "circle limit of minimizers", 0.0, circle_limit},
      {9, "invariance suite", 0.0, invariance},
      {10, "gradient correctness", 0.0, gradient_correctness},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
