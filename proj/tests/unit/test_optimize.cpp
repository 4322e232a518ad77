#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moebius/energies.hpp"
#include "moebius/error.hpp"
#include "moebius/optimize.hpp"
#include "support.hpp"

namespace moebius {
namespace {

constexpr double kPi = std::numbers::pi;
using testing::rigid_motion;

Vec3 unit(const Vec3& v) { return v / norm(v); }

double max_norm(const std::vector<Vec3>& g) {
  double m = 0.0;
  for (const Vec3& x : g) m = std::max(m, norm(x));
  return m;
}

double energy_of(std::vector<Vec3> v, int dim) {
  return discrete_moebius_energy(ClosedPolygon(std::move(v), dim)).value;
}

ClosedPolygon perturbed(const ClosedPolygon& p, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> v = p.vertices();
  for (Vec3& x : v) {
    x.x += amplitude * g(rng);
    x.y += amplitude * g(rng);
    if (p.dim() == 3) x.z += amplitude * g(rng);
  }
  return ClosedPolygon(std::move(v), p.dim());
}

TEST(EnergyGradient, MatchesCentralDifferences) {
  std::mt19937_64 pick(17);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 5 + pick() % 20;
    const ClosedPolygon p = random_equilateral_polygon(n, 3, seed);
    const std::vector<Vec3> g = energy_gradient(p);
    const double h = 1e-6 * p.length();
    std::vector<Vec3> fd(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) {
        std::vector<Vec3> plus = p.vertices(), minus = p.vertices();
        plus[i][c] += h;
        minus[i][c] -= h;
        fd[i][c] = (energy_of(plus, 3) - energy_of(minus, 3)) / (2.0 * h);
      }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, norm(g[i] - fd[i]));
    EXPECT_LE(err, 1e-5 * max_norm(g)) << "seed " << seed << " n " << n;
  }
}

TEST(EnergyGradient, ConservesMomentum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClosedPolygon p = random_equilateral_polygon(12, 3, seed);
    const std::vector<Vec3> g = energy_gradient(p);
    Vec3 force{}, torque{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      force = force + g[i];
      torque = torque + cross(p.vertex(i), g[i]);
    }
    const double scale = max_norm(g) * p.length();
    EXPECT_LT(norm(force), 1e-10 * max_norm(g));
    EXPECT_LT(norm(torque), 1e-10 * scale);
  }
}

TEST(EnergyGradient, ScalesInverselyWithSize) {
  const ClosedPolygon p = random_equilateral_polygon(10, 3, 4);
  const std::vector<Vec3> g = energy_gradient(p), g2 = energy_gradient(p.scaled(2.0));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(norm(2.0 * g2[i] - g[i]), 1e-12 * max_norm(g));
}

TEST(EnergyGradient, TranslationInvariant) {
  const ClosedPolygon p = random_equilateral_polygon(9, 3, 8);
  const std::vector<Vec3> g = energy_gradient(p), gt = energy_gradient(p.translated({3.0, -1.0, 2.0}));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(norm(g[i] - gt[i]), 1e-10 * max_norm(g));
}

TEST(TangentGradient, VanishesOnRegularPolygons) {
  for (std::size_t n : {4u, 7u, 16u, 33u}) {
    const ClosedPolygon p = regular_ngon(n, 1.0, 3);
    const std::vector<Vec3> gt = tangent_gradient(p, energy_gradient(p));
    EXPECT_LE(max_norm(gt), 1e-8) << n;
  }
}

TEST(TangentGradient, IsOrthogonalToEdgeConstraints) {
  const ClosedPolygon p = random_equilateral_polygon(15, 3, 2);
  const std::vector<Vec3> gt = tangent_gradient(p, energy_gradient(p));
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 e = p.vertex((i + 1) % n) - p.vertex(i);
    EXPECT_NEAR(dot(e, gt[(i + 1) % n] - gt[i]) / norm(e), 0.0, 1e-10 * max_norm(gt));
  }
}

TEST(Projection, EquilateralPolygonIsAFixedPoint) {
  const ClosedPolygon p = random_equilateral_polygon(20, 3, 6);
  const ProjectionResult r = project_equilateral_closed(p.vertices(), 3);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LT(distance(r.polygon.vertex(i), p.vertex(i)), 1e-13);
}

TEST(Projection, NudgedSquareStaysClose) {
  const ClosedPolygon sq = regular_ngon(4, 4.0, 2);
  std::vector<Vec3> v = sq.vertices();
  v[0].x += 1e-3;
  const ProjectionResult r = project_equilateral_closed(v, 2, 1.0);
  EXPECT_LE(certify_equilateral(r.polygon).max_relative_deviation, 1e-12);
  EXPECT_NEAR(r.polygon.length(), 4.0, 1e-12);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(distance(r.polygon.vertex(i), sq.vertex(i)), 2e-3);
}

TEST(Projection, KeepsTheCentroid) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> v(11);
  Vec3 centroid{};
  for (Vec3& x : v) {
    x = {u(rng), u(rng), u(rng)};
    centroid = centroid + x / 11.0;
  }
  const ProjectionResult r = project_equilateral_closed(v, 3);
  Vec3 after{};
  for (const Vec3& x : r.polygon.vertices()) after = after + x / 11.0;
  EXPECT_LT(distance(after, centroid), 1e-12);
  EXPECT_LE(certify_equilateral(r.polygon).max_relative_deviation, 1e-11);
}

TEST(Projection, Preconditions) {
  EXPECT_THROW(project_equilateral_closed({{0, 0, 0}, {1, 0, 0}}, 3), Error);
  EXPECT_THROW(project_equilateral_closed({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}, 3), Error);
}

TEST(Descent, PerturbedSquareReturnsToTheSquare) {
  const ClosedPolygon start = perturbed(regular_ngon(4, 4.0, 2), 0.01, 1);
  const DescentTrace t = minimize_discrete_energy(start, OptimizerConfig{});
  EXPECT_LT(t.regular_gap, 1e-8);
  EXPECT_LT(procrustes_to_regular(t.final_polygon), 1e-4);
  EXPECT_NE(t.reason, Termination::kBarrier);
}

TEST(Descent, RegularPolygonStopsImmediately) {
  const ClosedPolygon g = regular_ngon(12, 1.0, 3);
  const DescentTrace t = minimize_discrete_energy(g, OptimizerConfig{});
  EXPECT_EQ(t.reason, Termination::kGradientTol);
  EXPECT_LE(t.rows.size(), 1u);
  EXPECT_NEAR(t.final_energy, regular_ngon_energy(12), 1e-12);
}

TEST(Descent, NeverGoesBelowTheRegularPolygon) {
  OptimizerConfig cfg;
  cfg.max_iterations = 400;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const DescentTrace t = minimize_discrete_energy(random_equilateral_polygon(16, 3, seed), cfg);
    EXPECT_GE(t.final_energy, regular_ngon_energy(16) - 1e-9) << seed;
  }
}

TEST(Descent, TraceIsMonotoneAndIteratesAreFeasible) {
  OptimizerConfig cfg;
  cfg.max_iterations = 300;
  const ClosedPolygon start = random_equilateral_polygon(14, 3, 21);
  const DescentTrace t = minimize_discrete_energy(start, cfg);
  ASSERT_FALSE(t.rows.empty());
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    EXPECT_LE(t.rows[k].energy, t.rows[k - 1].energy) << k;
    EXPECT_EQ(t.rows[k].iteration, t.rows[k - 1].iteration + 1);
  }
  for (const TraceRow& r : t.rows) EXPECT_LE(r.projection_residual, 1e-9);
  EXPECT_LE(certify_equilateral(t.final_polygon).max_relative_deviation, 1e-9);
  EXPECT_NEAR(t.final_polygon.length(), start.length(), 1e-9 * start.length());
  EXPECT_LE(t.final_energy, discrete_moebius_energy(start).value);
}

TEST(Descent, EquivariantUnderRigidMotions) {
  OptimizerConfig cfg;
  cfg.max_iterations = 200;
  const ClosedPolygon p = random_equilateral_polygon(10, 3, 12);
  const ClosedPolygon q = rigid_motion(p, unit(Vec3{1.0, 2.0, 2.0}), 0.7, {1.0, -2.0, 0.5});
  const DescentTrace a = minimize_discrete_energy(p, cfg), b = minimize_discrete_energy(q, cfg);
  EXPECT_NEAR(a.final_energy, b.final_energy, 1e-6);
  const ClosedPolygon moved =
      rigid_motion(a.final_polygon, unit(Vec3{1.0, 2.0, 2.0}), 0.7, {1.0, -2.0, 0.5});
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_LT(distance(moved.vertex(i), b.final_polygon.vertex(i)), 1e-6 * p.length());
  }
}

TEST(Descent, ConfigValidation) {
  const ClosedPolygon p = regular_ngon(6, 1.0, 3);
  OptimizerConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(minimize_discrete_energy(p, cfg), Error);
  cfg = OptimizerConfig{};
  cfg.armijo = 1.5;
  EXPECT_THROW(minimize_discrete_energy(p, cfg), Error);
  cfg = OptimizerConfig{};
  cfg.shrink = 1.0;
  EXPECT_THROW(minimize_discrete_energy(p, cfg), Error);
}

TEST(Termination, Names) {
  EXPECT_STREQ(to_string(Termination::kGradientTol), "gradient_tol");
  EXPECT_STREQ(to_string(Termination::kEnergyTol), "energy_tol");
  EXPECT_STREQ(to_string(Termination::kMaxIterations), "max_iterations");
  EXPECT_STREQ(to_string(Termination::kStalled), "stalled");
  EXPECT_STREQ(to_string(Termination::kBarrier), "barrier");
}

TEST(AlignRigid, RotatedCopy) {
  const ClosedPolygon p = random_equilateral_polygon(13, 3, 30);
  const ClosedPolygon q = rigid_motion(p, unit(Vec3{0.0, 1.0, 1.0}), 2.1, {4.0, 0.0, -1.0});
  const Alignment a = align_rigid(p, q);
  EXPECT_LT(a.residual, 1e-12);
  EXPECT_EQ(a.shift, 0u);
  EXPECT_FALSE(a.reversed);
}

TEST(AlignRigid, RelabelledCopy) {
  const ClosedPolygon p = random_equilateral_polygon(11, 3, 31);
  const ClosedPolygon q = rigid_motion(p.cyclic_shift(4), unit(Vec3{1.0, 0.0, 0.0}), 1.0, {});
  const Alignment a = align_rigid(p, q);
  EXPECT_LT(a.residual, 1e-12);
  const Alignment r = align_rigid(p.reversed(), p);
  EXPECT_LT(r.residual, 1e-12);
  EXPECT_TRUE(r.reversed);
}

TEST(AlignRigid, MirroredPolygonNeedsAReflectionFreeFit) {
  // A planar polygon and its mirror image differ by a proper rotation in 3D.
  const ClosedPolygon p = random_equilateral_polygon(9, 2, 5);
  std::vector<Vec3> m = p.vertices();
  for (Vec3& x : m) x.x = -x.x;
  EXPECT_LT(align_rigid(p, ClosedPolygon(m, 2)).residual, 1e-12);
}

TEST(AlignRigid, RegularPolygonMatchesTheCircle) {
  const ClosedPolygon g = regular_ngon(10, 2.0 * kPi, 2);
  const double r = 1.0 / (2.0 * std::sin(kPi / 10.0)) * (2.0 * kPi / 10.0);
  EXPECT_LT(align_rigid(g, CircleTarget{r}).residual, 1e-12);
  EXPECT_LT(procrustes_to_regular(g.scaled(3.0)), 1e-12);
}

TEST(AlignRigid, RejectsMismatchedInputs) {
  const ClosedPolygon p = regular_ngon(6, 1.0, 3);
  EXPECT_THROW(align_rigid(p, regular_ngon(7, 1.0, 3)), Error);
  EXPECT_THROW(align_rigid(p, regular_ngon(6, 1.0, 2)), Error);
}

}  // namespace
}  // namespace moebius
