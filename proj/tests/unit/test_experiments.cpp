#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "moebius/energies.hpp"
#include "moebius/error.hpp"
#include "moebius/experiments.hpp"
#include "support.hpp"

namespace moebius {
namespace {

using testing::trefoil;
using testing::unit_circle;

std::vector<std::size_t> doublings(std::size_t from, std::size_t to) {
  std::vector<std::size_t> n;
  for (std::size_t k = from; k <= to; k *= 2) n.push_back(k);
  return n;
}

StudyOptions with_reference(double reference) {
  StudyOptions o;
  o.reference = reference;
  return o;
}

TEST(FitLogLog, RecoversAPowerLaw) {
  const std::vector<std::size_t> n{8, 16, 32, 64};
  std::vector<double> gap;
  for (std::size_t k : n) gap.push_back(3.0 * std::pow(static_cast<double>(k), -1.5));
  const LogLogFit f = fit_loglog(n, gap);
  EXPECT_NEAR(f.slope, 1.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_EQ(f.points, 4u);
}

TEST(FitLogLog, SkipsZeroGaps) {
  const LogLogFit f = fit_loglog({4, 8, 16}, {0.0, 0.5, 0.25});
  EXPECT_EQ(f.points, 2u);
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  EXPECT_TRUE(std::isnan(fit_loglog({4, 8}, {0.0, 1.0}).slope));
}

TEST(ConvergenceStudy, CircleMatchesTheRegularPolygons) {
  const ConvergenceReport r =
      convergence_study(unit_circle(), doublings(4, 1024), SubdivisionMode::kUniform, with_reference(4.0));
  ASSERT_EQ(r.rows.size(), 9u);
  EXPECT_NEAR(r.rows.front().gap, 3.0, 1e-9);
  for (const ConvergenceRow& row : r.rows) EXPECT_NEAR(row.gap, 4.0 - regular_ngon_energy(row.n), 1e-9);
  EXPECT_GE(r.slope, 0.85);
  EXPECT_LE(r.slope, 1.15);
  EXPECT_TRUE(r.rate_ok);
}

TEST(ConvergenceStudy, CircleReferenceFromQuadrature) {
  const ConvergenceReport r = convergence_study(unit_circle(), doublings(8, 128), SubdivisionMode::kEquilateral);
  EXPECT_NEAR(r.reference, 4.0, 1e-8);
  for (const ConvergenceRow& row : r.rows) EXPECT_NEAR(row.energy, regular_ngon_energy(row.n), 1e-8);
}

TEST(ConvergenceStudy, TorusKnotRate) {
  const ConvergenceReport r =
      convergence_study(trefoil(), doublings(32, 1024), SubdivisionMode::kEquilateral);
  EXPECT_GE(r.slope, kRateThreshold);
  EXPECT_TRUE(r.rate_ok);
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_LT(r.rows[k].gap, r.rows[k - 1].gap);
}

TEST(ConvergenceStudy, Deterministic) {
  const auto a = convergence_study(trefoil(), doublings(16, 256), SubdivisionMode::kEquilateral);
  const auto b = convergence_study(trefoil(), doublings(16, 256), SubdivisionMode::kEquilateral);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].energy, b.rows[k].energy);
  EXPECT_EQ(a.slope, b.slope);
}

TEST(ConvergenceStudy, Preconditions) {
  EXPECT_THROW(convergence_study(unit_circle(), {8, 16, 32, 64}, SubdivisionMode::kUniform), Error);
  EXPECT_THROW(convergence_study(unit_circle(), {8, 16, 16, 32, 64}, SubdivisionMode::kUniform), Error);
  EXPECT_THROW(convergence_study(unit_circle(), {2, 4, 8, 16, 32}, SubdivisionMode::kUniform), Error);
}

TEST(GammaRecovery, CircleGapsAndDistancesShrink) {
  const GammaRecoveryReport r = gamma_recovery_study(unit_circle(), doublings(8, 512), with_reference(4.0));
  ASSERT_EQ(r.rows.size(), 7u);
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    EXPECT_LT(r.rows[k].gap, r.rows[k - 1].gap);
    EXPECT_LT(r.rows[k].w1inf, r.rows[k - 1].w1inf);
  }
  EXPECT_TRUE(r.shrink_ok);
  EXPECT_NEAR(r.rows.front().energy, regular_ngon_energy(8), 1e-9);
}

TEST(GammaRecovery, TorusKnot) {
  const GammaRecoveryReport r = gamma_recovery_study(trefoil(), doublings(16, 512));
  EXPECT_TRUE(r.shrink_ok);
  EXPECT_LT(r.rows.back().gap, 0.1 * r.rows.front().gap);
}

TEST(GammaRecovery, TorusKnotW1InfDistanceBelowThreshold) {
  const GammaRecoveryReport r = gamma_recovery_study(trefoil(), doublings(64, 2048));
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_LT(r.rows[k].w1inf, r.rows[k - 1].w1inf);
  EXPECT_LT(r.rows.back().w1inf, 0.05);
}

TEST(LiminfProxy, ExtrapolatesAMonotoneTail) {
  std::vector<double> v;
  for (int n = 8; n <= 1024; n *= 2) v.push_back(4.0 - 3.0 / n + 1.0 / (n * n));
  const LiminfProxy p = liminf_proxy(v);
  EXPECT_TRUE(p.extrapolated);
  EXPECT_NEAR(p.value, 4.0, 1e-6);
}

TEST(LiminfProxy, OscillatingSequenceUsesTheTailMinimum) {
  const LiminfProxy p = liminf_proxy({1.0, 3.0, 2.0, 5.0, 2.5, 4.0});
  EXPECT_FALSE(p.extrapolated);
  EXPECT_EQ(p.value, 2.5);
}

TEST(LiminfProxy, RegularPolygonEnergies) {
  std::vector<double> v;
  for (std::size_t n = 8; n <= 1024; n *= 2) v.push_back(regular_ngon_energy(n));
  const LiminfProxy p = liminf_proxy(v);
  EXPECT_TRUE(p.extrapolated);
  EXPECT_NEAR(p.value, 4.0, 1e-6);
}

TEST(LiminfSpotcheck, InscribedCircle) {
  const LiminfReport r =
      liminf_spotcheck(unit_circle(), PolygonFamily::kInscribed, doublings(8, 1024), 0, with_reference(4.0));
  EXPECT_TRUE(r.valid);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.proxy.value, 4.0 - 1e-6);
}

TEST(LiminfSpotcheck, PerturbedCircle) {
  const LiminfReport r =
      liminf_spotcheck(unit_circle(), PolygonFamily::kPerturbed, doublings(8, 2048), 7, with_reference(4.0));
  EXPECT_TRUE(r.valid);
  EXPECT_TRUE(r.pass);
  for (const LiminfRow& row : r.rows) {
    if (row.n >= 512) EXPECT_GE(row.energy, 3.9) << row.n;
  }
}

TEST(LiminfSpotcheck, Ellipse) {
  const LiminfReport r =
      liminf_spotcheck(testing::ellipse(1.0, 0.6), PolygonFamily::kInscribed, doublings(16, 1024));
  EXPECT_TRUE(r.valid);
  EXPECT_TRUE(r.pass);
  for (const LiminfRow& row : r.rows) EXPECT_GE(row.deficit, 0.0);
}

TEST(LiminfSpotcheck, SeedIsReproducible) {
  const auto a = liminf_spotcheck(unit_circle(), PolygonFamily::kPerturbed, doublings(8, 128), 3, with_reference(4.0));
  const auto b = liminf_spotcheck(unit_circle(), PolygonFamily::kPerturbed, doublings(8, 128), 3, with_reference(4.0));
  const auto c = liminf_spotcheck(unit_circle(), PolygonFamily::kPerturbed, doublings(8, 128), 4, with_reference(4.0));
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].energy, b.rows[k].energy);
    EXPECT_NE(a.rows[k].energy, c.rows[k].energy);
  }
}

std::vector<std::uint64_t> seeds(std::size_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

TEST(MinimizerStudy, SmallPolygonsReachTheRegularEnergy) {
  const MinimizerReport r = minimizer_study({4, 6}, seeds(10), 3);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NEAR(r.rows[0].best_energy, 1.0, 1e-8);
  EXPECT_NEAR(r.rows[1].best_energy, 11.0 / 6.0, 1e-8);
  for (const MinimizerRow& row : r.rows) {
    EXPECT_FALSE(row.flagged);
    EXPECT_GE(row.usable_runs, 1u);
    EXPECT_LT(row.alignment_residual, 1e-3);
  }
}

TEST(MinimizerStudy, MinimizersApproachTheCircle) {
  const MinimizerReport r = minimizer_study({8, 16, 32}, seeds(10), 3);
  EXPECT_TRUE(r.circle_decreasing);
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_LT(r.rows[k].circle_w1inf, r.rows[k - 1].circle_w1inf);
  for (const MinimizerRow& row : r.rows) EXPECT_LT(row.gap, 1e-6) << row.n;
}

TEST(MinimizerStudy, Preconditions) {
  EXPECT_THROW(minimizer_study({8}, seeds(9), 3), Error);
  EXPECT_THROW(minimizer_study({3}, seeds(10), 3), Error);
  EXPECT_THROW(minimizer_study({65}, seeds(10), 3), Error);
}

TEST(AlmostMinimizer, ConvergentSequencesPass) {
  std::vector<double> f, inf;
  for (int n = 8; n <= 1024; n *= 2) {
    f.push_back(4.0 + 1.0 / n);
    inf.push_back(4.0 - 2.0 / n);
  }
  const AlmostMinimizerVerdict v = almost_minimizer_check(f, inf, 4.0, 4.0);
  EXPECT_TRUE(v.pass) << v.reason;
  EXPECT_NEAR(v.lower, 4.0, 1e-6);
  EXPECT_NEAR(v.upper, 4.0, 1e-6);
}

TEST(AlmostMinimizer, EnergyDropBelowTheLimitFails) {
  std::vector<double> f, inf;
  for (int n = 8; n <= 1024; n *= 2) {
    f.push_back(3.5 + 1.0 / n);
    inf.push_back(3.5);
  }
  const AlmostMinimizerVerdict v = almost_minimizer_check(f, inf, 4.0, 4.0);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.reason.empty());
}

TEST(AlmostMinimizer, InfimaAboveTheLimitInfimumFail) {
  std::vector<double> f, inf;
  for (int n = 8; n <= 1024; n *= 2) {
    f.push_back(5.0);
    inf.push_back(4.5 + 1.0 / n);
  }
  const AlmostMinimizerVerdict v = almost_minimizer_check(f, inf, 4.0, 4.0);
  EXPECT_FALSE(v.pass);
}

}  // namespace
}  // namespace moebius
