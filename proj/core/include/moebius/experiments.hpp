#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/optimize.hpp"

namespace moebius {

enum class SubdivisionMode { kUniform, kEquilateral };
const char* to_string(SubdivisionMode mode);
SubdivisionMode subdivision_mode_from_string(const std::string& name);

// Least-squares fit of log(gap) = intercept - slope * log(n). Rows with a
// zero gap are skipped; fewer than two usable rows give NaN.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};
LogLogFit fit_loglog(const std::vector<std::size_t>& n, const std::vector<double>& gap);

inline constexpr double kRateThreshold = 0.85;

struct ConvergenceRow {
  std::size_t n = 0;
  double energy = 0.0;
  double gap = 0.0;  // |E - E_n|
};

struct ConvergenceReport {
  CurveDescriptor curve;
  SubdivisionMode mode = SubdivisionMode::kUniform;
  double reference = 0.0;  // E of the curve
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  bool rate_ok = false;  // slope >= kRateThreshold
};

struct StudyOptions {
  // E of the curve; NaN means smooth_moebius_energy at `quadrature_tol`.
  double reference = std::numeric_limits<double>::quiet_NaN();
  double quadrature_tol = 1e-8;
  double inscription_tol = 1e-10;
};

// n_list must be strictly increasing with at least 5 entries, n >= 3.
ConvergenceReport convergence_study(const ArcLengthCurve& curve, const std::vector<std::size_t>& n_list,
                                    SubdivisionMode mode, const StudyOptions& opts = {});

struct GammaRecoveryRow {
  std::size_t n = 0;
  double energy = 0.0;
  double gap = 0.0;
  double w1inf = 0.0;  // recovery polygon vs curve, both at length 1
};

struct GammaRecoveryReport {
  CurveDescriptor curve;
  double reference = 0.0;
  std::vector<GammaRecoveryRow> rows;
  // Last row below first row by 10x in both columns; only checked when
  // n_max / n_min >= 32, otherwise true.
  bool shrink_ok = false;
};

GammaRecoveryReport gamma_recovery_study(const ArcLengthCurve& curve,
                                         const std::vector<std::size_t>& n_list,
                                         const StudyOptions& opts = {});

// Value standing in for liminf of a finite sequence. When the longest
// strictly monotone suffix covers at least half of the entries (and at
// least 3), it is extrapolated by repeated Aitken steps; otherwise the
// minimum over the last half is used.
struct LiminfProxy {
  double value = 0.0;
  bool extrapolated = false;
};
LiminfProxy liminf_proxy(const std::vector<double>& values);

enum class PolygonFamily { kInscribed, kPerturbed };
const char* to_string(PolygonFamily family);
PolygonFamily polygon_family_from_string(const std::string& name);

struct LiminfRow {
  std::size_t n = 0;
  double energy = 0.0;
  double deficit = 0.0;  // max(0, E - E_n)
  double l1 = 0.0;       // L^1 distance at length 1
};

struct LiminfReport {
  CurveDescriptor curve;
  PolygonFamily family = PolygonFamily::kInscribed;
  std::uint64_t seed = 0;
  double reference = 0.0;
  std::vector<LiminfRow> rows;
  LiminfProxy proxy;
  bool valid = true;  // L^1 distances decrease along n_list
  // reference <= proxy within 1e-6, or the deficit of the minimum over the
  // last third at most a tenth of the first row's deficit.
  bool pass = false;
};

// Inscribed family: uniform inscription. Perturbed family: the same
// vertices moved by L n^-2 times seeded points of the unit ball (disc for
// planar curves).
LiminfReport liminf_spotcheck(const ArcLengthCurve& curve, PolygonFamily family,
                              const std::vector<std::size_t>& n_list, std::uint64_t seed = 0,
                              const StudyOptions& opts = {});

struct MinimizerRow {
  std::size_t n = 0;
  double best_energy = 0.0;
  double gap = 0.0;               // best_energy - regular_ngon_energy(n)
  double alignment_residual = 0.0;  // RMS to g_n after rigid alignment
  double circle_w1inf = 0.0;      // length-1 minimizer vs length-1 circle
  std::size_t usable_runs = 0;
  std::uint64_t best_seed = 0;
  bool flagged = false;           // every run stalled or hit the barrier
};

struct MinimizerReport {
  int dim = 3;
  std::vector<std::uint64_t> seeds;
  std::vector<MinimizerRow> rows;
  bool circle_decreasing = false;
};

// n_list within [4, 64], at least 10 seeds.
MinimizerReport minimizer_study(const std::vector<std::size_t>& n_list,
                                const std::vector<std::uint64_t>& seeds, int dim,
                                const OptimizerConfig& cfg = {});

struct AlmostMinimizerVerdict {
  bool pass = false;
  double lower = 0.0;  // liminf proxy of F_n
  double upper = 0.0;  // liminf proxy of inf_n
  std::string reason;
};

// Checks F_limit <= liminf F_n and liminf inf_n <= inf_Y, both within tol.
AlmostMinimizerVerdict almost_minimizer_check(const std::vector<double>& f_n,
                                              const std::vector<double>& inf_n, double f_limit,
                                              double inf_y, double tol = 1e-6);

}  // namespace moebius
