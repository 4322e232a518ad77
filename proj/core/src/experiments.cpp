#include "moebius/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>

#include "moebius/energies.hpp"
#include "moebius/error.hpp"
#include "moebius/inscription.hpp"
#include "moebius/polygon.hpp"

namespace moebius {

const char* to_string(SubdivisionMode mode) {
  return mode == SubdivisionMode::kUniform ? "uniform" : "equilateral";
}

SubdivisionMode subdivision_mode_from_string(const std::string& name) {
  if (name == "uniform") return SubdivisionMode::kUniform;
  if (name == "equilateral") return SubdivisionMode::kEquilateral;
  fail_input("unknown subdivision mode '" + name + "'");
}

const char* to_string(PolygonFamily family) {
  return family == PolygonFamily::kInscribed ? "inscribed" : "perturbed";
}

PolygonFamily polygon_family_from_string(const std::string& name) {
  if (name == "inscribed") return PolygonFamily::kInscribed;
  if (name == "perturbed") return PolygonFamily::kPerturbed;
  fail_input("unknown polygon family '" + name + "'");
}

LogLogFit fit_loglog(const std::vector<std::size_t>& n, const std::vector<double>& gap) {
  if (n.size() != gap.size()) fail_input("fit_loglog: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (gap[k] > 0.0) {
      xs.push_back(std::log(static_cast<double>(n[k])));
      ys.push_back(std::log(gap[k]));
    }
  }
  LogLogFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) {
    fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double beta = sxy / sxx;
  fit.slope = -beta;
  fit.intercept = my - beta * mx;
  return fit;
}

namespace {

void check_n_list(const std::vector<std::size_t>& n_list, std::size_t min_count) {
  if (n_list.size() < min_count) {
    fail_input("n_list needs at least " + std::to_string(min_count) + " entries");
  }
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 3) fail_input("n_list entries must be >= 3");
    if (k > 0 && n_list[k] <= n_list[k - 1]) fail_input("n_list must be strictly increasing");
  }
}

double reference_energy(const ArcLengthCurve& curve, const StudyOptions& opts) {
  if (!std::isnan(opts.reference)) return opts.reference;
  const EnergyReport r = smooth_moebius_energy(curve, opts.quadrature_tol);
  if (r.has_flag("unconverged")) {
    fail_convergence("reference quadrature did not reach tol " + std::to_string(opts.quadrature_tol));
  }
  return r.value;
}

std::size_t distance_grid(std::size_t n) { return std::max<std::size_t>(16 * n, 4096); }

}  // namespace

ConvergenceReport convergence_study(const ArcLengthCurve& curve, const std::vector<std::size_t>& n_list,
                                    SubdivisionMode mode, const StudyOptions& opts) {
  check_n_list(n_list, 5);
  ConvergenceReport report;
  report.curve = curve.source().descriptor();
  report.mode = mode;
  report.reference = reference_energy(curve, opts);

  std::vector<double> gaps;
  for (std::size_t n : n_list) {
    const ClosedPolygon p = mode == SubdivisionMode::kUniform
                                ? inscribe_uniform(curve, n).polygon
                                : inscribe_equilateral(curve, n, opts.inscription_tol).polygon;
    const double e = discrete_moebius_energy(p).value;
    report.rows.push_back({n, e, std::abs(report.reference - e)});
    gaps.push_back(report.rows.back().gap);
  }
  const LogLogFit fit = fit_loglog(n_list, gaps);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.rate_ok = fit.slope >= kRateThreshold;
  return report;
}

GammaRecoveryReport gamma_recovery_study(const ArcLengthCurve& curve,
                                         const std::vector<std::size_t>& n_list,
                                         const StudyOptions& opts) {
  check_n_list(n_list, 2);
  GammaRecoveryReport report;
  report.curve = curve.source().descriptor();
  report.reference = reference_energy(curve, opts);
  const CurveSampler target = curve.sampler(1.0);

  for (std::size_t n : n_list) {
    const ClosedPolygon p = recovery_sequence(curve, n, opts.inscription_tol);
    const double e = discrete_moebius_energy(p).value;
    const double d =
        curve_distance(p.sampler(1.0), target, CurveNorm::w1q(CurveNorm::infinity()), distance_grid(n))
            .value;
    report.rows.push_back({n, e, std::abs(report.reference - e), d});
  }
  report.shrink_ok = true;
  if (n_list.back() >= 32 * n_list.front()) {
    const auto& first = report.rows.front();
    const auto& last = report.rows.back();
    report.shrink_ok = last.gap * 10.0 <= first.gap && last.w1inf * 10.0 <= first.w1inf;
  }
  return report;
}

LiminfProxy liminf_proxy(const std::vector<double>& values) {
  if (values.size() < 3) fail_input("liminf proxy needs at least 3 values");
  const std::size_t m = values.size();
  const std::size_t half = std::max<std::size_t>(3, (m + 1) / 2);

  auto monotone_suffix = [&](auto cmp) {
    std::size_t len = 1;
    while (len < m && cmp(values[m - len - 1], values[m - len])) ++len;
    return len;
  };
  const std::size_t run = std::max(monotone_suffix(std::less<double>{}),
                                   monotone_suffix(std::greater<double>{}));
  if (run >= half) {
    std::vector<double> t(values.end() - static_cast<std::ptrdiff_t>(run), values.end());
    while (t.size() >= 3) {
      std::vector<double> next;
      for (std::size_t i = 0; i + 2 < t.size(); ++i) {
        const double d1 = t[i + 1] - t[i];
        const double d2 = t[i + 2] - t[i + 1];
        const double den = d2 - d1;
        if (den == 0.0 || !std::isfinite(den)) break;
        next.push_back(t[i + 2] - d2 * d2 / den);
      }
      if (next.size() + 2 != t.size()) break;
      t = std::move(next);
    }
    return {t.back(), true};
  }
  return {*std::min_element(values.end() - static_cast<std::ptrdiff_t>(half), values.end()), false};
}

LiminfReport liminf_spotcheck(const ArcLengthCurve& curve, PolygonFamily family,
                              const std::vector<std::size_t>& n_list, std::uint64_t seed,
                              const StudyOptions& opts) {
  check_n_list(n_list, 3);
  LiminfReport report;
  report.curve = curve.source().descriptor();
  report.family = family;
  report.seed = seed;
  report.reference = reference_energy(curve, opts);
  const double L = curve.length();
  const CurveSampler target = curve.sampler(1.0);

  std::vector<double> energies;
  for (std::size_t n : n_list) {
    ClosedPolygon p = inscribe_uniform(curve, n).polygon;
    if (family == PolygonFamily::kPerturbed) {
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * n));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double delta = L / (static_cast<double>(n) * static_cast<double>(n));
      std::vector<Vec3> v = p.vertices();
      for (Vec3& x : v) {
        Vec3 r;
        do {
          r = {u(rng), u(rng), curve.dim() == 3 ? u(rng) : 0.0};
        } while (norm2(r) > 1.0);
        x += delta * r;
      }
      p = ClosedPolygon(std::move(v), curve.dim());
    }
    const double e = discrete_moebius_energy(p).value;
    const double l1 =
        curve_distance(p.sampler(1.0), target, CurveNorm::lq(1.0), distance_grid(n)).value;
    report.rows.push_back({n, e, std::max(0.0, report.reference - e), l1});
    energies.push_back(e);
  }
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (!(report.rows[k].l1 < report.rows[k - 1].l1)) report.valid = false;
  }
  report.proxy = liminf_proxy(energies);
  const double tol = 1e-6 * std::max(1.0, std::abs(report.reference));
  // Slack -> 0: the worst deficit over the last third falls 10x below the first.
  const std::size_t tail = (energies.size() + 2) / 3;
  const double tail_min = *std::min_element(energies.end() - static_cast<std::ptrdiff_t>(tail), energies.end());
  const double tail_deficit = std::max(0.0, report.reference - tail_min);
  report.pass = report.reference <= report.proxy.value + tol ||
                tail_deficit <= 0.1 * report.rows.front().deficit;
  report.pass = report.pass && report.valid;
  return report;
}

MinimizerReport minimizer_study(const std::vector<std::size_t>& n_list,
                                const std::vector<std::uint64_t>& seeds, int dim,
                                const OptimizerConfig& cfg) {
  check_n_list(n_list, 1);
  if (n_list.front() < 4 || n_list.back() > 64) fail_input("minimizer study needs n in [4, 64]");
  if (seeds.size() < 10) fail_input("minimizer study needs at least 10 seeds");
  if (dim != 2 && dim != 3) fail_input("dimension must be 2 or 3");

  MinimizerReport report;
  report.dim = dim;
  report.seeds = seeds;
  const ArcLengthCurve circle =
      arclength_reparametrize(ParametricCurve::circle(0.5 / std::numbers::pi));
  const CurveSampler circle_sampler = circle.sampler(1.0);

  for (std::size_t n : n_list) {
    MinimizerRow row;
    row.n = n;
    std::optional<DescentTrace> best;
    for (std::uint64_t seed : seeds) {
      OptimizerConfig run_cfg = cfg;
      run_cfg.seed = seed;
      DescentTrace t = minimize_discrete_energy(random_equilateral_polygon(n, dim, seed), run_cfg);
      const bool usable = t.reason != Termination::kStalled && t.reason != Termination::kBarrier;
      if (usable) ++row.usable_runs;
      if (std::isfinite(t.final_energy) && (!best || t.final_energy < best->final_energy)) {
        best = std::move(t);
        row.best_seed = seed;
      }
    }
    row.flagged = row.usable_runs == 0;
    if (!best) {
      row.best_energy = row.gap = row.alignment_residual = row.circle_w1inf =
          std::numeric_limits<double>::infinity();
      report.rows.push_back(row);
      continue;
    }
    const ClosedPolygon& p = best->final_polygon;
    row.best_energy = best->final_energy;
    row.gap = best->regular_gap;
    row.alignment_residual = procrustes_to_regular(p);
    const ClosedPolygon unit = p.scaled(1.0 / p.length());
    const Alignment a = align_rigid(unit, CircleTarget{0.5 / std::numbers::pi});
    row.circle_w1inf = curve_distance(a.aligned.sampler(1.0), circle_sampler,
                                      CurveNorm::w1q(CurveNorm::infinity()), distance_grid(n))
                           .value;
    report.rows.push_back(row);
  }
  report.circle_decreasing = true;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (!(report.rows[k].circle_w1inf < report.rows[k - 1].circle_w1inf)) {
      report.circle_decreasing = false;
    }
  }
  return report;
}

AlmostMinimizerVerdict almost_minimizer_check(const std::vector<double>& f_n,
                                              const std::vector<double>& inf_n, double f_limit,
                                              double inf_y, double tol) {
  if (f_n.size() != inf_n.size()) fail_input("almost minimizer check: sequence lengths differ");
  if (f_n.size() < 3) fail_input("almost minimizer check needs at least 3 terms");
  for (std::size_t k = 0; k < f_n.size(); ++k) {
    if (!std::isfinite(f_n[k]) || !std::isfinite(inf_n[k])) {
      fail_input("almost minimizer check: non-finite entry at " + std::to_string(k));
    }
    if (inf_n[k] > f_n[k] + tol) {
      fail_input("almost minimizer check: inf_n exceeds F_n at " + std::to_string(k));
    }
  }
  if (!std::isfinite(f_limit) || !std::isfinite(inf_y)) {
    fail_input("almost minimizer check: non-finite limit value");
  }
  AlmostMinimizerVerdict v;
  v.lower = liminf_proxy(f_n).value;
  v.upper = liminf_proxy(inf_n).value;
  if (f_limit > v.lower + tol) {
    v.reason = "limit value exceeds liminf of F_n";
  } else if (v.upper > inf_y + tol) {
    v.reason = "liminf of inf F_n exceeds inf F";
  } else {
    v.pass = true;
    v.reason = "ok";
  }
  return v;
}

}  // namespace moebius
