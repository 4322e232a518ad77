#include "moebius/optimize.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "moebius/energies.hpp"
#include "moebius/error.hpp"

namespace moebius {

std::vector<Vec3> energy_gradient(const ClosedPolygon& p) {
  const std::size_t n = p.size();
  const double L = p.length();
  const auto& v = p.vertices();
  const auto& a = p.arc_parameters();
  const auto& len = p.edge_lengths();

  const double tie = 1e-10 * L;

  std::vector<Vec3> grad(n);
  std::vector<double> d_len(n, 0.0);       // dE/dl_k through the weights
  std::vector<double> arc_acc(n + 1, 0.0);  // difference array for dE/dl_k through d

  auto add_range = [&](std::size_t from, std::size_t to, double w) {
    arc_acc[from] += w;
    arc_acc[to] -= w;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 r = v[j] - v[i];
      const double c2 = norm2(r);
      if (c2 < 1e-20 * L * L) {
        fail_singular("gradient: near double point at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
      }
      const double fwd = a[j] - a[i];
      const double bwd = L - fwd;
      const double d = std::min(fwd, bwd);
      const double wij = len[i] * len[j];
      const double kernel = 1.0 / c2 - 1.0 / (d * d);

      // Both ordered pairs: 2 (1/c^2) l_i l_j.
      const Vec3 g = (-4.0 * wij / (c2 * c2)) * r;
      grad[j] += g;
      grad[i] -= g;

      d_len[i] += 2.0 * kernel * len[j];
      d_len[j] += 2.0 * kernel * len[i];

      // d/dd of -2 l_i l_j / d^2, spread over the edges of the shorter arc.
      const double w = 4.0 * wij / (d * d * d);
      if (fwd < bwd - tie) {
        add_range(i, j, w);
      } else if (bwd < fwd - tie) {
        add_range(j, n, w);
        add_range(0, i, w);
      } else {
        add_range(0, n, 0.5 * w);  // w/2 on each arc covers every edge once
      }
    }
  }

  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running += arc_acc[k];
    const double dl = d_len[k] + running;
    const Vec3 e = (v[(k + 1) % n] - v[k]) / len[k];
    grad[(k + 1) % n] += dl * e;
    grad[k] -= dl * e;
  }
  return grad;
}

std::vector<Vec3> tangent_gradient(const ClosedPolygon& p, const std::vector<Vec3>& g) {
  const std::size_t n = p.size();
  if (g.size() != n) fail_input("tangent_gradient: size mismatch");
  std::vector<Vec3> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (p.vertex(i + 1) - p.vertex(i)) / p.edge_length(i);

  // Constraint i is |v_{i+1} - v_i|; its gradient is -u_i at v_i, +u_i at v_{i+1}.
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto next = static_cast<Eigen::Index>((i + 1) % n);
    const double off = -dot(u[i], u[(i + 1) % n]);
    entries.emplace_back(ii, ii, 2.0);
    entries.emplace_back(ii, next, off);
    entries.emplace_back(next, ii, off);
    rhs[ii] = dot(u[i], g[(i + 1) % n] - g[i]);
  }
  Eigen::SparseMatrix<double> jjt(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  jjt.setFromTriplets(entries.begin(), entries.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(jjt);
  if (solver.info() != Eigen::Success) fail_singular("tangent_gradient: degenerate edge directions");
  const Eigen::VectorXd lambda = solver.solve(rhs);

  std::vector<Vec3> out = g;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = lambda[static_cast<Eigen::Index>(i)];
    out[i] += l * u[i];
    out[(i + 1) % n] -= l * u[i];
  }
  return out;
}

ProjectionResult project_equilateral_closed(const std::vector<Vec3>& vertices, int dim,
                                            double edge_length, double tol) {
  const std::size_t n = vertices.size();
  if (n < 3) fail_input("projection needs at least 3 vertices");
  std::vector<Vec3> e(n);
  Vec3 centroid;
  double perimeter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = vertices[(i + 1) % n] - vertices[i];
    perimeter += norm(e[i]);
    centroid += vertices[i];
  }
  centroid /= static_cast<double>(n);
  const double target = edge_length > 0.0 ? edge_length : perimeter / static_cast<double>(n);
  if (!(target > 0.0)) fail_input("projection of a degenerate polygon");

  constexpr int kMaxSweeps = 10000;
  std::vector<double> history;
  double residual = 0.0;
  int sweep = 0;
  for (;; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const double l = norm(e[i]);
      if (l == 0.0) fail_convergence("projection collapsed edge " + std::to_string(i));
      e[i] *= target / l;
    }
    Vec3 sum;
    for (const Vec3& x : e) sum += x;
    residual = norm(sum);
    if (residual < 0.5 * tol * target) break;
    if (sweep + 1 >= kMaxSweeps) {
      std::ostringstream msg;
      msg << "equilateral projection did not converge in " << kMaxSweeps
          << " sweeps; last residuals:";
      for (std::size_t k = history.size() > 5 ? history.size() - 5 : 0; k < history.size(); ++k) {
        msg << ' ' << history[k];
      }
      msg << ' ' << residual;
      fail_convergence(msg.str());
    }
    history.push_back(residual);
    const Vec3 mean = sum / static_cast<double>(n);
    for (Vec3& x : e) x -= mean;
  }

  std::vector<Vec3> out(n);
  Vec3 c;
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = out[i - 1] + e[i - 1];
    c += out[i];
  }
  c /= static_cast<double>(n);
  for (Vec3& x : out) x += centroid - c;
  return {ClosedPolygon(std::move(out), dim), sweep + 1, residual};
}

void OptimizerConfig::validate() const {
  if (max_iterations == 0) fail_input("optimizer: max_iterations must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) fail_input("optimizer: Armijo factor must lie in (0,1)");
  if (!(shrink > 0.0 && shrink < 1.0)) fail_input("optimizer: shrink factor must lie in (0,1)");
  if (!(gradient_tol > 0.0) || !(energy_tol > 0.0) || !(projection_tol > 0.0)) {
    fail_input("optimizer: tolerances must be positive");
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kGradientTol: return "gradient_tol";
    case Termination::kEnergyTol: return "energy_tol";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kStalled: return "stalled";
    case Termination::kBarrier: return "barrier";
  }
  return "unknown";
}

namespace {

// Parses "(i,j)" out of a singularity message.
std::optional<std::pair<std::size_t, std::size_t>> offending_pair(const std::string& what) {
  const auto open = what.find('('), comma = what.find(',', open), close = what.find(')', comma);
  if (open == std::string::npos || comma == std::string::npos || close == std::string::npos) {
    return std::nullopt;
  }
  try {
    return std::make_pair(std::stoul(what.substr(open + 1, comma - open - 1)),
                          std::stoul(what.substr(comma + 1, close - comma - 1)));
  } catch (...) {
    return std::nullopt;
  }
}

double gradient_measure(const std::vector<Vec3>& g, double edge) {
  double s = 0.0;
  for (const Vec3& x : g) s += norm2(x);
  return std::sqrt(s) * edge;
}

}  // namespace

DescentTrace minimize_discrete_energy(const ClosedPolygon& p0, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t n = p0.size();
  const double edge = p0.length() / static_cast<double>(n);

  DescentTrace trace;
  ProjectionResult start = project_equilateral_closed(p0.vertices(), p0.dim(), edge,
                                                      cfg.projection_tol);
  ClosedPolygon x = std::move(start.polygon);
  const double L = x.length();
  double step = cfg.initial_step > 0.0 ? cfg.initial_step : 0.05 * edge;
  const double min_step = 1e-16 * L;

  auto finish = [&](Termination why) {
    trace.reason = why;
    trace.final_polygon = x;
    trace.final_energy = trace.rows.back().energy;
    trace.regular_gap = trace.final_energy - regular_ngon_energy(n);
    return trace;
  };

  double energy;
  try {
    energy = discrete_moebius_energy(x).value;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kSingularity) throw;
    trace.barrier_pair = offending_pair(err.what());
    trace.rows.push_back({0, std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0});
    trace.reason = Termination::kBarrier;
    trace.final_polygon = x;
    trace.final_energy = std::numeric_limits<double>::infinity();
    trace.regular_gap = std::numeric_limits<double>::infinity();
    return trace;
  }
  trace.rows.push_back({0, energy, 0.0, 0.0, start.closure_residual});

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    std::vector<Vec3> grad;
    try {
      grad = energy_gradient(x);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kSingularity) throw;
      trace.barrier_pair = offending_pair(err.what());
      return finish(Termination::kBarrier);
    }
    const std::vector<Vec3> tangent = tangent_gradient(x, grad);
    const double gnorm = gradient_measure(tangent, edge);
    trace.rows.back().gradient_norm = gnorm;
    if (gnorm < cfg.gradient_tol) return finish(Termination::kGradientTol);

    double gmax = 0.0;
    for (const Vec3& g : tangent) gmax = std::max(gmax, norm(g));

    bool accepted = false;
    while (!accepted) {
      if (step < min_step) return finish(Termination::kStalled);
      std::vector<Vec3> trial = x.vertices();
      for (std::size_t i = 0; i < n; ++i) trial[i] -= (step / gmax) * tangent[i];

      ProjectionResult proj;
      double trial_energy;
      try {
        proj = project_equilateral_closed(trial, x.dim(), edge, cfg.projection_tol);
        trial_energy = discrete_moebius_energy(proj.polygon).value;
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::kInvalidInput) throw;
        step *= cfg.shrink;
        continue;
      }
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        predicted += dot(grad[i], proj.polygon.vertex(i) - x.vertex(i));
      }
      if (predicted < 0.0 && trial_energy <= energy + cfg.armijo * predicted) {
        const double decrease = energy - trial_energy;
        x = std::move(proj.polygon);
        energy = trial_energy;
        trace.rows.push_back({iter, energy, 0.0, step, proj.closure_residual});
        accepted = true;
        step = std::min(step / cfg.shrink, 0.25 * edge);
        if (decrease < cfg.energy_tol * std::max(1.0, std::abs(energy))) {
          return finish(Termination::kEnergyTol);
        }
      } else {
        // Changes below the resolution of E_n cannot be judged by Armijo.
        const double floor = std::max(cfg.energy_tol, 64.0 * std::numeric_limits<double>::epsilon());
        if (std::abs(trial_energy - energy) <= floor * std::max(1.0, std::abs(energy))) {
          return finish(Termination::kEnergyTol);
        }
        step *= cfg.shrink;
      }
    }
  }
  return finish(Termination::kMaxIterations);
}

namespace {

struct Fit {
  double residual;
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }

// Kabsch fit of source onto target (same length, paired by index).
Fit kabsch(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
  const std::size_t n = source.size();
  Eigen::Vector3d cs = Eigen::Vector3d::Zero(), ct = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cs += to_eigen(source[i]);
    ct += to_eigen(target[i]);
  }
  cs /= static_cast<double>(n);
  ct /= static_cast<double>(n);
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    h += (to_eigen(source[i]) - cs) * (to_eigen(target[i]) - ct).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  fix(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d rot = svd.matrixV() * fix * svd.matrixU().transpose();
  const Eigen::Vector3d trans = ct - rot * cs;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss += (rot * to_eigen(source[i]) + trans - to_eigen(target[i])).squaredNorm();
  }
  return {std::sqrt(ss / static_cast<double>(n)), rot, trans};
}

Alignment best_alignment(const ClosedPolygon& p, const std::vector<Vec3>& target,
                         std::size_t shifts) {
  const std::size_t n = p.size();
  std::optional<Fit> best;
  std::size_t best_shift = 0;
  bool best_reversed = false;
  for (int orient = 0; orient < 2; ++orient) {
    const ClosedPolygon base = orient == 0 ? p : p.reversed();
    for (std::size_t k = 0; k < shifts; ++k) {
      std::vector<Vec3> src(n);
      for (std::size_t i = 0; i < n; ++i) src[i] = base.vertex(i + k);
      Fit f = kabsch(src, target);
      if (!best || f.residual < best->residual) {
        best = f;
        best_shift = k;
        best_reversed = orient == 1;
      }
    }
  }
  const ClosedPolygon base = best_reversed ? p.reversed() : p;
  std::vector<Vec3> moved(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d y = best->rotation * to_eigen(base.vertex(i + best_shift)) + best->translation;
    moved[i] = {y.x(), y.y(), p.dim() == 2 ? 0.0 : y.z()};
  }
  return {ClosedPolygon(std::move(moved), p.dim()), best->residual, best_shift, best_reversed};
}

}  // namespace

Alignment align_rigid(const ClosedPolygon& p, const ClosedPolygon& q) {
  if (p.size() != q.size()) fail_input("align_rigid: vertex counts differ");
  if (p.dim() != q.dim()) fail_input("align_rigid: dimension mismatch");
  return best_alignment(p, q.vertices(), p.size());
}

Alignment align_rigid(const ClosedPolygon& p, const CircleTarget& circle) {
  if (!(circle.radius > 0.0)) fail_input("align_rigid: circle radius must be positive");
  const std::size_t n = p.size();
  std::vector<Vec3> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = 2.0 * std::numbers::pi * p.arc_parameters()[i] / p.length();
    target[i] = {circle.radius * std::cos(ang), circle.radius * std::sin(ang), 0.0};
  }
  // Labels are tied to the parametrisation, so only the orientation varies.
  return best_alignment(p, target, 1);
}

double procrustes_to_regular(const ClosedPolygon& p) {
  return align_rigid(p, regular_ngon(p.size(), p.length(), p.dim())).residual;
}

}  // namespace moebius
