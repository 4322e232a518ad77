#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moebius/polygon.hpp"
#include "moebius/vec.hpp"

namespace moebius {

// Euclidean gradient dE_n/dv_i of the forward-weighted discrete energy.
// Edge lengths, arc parameters and intrinsic distances are all treated as
// functions of the vertices. At arc ties (|fwd - bwd| <= 1e-10 L_p) the two
// one-sided derivatives are averaged. Throws kSingularity for chords
// < 1e-10 L_p.
std::vector<Vec3> energy_gradient(const ClosedPolygon& p);

// Component of g tangent to the equal-edge-length manifold at p: g minus
// its least-squares fit by the edge-length constraint normals.
std::vector<Vec3> tangent_gradient(const ClosedPolygon& p, const std::vector<Vec3>& g);

struct ProjectionResult {
  ClosedPolygon polygon;
  int sweeps = 0;
  double closure_residual = 0.0;
};

// Alternating projection in edge coordinates: every edge rescaled to
// `edge_length` (L/n of the input when <= 0), then the mean edge vector
// removed, until the closure residual drops below tol * edge_length / 2.
// The result keeps the centroid of the input. Throws kNonConvergence
// after 10^4 sweeps.
ProjectionResult project_equilateral_closed(const std::vector<Vec3>& vertices, int dim,
                                            double edge_length = 0.0, double tol = 1e-12);

struct OptimizerConfig {
  std::size_t max_iterations = 5000;
  double initial_step = -1.0;  // largest vertex move of the first trial; <= 0 means 0.05 L/n
  double armijo = 1e-4;
  double shrink = 0.5;
  double gradient_tol = 1e-9;  // on |G_T|_2 * L/n, G_T the tangent gradient
  double energy_tol = 1e-15;   // relative energy decrease of an accepted step
  double projection_tol = 1e-12;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Termination { kGradientTol, kEnergyTol, kMaxIterations, kStalled, kBarrier };
const char* to_string(Termination t);

struct TraceRow {
  std::size_t iteration = 0;
  double energy = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
  double projection_residual = 0.0;
};

struct DescentTrace {
  std::vector<TraceRow> rows;
  ClosedPolygon final_polygon;
  Termination reason = Termination::kMaxIterations;
  std::optional<std::pair<std::size_t, std::size_t>> barrier_pair;
  double final_energy = 0.0;
  double regular_gap = 0.0;  // final_energy - regular_ngon_energy(n)
};

// Projected gradient descent of E_n over equilateral closed polygons with
// the edge length of the (projected) start polygon. Each trial moves
// along -G_T, is projected back, and is accepted with the Armijo test
// along the projected displacement.
DescentTrace minimize_discrete_energy(const ClosedPolygon& p0, const OptimizerConfig& cfg);

struct CircleTarget {
  double radius = 1.0;
};

struct Alignment {
  ClosedPolygon aligned;  // relabelled and rigidly moved copy of p
  double residual = 0.0;  // RMS vertex distance
  std::size_t shift = 0;
  bool reversed = false;
};

// Least-squares rotation + translation of p onto q over all cyclic shifts
// and both orientations of p's labels. Equal residuals keep the smallest
// shift, forward orientation first.
Alignment align_rigid(const ClosedPolygon& p, const ClosedPolygon& q);
// Target points radius (cos 2 pi a_i / L_p, sin 2 pi a_i / L_p, 0).
Alignment align_rigid(const ClosedPolygon& p, const CircleTarget& circle);

// RMS residual of align_rigid against regular_ngon(n, L_p, dim).
double procrustes_to_regular(const ClosedPolygon& p);

}  // namespace moebius
