#pragma once

#include <cstddef>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/polygon.hpp"

namespace moebius {

// Parameters b_0 < ... < b_{n-1} in [0, L) on the source curve and the
// chords |gamma(b_{k+1}) - gamma(b_k)|, with b_n = b_0 + L.
struct SubdivisionSpec {
  double curve_length = 0.0;
  std::vector<double> b;
  std::vector<double> chords;
};

// Chord bounds normalised to L = 1: c_hat = n min chord / L,
// cbar_hat = n max chord / L.
struct ChordBoundReport {
  double c_hat = 0.0;
  double cbar_hat = 0.0;
  double ratio() const { return cbar_hat / c_hat; }
};

ChordBoundReport chord_bounds(const SubdivisionSpec& spec);

struct InscribedPolygon {
  ClosedPolygon polygon;
  SubdivisionSpec subdivision;
};

// Vertices gamma((k-1) L / n).
InscribedPolygon inscribe_uniform(const ArcLengthCurve& curve, std::size_t n);

struct EquilateralInscription {
  ClosedPolygon polygon;
  SubdivisionSpec subdivision;
  double chord = 0.0;           // common edge length c*
  double closure_defect = 0.0;  // b_{n+1}(c*) - L
  int outer_iterations = 0;
};

// Equilateral polygon inscribed in `curve` with b_0 = 0, found by shooting
// in the chord length c. For fixed c each vertex b_{k+1} is the first
// parameter after b_k at chord distance c; the search window is bounded by
// the bi-Lipschitz estimate C_b times c. The outer bracketed (Illinois)
// iteration on c runs over [L / (2 n C_b), 2 L / n] until the closure
// defect or the bracket falls below tol * c.
//
// Throws kInvalidInput with "n too small for equilateral inscription" when a
// chord equation has no root in its window, or when the initial bracket
// does not change sign.
EquilateralInscription inscribe_equilateral(const ArcLengthCurve& curve, std::size_t n,
                                            double tol = 1e-10);

// Equilateral inscription rescaled about the origin to total length
// `target_length` (the curve length when omitted).
ClosedPolygon recovery_sequence(const ArcLengthCurve& curve, std::size_t n, double tol = 1e-10);
ClosedPolygon recovery_sequence(const ArcLengthCurve& curve, std::size_t n, double tol,
                                double target_length);

}  // namespace moebius
