#include "moebius/inscription.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "moebius/error.hpp"

namespace moebius {

ChordBoundReport chord_bounds(const SubdivisionSpec& spec) {
  if (spec.chords.empty()) fail_input("empty subdivision");
  const auto [lo, hi] = std::minmax_element(spec.chords.begin(), spec.chords.end());
  const double n = static_cast<double>(spec.chords.size());
  return {n * *lo / spec.curve_length, n * *hi / spec.curve_length};
}

namespace {

SubdivisionSpec make_subdivision(const ArcLengthCurve& curve, std::vector<double> b,
                                 const std::vector<Vec3>& points) {
  const std::size_t n = b.size();
  SubdivisionSpec spec{curve.length(), std::move(b), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    spec.chords[k] = distance(points[k], points[(k + 1) % n]);
  }
  return spec;
}

// Result of marching n chords of length c from b = 0.
struct March {
  bool ok = false;
  std::size_t failed_step = 0;
  std::vector<double> b;  // b_0 .. b_n; b_n should land on L
  double defect = 0.0;    // b_n - L
};

class ChordMarcher {
 public:
  ChordMarcher(const ArcLengthCurve& curve, double step_bound)
      : curve_(curve), step_bound_(step_bound) {}

  March run(double c, std::size_t n) const {
    March m;
    m.b.reserve(n + 1);
    m.b.push_back(0.0);
    Vec3 anchor = curve_.point(0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double next;
      if (!next_root(m.b.back(), anchor, c, next)) {
        m.failed_step = k;
        return m;
      }
      m.b.push_back(next);
      anchor = curve_.point(next);
    }
    m.ok = true;
    m.defect = m.b.back() - curve_.length();
    return m;
  }

 private:
  // First b' > b with |gamma(b') - gamma(b)| = c, searched in
  // [b + c, b + min(C_b c, L / 2)] by forward scanning then safeguarded Newton.
  bool next_root(double b, const Vec3& anchor, double c, double& root) const {
    const double L = curve_.length();
    const double window = std::min(step_bound_ * c, 0.5 * L);
    auto excess = [&](double x) { return distance(curve_.point(x), anchor) - c; };

    double lo = b + c;
    if (excess(lo) >= 0.0) {
      root = lo;
      return true;
    }
    const double dx = c / 8.0;
    double hi = lo;
    const double limit = b + window * (1.0 + 1e-12);
    for (;;) {
      hi = std::min(lo + dx, limit);
      if (excess(hi) >= 0.0) break;
      if (hi >= limit) return false;
      lo = hi;
    }

    // Safeguarded Newton on |gamma(x) - anchor|^2 - c^2.
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, t] = curve_.point_and_tangent(x);
      const Vec3 r = p - anchor;
      const double g = norm2(r) - c * c;
      if (g < 0.0) lo = x; else hi = x;
      const double dg = 2.0 * dot(r, t);
      double nx = dg > 0.0 ? x - g / dg : 0.5 * (lo + hi);
      if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
      if (std::abs(nx - x) <= 4.0 * std::numeric_limits<double>::epsilon() * L ||
          hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * L) {
        x = nx;
        break;
      }
      x = nx;
    }
    root = x;
    return true;
  }

  const ArcLengthCurve& curve_;
  double step_bound_;
};

}  // namespace

InscribedPolygon inscribe_uniform(const ArcLengthCurve& curve, std::size_t n) {
  if (n < 3) fail_input("inscription needs n >= 3");
  const double L = curve.length();
  std::vector<double> b(n);
  std::vector<Vec3> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = static_cast<double>(k) * L / static_cast<double>(n);
    pts[k] = curve.point(b[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (distance(pts[k], pts[(k + 1) % n]) < 1e-12 * L) {
      fail_input("zero chord between subdivision points " + std::to_string(k) + " and " +
                 std::to_string((k + 1) % n));
    }
  }
  SubdivisionSpec spec = make_subdivision(curve, std::move(b), pts);
  return {ClosedPolygon(std::move(pts), curve.dim()), std::move(spec)};
}

EquilateralInscription inscribe_equilateral(const ArcLengthCurve& curve, std::size_t n,
                                            double tol) {
  if (n < 3) fail_input("inscription needs n >= 3");
  if (!(tol >= 1e-12 && tol <= 1e-6)) fail_input("inscription tolerance must lie in [1e-12, 1e-6]");
  const double L = curve.length();
  const double nn = static_cast<double>(n);
  const double cb = bilipschitz_estimate(curve, 512).bound;
  const ChordMarcher marcher(curve, cb);

  double c_lo = L / (2.0 * nn * cb), c_hi = 2.0 * L / nn;
  March m_lo = marcher.run(c_lo, n), m_hi = marcher.run(c_hi, n);
  if (!m_hi.ok) {
    // Chords never exceed arcs, so c = L/n already overshoots.
    c_hi = L / nn;
    m_hi = marcher.run(c_hi, n);
  }
  if (!m_lo.ok || !m_hi.ok) {
    const March& bad = m_lo.ok ? m_hi : m_lo;
    fail_input("n too small for equilateral inscription: no chord root at step " +
               std::to_string(bad.failed_step) + " for c = " + std::to_string(m_lo.ok ? c_hi : c_lo));
  }
  double f_lo = m_lo.defect, f_hi = m_hi.defect;
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "equilateral inscription bracket not found: defect(" << c_lo << ") = " << f_lo
        << ", defect(" << c_hi << ") = " << f_hi;
    fail_input(msg.str());
  }

  // Illinois variant of regula falsi; the bracket always keeps a sign change.
  int side = 0, iterations = 0;
  March m_mid = m_lo;
  double c_mid = c_lo;
  for (; iterations < 200; ++iterations) {
    const double width = c_hi - c_lo;
    // The closure defect moves about n times faster than c.
    if (width <= tol * c_lo / nn || width <= 8.0 * std::numeric_limits<double>::epsilon() * c_hi) {
      break;
    }
    c_mid = (c_lo * f_hi - c_hi * f_lo) / (f_hi - f_lo);
    if (!(c_mid > c_lo && c_mid < c_hi)) c_mid = 0.5 * (c_lo + c_hi);
    m_mid = marcher.run(c_mid, n);
    if (!m_mid.ok) {
      fail_input("n too small for equilateral inscription: no chord root at step " +
                 std::to_string(m_mid.failed_step));
    }
    const double f_mid = m_mid.defect;
    if (std::abs(f_mid) <= 0.1 * tol * c_mid) {
      c_lo = c_hi = c_mid;
      m_lo = m_hi = m_mid;
      f_lo = f_hi = f_mid;
      break;
    }
    if (f_mid < 0.0) {
      c_lo = c_mid, f_lo = f_mid, m_lo = m_mid;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      c_hi = c_mid, f_hi = f_mid, m_hi = m_mid;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  // Smaller closure defect wins; ties go to the smaller chord.
  const bool take_hi = std::abs(m_hi.defect) < std::abs(m_lo.defect);
  const March& best = take_hi ? m_hi : m_lo;
  const double c_star = take_hi ? c_hi : c_lo;

  std::vector<double> b(best.b.begin(), best.b.end() - 1);
  std::vector<Vec3> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = std::fmod(b[k], L);
    pts[k] = curve.point(b[k]);
  }
  SubdivisionSpec spec = make_subdivision(curve, std::move(b), pts);
  return {ClosedPolygon(std::move(pts), curve.dim()), std::move(spec), c_star, best.defect,
          iterations};
}

ClosedPolygon recovery_sequence(const ArcLengthCurve& curve, std::size_t n, double tol,
                                double target_length) {
  if (!(target_length > 0.0)) fail_input("target length must be positive");
  const EquilateralInscription ins = inscribe_equilateral(curve, n, tol);
  return ins.polygon.scaled(target_length / ins.polygon.length());
}

ClosedPolygon recovery_sequence(const ArcLengthCurve& curve, std::size_t n, double tol) {
  return recovery_sequence(curve, n, tol, curve.length());
}

}  // namespace moebius
