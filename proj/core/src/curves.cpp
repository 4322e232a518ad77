#include "moebius/curves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "moebius/error.hpp"

namespace moebius {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290,
                                               0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

double wrap_unit(double u) {
  double w = u - std::floor(u);
  if (w >= 1.0) w = 0.0;
  return w;
}

// Solves the cyclic system x[i-1] + 4 x[i] + x[i+1] = r[i] (indices mod n).
std::vector<double> solve_cyclic_spline(const std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  const double sub = 1.0, diag = 4.0, sup = 1.0, alpha = 1.0, beta = 1.0;
  const double gamma = -diag;

  auto tridiag = [&](std::vector<double> b, const std::vector<double>& r) {
    std::vector<double> c(n), x(n);
    double bet = b[0];
    x[0] = r[0] / bet;
    for (std::size_t j = 1; j < n; ++j) {
      c[j] = sup / bet;
      bet = b[j] - sub * c[j];
      x[j] = (r[j] - sub * x[j - 1]) / bet;
    }
    for (std::size_t j = n - 1; j-- > 0;) x[j] -= c[j + 1] * x[j + 1];
    return x;
  };

  std::vector<double> bb(n, diag);
  bb[0] = diag - gamma;
  bb[n - 1] = diag - alpha * beta / gamma;
  std::vector<double> x = tridiag(bb, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = tridiag(bb, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

Vec3 fd_first(const ParametricCurve::Map& f, double u) {
  constexpr double h = 1e-4;
  return (f(u - 2 * h) - 8.0 * f(u - h) + 8.0 * f(u + h) - f(u + 2 * h)) / (12.0 * h);
}

}  // namespace

ParametricCurve::ParametricCurve(Map point, Map derivative, Map second, int dim,
                                 CurveDescriptor desc)
    : point_(std::move(point)),
      derivative_(std::move(derivative)),
      second_(std::move(second)),
      dim_(dim),
      descriptor_(std::move(desc)) {
  if (dim_ != 2 && dim_ != 3) fail_input("curve dimension must be 2 or 3");
}

ParametricCurve ParametricCurve::circle(double radius) {
  if (!(radius > 0.0)) fail_input("circle radius must be positive");
  CurveDescriptor d{"circle", {{"radius", radius}}, {}};
  return ParametricCurve(
      [radius](double u) {
        const double a = kTwoPi * u;
        return Vec3{radius * std::cos(a), radius * std::sin(a), 0.0};
      },
      [radius](double u) {
        const double a = kTwoPi * u;
        return Vec3{-radius * kTwoPi * std::sin(a), radius * kTwoPi * std::cos(a), 0.0};
      },
      [radius](double u) {
        const double a = kTwoPi * u;
        const double k = -radius * kTwoPi * kTwoPi;
        return Vec3{k * std::cos(a), k * std::sin(a), 0.0};
      },
      2, std::move(d));
}

ParametricCurve ParametricCurve::ellipse(double semi_x, double semi_y) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0)) fail_input("ellipse semi-axes must be positive");
  CurveDescriptor d{"ellipse", {{"a", semi_x}, {"b", semi_y}}, {}};
  return ParametricCurve(
      [=](double u) {
        const double a = kTwoPi * u;
        return Vec3{semi_x * std::cos(a), semi_y * std::sin(a), 0.0};
      },
      [=](double u) {
        const double a = kTwoPi * u;
        return Vec3{-semi_x * kTwoPi * std::sin(a), semi_y * kTwoPi * std::cos(a), 0.0};
      },
      [=](double u) {
        const double a = kTwoPi * u;
        return Vec3{-semi_x * kTwoPi * kTwoPi * std::cos(a), -semi_y * kTwoPi * kTwoPi * std::sin(a),
                    0.0};
      },
      2, std::move(d));
}

ParametricCurve ParametricCurve::rounded_polygon(int sides, double side, double corner_radius) {
  if (sides < 3) fail_input("rounded polygon needs at least 3 sides");
  if (!(side >= 0.0) || !(corner_radius > 0.0)) {
    fail_input("rounded polygon needs side >= 0 and corner radius > 0");
  }
  struct Piece {
    Vec3 start;
    double heading;
  };
  const double turn = kTwoPi / sides;
  const double arc = corner_radius * turn;
  const double piece_len = side + arc;
  const double total = sides * piece_len;

  std::vector<Piece> pieces(sides);
  Vec3 p{-0.5 * side, -(corner_radius + 0.5 * side / std::tan(std::numbers::pi / sides)), 0.0};
  for (int j = 0; j < sides; ++j) {
    const double th = j * turn;
    pieces[j] = {p, th};
    const Vec3 t{std::cos(th), std::sin(th), 0.0};
    const Vec3 nrm{-std::sin(th), std::cos(th), 0.0};
    const Vec3 center = p + side * t + corner_radius * nrm;
    p = center + corner_radius * Vec3{std::sin(th + turn), -std::cos(th + turn), 0.0};
  }

  // Returns (position, unit tangent, curvature normal) at arclength s.
  auto eval = [=](double u) {
    const double s = wrap_unit(u) * total;
    const int j = std::min(sides - 1, static_cast<int>(s / piece_len));
    const double sigma = s - j * piece_len;
    const Piece& pc = pieces[j];
    const Vec3 t{std::cos(pc.heading), std::sin(pc.heading), 0.0};
    if (sigma < side) {
      return std::array<Vec3, 3>{pc.start + sigma * t, t, Vec3{}};
    }
    const Vec3 nrm{-std::sin(pc.heading), std::cos(pc.heading), 0.0};
    const Vec3 center = pc.start + side * t + corner_radius * nrm;
    const double ang = pc.heading + (sigma - side) / corner_radius;
    const Vec3 pos = center + corner_radius * Vec3{std::sin(ang), -std::cos(ang), 0.0};
    const Vec3 tan{std::cos(ang), std::sin(ang), 0.0};
    const Vec3 kn = Vec3{-std::sin(ang), std::cos(ang), 0.0} / corner_radius;
    return std::array<Vec3, 3>{pos, tan, kn};
  };

  CurveDescriptor d{"rounded_polygon",
                    {{"sides", static_cast<double>(sides)}, {"side", side}, {"radius", corner_radius}},
                    {}};
  return ParametricCurve([eval](double u) { return eval(u)[0]; },
                         [eval, total](double u) { return total * eval(u)[1]; },
                         [eval, total](double u) { return total * total * eval(u)[2]; }, 2,
                         std::move(d));
}

ParametricCurve ParametricCurve::torus_knot(int p, int q, double major, double minor) {
  if (p == 0 || q == 0 || std::gcd(p, q) != 1) fail_input("torus knot needs coprime nonzero p, q");
  if (!(major > minor) || !(minor > 0.0)) fail_input("torus knot needs major > minor > 0");
  const double R = major, r = minor;
  CurveDescriptor d{"torus_knot",
                    {{"p", static_cast<double>(p)}, {"q", static_cast<double>(q)}, {"R", R}, {"r", r}},
                    {}};
  return ParametricCurve(
      [=](double u) {
        const double phi = kTwoPi * u;
        const double rho = R + r * std::cos(q * phi);
        return Vec3{rho * std::cos(p * phi), rho * std::sin(p * phi), -r * std::sin(q * phi)};
      },
      [=](double u) {
        const double phi = kTwoPi * u;
        const double cp = std::cos(p * phi), sp = std::sin(p * phi);
        const double rho = R + r * std::cos(q * phi);
        const double drho = -r * q * std::sin(q * phi);
        return kTwoPi * Vec3{drho * cp - p * rho * sp, drho * sp + p * rho * cp,
                             -r * q * std::cos(q * phi)};
      },
      [=](double u) {
        const double phi = kTwoPi * u;
        const double cp = std::cos(p * phi), sp = std::sin(p * phi);
        const double rho = R + r * std::cos(q * phi);
        const double drho = -r * q * std::sin(q * phi);
        const double ddrho = -r * q * q * std::cos(q * phi);
        return kTwoPi * kTwoPi *
               Vec3{ddrho * cp - 2.0 * p * drho * sp - p * p * rho * cp,
                    ddrho * sp + 2.0 * p * drho * cp - p * p * rho * sp,
                    r * q * q * std::sin(q * phi)};
      },
      3, std::move(d));
}

ParametricCurve ParametricCurve::from_samples(std::vector<Vec3> samples, int dim) {
  const std::size_t n = samples.size();
  if (n < 4) fail_input("sample table needs at least 4 points");
  const double h = 1.0 / static_cast<double>(n);
  std::vector<Vec3> second(n);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double prev = samples[(i + n - 1) % n][c], cur = samples[i][c],
                   next = samples[(i + 1) % n][c];
      rhs[i] = 6.0 * (next - 2.0 * cur + prev) / (h * h);
    }
    const std::vector<double> m = solve_cyclic_spline(rhs);
    for (std::size_t i = 0; i < n; ++i) second[i][c] = m[i];
  }

  struct Table {
    std::vector<Vec3> y, m;
    double h;
  };
  auto table = std::make_shared<const Table>(Table{samples, second, h});
  auto locate = [table](double u, std::size_t& i, double& t) {
    const std::size_t n = table->y.size();
    const double x = wrap_unit(u) * static_cast<double>(n);
    i = std::min(n - 1, static_cast<std::size_t>(x));
    t = x - static_cast<double>(i);
  };

  CurveDescriptor d{"samples", {}, samples};
  return ParametricCurve(
      [table, locate](double u) {
        std::size_t i;
        double t;
        locate(u, i, t);
        const std::size_t j = (i + 1) % table->y.size();
        const double s = 1.0 - t, hh = table->h * table->h / 6.0;
        return s * table->y[i] + t * table->y[j] +
               hh * ((s * s * s - s) * table->m[i] + (t * t * t - t) * table->m[j]);
      },
      [table, locate](double u) {
        std::size_t i;
        double t;
        locate(u, i, t);
        const std::size_t j = (i + 1) % table->y.size();
        const double s = 1.0 - t, hh = table->h / 6.0;
        return (table->y[j] - table->y[i]) / table->h +
               hh * (-(3.0 * s * s - 1.0) * table->m[i] + (3.0 * t * t - 1.0) * table->m[j]);
      },
      [table, locate](double u) {
        std::size_t i;
        double t;
        locate(u, i, t);
        const std::size_t j = (i + 1) % table->y.size();
        return (1.0 - t) * table->m[i] + t * table->m[j];
      },
      dim, std::move(d));
}

ParametricCurve ParametricCurve::custom(Map point, int dim, Map derivative, Map second) {
  if (!point) fail_input("custom curve needs a point evaluator");
  return ParametricCurve(std::move(point), std::move(derivative), std::move(second), dim,
                         CurveDescriptor{"custom", {}, {}});
}

ParametricCurve ParametricCurve::from_descriptor(const CurveDescriptor& desc) {
  if (auto it = desc.params.find("scale"); it != desc.params.end()) {
    CurveDescriptor base = desc;
    base.params.erase("scale");
    return from_descriptor(base).scaled(it->second);
  }
  auto param = [&](const char* key) {
    auto it = desc.params.find(key);
    if (it == desc.params.end()) fail_input(std::string("curve descriptor missing param '") + key + "'");
    return it->second;
  };
  auto param_or = [&](const char* key, double fallback) {
    auto it = desc.params.find(key);
    return it == desc.params.end() ? fallback : it->second;
  };
  if (desc.kind == "circle") return circle(param_or("radius", 1.0));
  if (desc.kind == "ellipse") return ellipse(param("a"), param("b"));
  if (desc.kind == "rounded_polygon") {
    return rounded_polygon(static_cast<int>(param("sides")), param("side"), param("radius"));
  }
  if (desc.kind == "torus_knot") {
    return torus_knot(static_cast<int>(param("p")), static_cast<int>(param("q")), param_or("R", 2.0),
                      param_or("r", 1.0));
  }
  if (desc.kind == "trefoil") return torus_knot(2, 3, param_or("R", 2.0), param_or("r", 1.0));
  if (desc.kind == "samples") {
    bool planar = std::all_of(desc.samples.begin(), desc.samples.end(),
                              [](const Vec3& v) { return v.z == 0.0; });
    const int dim = static_cast<int>(param_or("dim", planar ? 2.0 : 3.0));
    return from_samples(desc.samples, dim);
  }
  fail_input("unknown curve kind '" + desc.kind + "'");
}

Vec3 ParametricCurve::point(double u) const { return point_(u); }

Vec3 ParametricCurve::derivative(double u) const {
  return derivative_ ? derivative_(u) : fd_first(point_, u);
}

Vec3 ParametricCurve::second_derivative(double u) const {
  if (second_) return second_(u);
  constexpr double h = 1e-5;
  return (derivative(u + h) - derivative(u - h)) / (2.0 * h);
}

ParametricCurve ParametricCurve::scaled(double scale) const {
  if (!(scale > 0.0)) fail_input("scale factor must be positive");
  ParametricCurve out = *this;
  auto p = point_;
  out.point_ = [p, scale](double u) { return scale * p(u); };
  if (derivative_) {
    auto d = derivative_;
    out.derivative_ = [d, scale](double u) { return scale * d(u); };
  }
  if (second_) {
    auto s = second_;
    out.second_ = [s, scale](double u) { return scale * s(u); };
  }
  out.descriptor_.params["scale"] = scale * (descriptor_.params.count("scale")
                                                 ? descriptor_.params.at("scale")
                                                 : 1.0);
  return out;
}

ParametricCurve ParametricCurve::mapped(
    std::function<Vec3(const Vec3&)> f,
    std::function<Vec3(const Vec3&, const Vec3&)> jacobian_times) const {
  const ParametricCurve base = *this;
  Map point = [base, f](double u) { return f(base.point(u)); };
  Map deriv = [base, jacobian_times](double u) {
    return jacobian_times(base.point(u), base.derivative(u));
  };
  return ParametricCurve(std::move(point), std::move(deriv), {}, dim_,
                         CurveDescriptor{"custom", {}, {}});
}

// ---------------------------------------------------------------------------

double ArcLengthCurve::arc_between(double u0, double u1) const {
  const double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
  double acc = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    acc += kGaussWeights[k] * (norm(source_.derivative(mid + half * kGaussNodes[k])) +
                               norm(source_.derivative(mid - half * kGaussNodes[k])));
  }
  return acc * half;
}

double ArcLengthCurve::parameter_at(double s) const {
  double w = std::fmod(s, length_);
  if (w < 0.0) w += length_;
  const std::size_t m = node_count();
  const auto it = std::upper_bound(s_nodes_.begin(), s_nodes_.end(), w);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - s_nodes_.begin() - 1));
  k = std::min(k, m - 1);

  const double s0 = s_nodes_[k], s1 = s_nodes_[k + 1];
  const double u0 = static_cast<double>(k) / static_cast<double>(m);
  const double u1 = static_cast<double>(k + 1) / static_cast<double>(m);
  const double h = s1 - s0;
  const double secant = (u1 - u0) / h;
  // Fritsch-Carlson limited slopes of the inverse map u(s).
  double m0 = 1.0 / speed_[k], m1 = 1.0 / speed_[k + 1];
  const double a = m0 / secant, b = m1 / secant;
  if (a * a + b * b > 9.0) {
    const double tau = 3.0 / std::sqrt(a * a + b * b);
    m0 = tau * a * secant;
    m1 = tau * b * secant;
  }
  const double t = (w - s0) / h;
  const double t2 = t * t, t3 = t2 * t;
  double u = (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * u1 +
             (t3 - t2) * h * m1;

  // Newton polish on s(u) - w using the exact speed.
  for (int iter = 0; iter < 6; ++iter) {
    const double residual = s0 + arc_between(u0, u) - w;
    const double step = residual / norm(source_.derivative(u));
    u -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return u;
}

Vec3 ArcLengthCurve::point(double s) const { return source_.point(parameter_at(s)); }

Vec3 ArcLengthCurve::tangent(double s) const {
  const Vec3 d = source_.derivative(parameter_at(s));
  return d / norm(d);
}

std::pair<Vec3, Vec3> ArcLengthCurve::point_and_tangent(double s) const {
  const double u = parameter_at(s);
  const Vec3 d = source_.derivative(u);
  return {source_.point(u), d / norm(d)};
}

double ArcLengthCurve::curvature(double s) const {
  const double u = parameter_at(s);
  const Vec3 d1 = source_.derivative(u);
  const Vec3 d2 = source_.second_derivative(u);
  const double sp = norm(d1);
  return norm(cross(d1, d2)) / (sp * sp * sp);
}

CurveSampler ArcLengthCurve::sampler(double target_length) const {
  if (!(target_length > 0.0)) fail_input("sampler length must be positive");
  const double ratio = length_ / target_length;
  const double scale = target_length / length_;
  CurveSampler out;
  out.length = target_length;
  const ArcLengthCurve self = *this;
  out.point = [self, ratio, scale](double t) { return scale * self.point(t * ratio); };
  out.tangent = [self, ratio](double t) { return self.tangent(t * ratio); };
  out.segments = 0;
  return out;
}

ArcLengthCurve arclength_reparametrize(const ParametricCurve& curve, std::size_t nodes, double tol) {
  if (nodes < 256) fail_input("arclength table needs at least 256 nodes");
  if (!(tol > 0.0)) fail_input("arclength tolerance must be positive");

  // Non-degeneracy on a 2048-point grid.
  constexpr std::size_t kProbe = 2048;
  std::vector<Vec3> probe(kProbe);
  for (std::size_t i = 0; i < kProbe; ++i) probe[i] = curve.point(static_cast<double>(i) / kProbe);
  double extent = 0.0;
  for (const Vec3& p : probe) extent = std::max(extent, distance(p, probe[0]));
  for (std::size_t i = 0; i < kProbe; ++i) {
    const double seg = distance(probe[i], probe[(i + 1) % kProbe]);
    if (extent == 0.0 || seg <= 1e-14 * extent) {
      fail_input("degenerate curve: zero-length segment at table index " + std::to_string(i));
    }
  }

  ArcLengthCurve out(curve);

  auto build = [&](std::size_t m) {
    out.s_nodes_.assign(m + 1, 0.0);
    out.speed_.assign(m + 1, 0.0);
    for (std::size_t k = 0; k <= m; ++k) {
      out.speed_[k] = norm(curve.derivative(static_cast<double>(k) / static_cast<double>(m)));
    }
    for (std::size_t k = 0; k < m; ++k) {
      out.s_nodes_[k + 1] =
          out.s_nodes_[k] + out.arc_between(static_cast<double>(k) / static_cast<double>(m),
                                            static_cast<double>(k + 1) / static_cast<double>(m));
    }
    return out.s_nodes_.back();
  };

  std::size_t m = nodes;
  if (curve.descriptor().kind == "samples") {
    // Align table nodes with spline knots.
    const std::size_t ns = curve.descriptor().samples.size();
    m = ((m + ns - 1) / ns) * ns;
  }
  double total = build(m);
  constexpr std::size_t kMaxNodes = std::size_t{1} << 22;
  for (;;) {
    if (!(total > 0.0)) fail_input("degenerate curve: zero total length");
    if (2 * m > kMaxNodes) break;
    const double refined = build(2 * m);
    m *= 2;
    const bool converged = std::abs(refined - total) < tol * refined;
    total = refined;
    if (converged) break;
  }
  out.length_ = out.s_nodes_.back();
  for (std::size_t k = 0; k < m; ++k) {
    if (!(out.s_nodes_[k + 1] > out.s_nodes_[k])) {
      fail_input("degenerate curve: zero-length segment at table index " + std::to_string(k));
    }
  }
  return out;
}

double intrinsic_distance(double L, double s, double t) {
  double r = std::fmod(std::abs(t - s), L);
  return std::min(r, L - r);
}

ConstantEstimate curvature_bound(const ArcLengthCurve& curve, std::size_t grid) {
  if (grid < 16) fail_input("curvature grid must have at least 16 points");
  const double L = curve.length();
  const double h = L / static_cast<double>(grid);
  std::vector<Vec3> pts(grid);
  for (std::size_t i = 0; i < grid; ++i) pts[i] = curve.point(static_cast<double>(i) * h);
  double best = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const Vec3& prev = pts[(i + grid - 1) % grid];
    const Vec3& next = pts[(i + 1) % grid];
    best = std::max(best, norm(next - 2.0 * pts[i] + prev) / (h * h));
  }
  return {best, kConstantInflation * best};
}

ConstantEstimate bilipschitz_estimate(const ArcLengthCurve& curve, std::size_t grid) {
  if (grid < 4) fail_input("bi-Lipschitz grid must have at least 4 points");
  const double L = curve.length();
  const double h = L / static_cast<double>(grid);
  std::vector<Vec3> pts(grid);
  for (std::size_t i = 0; i < grid; ++i) pts[i] = curve.point(static_cast<double>(i) * h);
  double best = 1.0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = i + 1; j < grid; ++j) {
      const double d = intrinsic_distance(L, static_cast<double>(i) * h, static_cast<double>(j) * h);
      const double chord = distance(pts[i], pts[j]);
      if (chord < 1e-9 * L) {
        if (d > 1e-3 * L) {
          fail_singular("not embedded at sampled resolution: grid points " + std::to_string(i) +
                        " and " + std::to_string(j) + " coincide");
        }
        continue;
      }
      best = std::max(best, d / chord);
    }
  }
  return {best, kConstantInflation * best};
}

}  // namespace moebius
