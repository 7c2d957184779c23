#pragma once

// Quadrature-ready boundary discretizations.
//
//  * smooth parametric curves (ellipse, disk, flower): equispaced trapezoidal nodes
//  * polygons: open panels graded toward every corner
//  * implicit algebraic curves: marching squares, Newton projection and a
//    spectral arc-length reparametrization of every closed component

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "gptshape/contour.hpp"
#include "gptshape/error.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

struct DiscretizedBoundary {
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix2Xd normals; // unit, outward
  Eigen::VectorXd weights;  // arc-length quadrature weights
  Eigen::VectorXd curvatures;
  std::vector<int> component;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(nodes.cols()); }
  int components() const {
    return component.empty() ? 0 : *std::max_element(component.begin(), component.end()) + 1;
  }
  Point node(int i) const { return nodes.col(i); }

  double perimeter() const { return weights.sum(); }

  /// Enclosed area through the divergence identity: 1/2 sum <x, nu> w.
  double area() const {
    double a = 0.0;
    for (int i = 0; i < size(); ++i) a += 0.5 * nodes.col(i).dot(normals.col(i)) * weights[i];
    return a;
  }

  /// sum w nu for one component; vanishes for a closed curve.
  Eigen::Vector2d closure(int comp) const {
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (int i = 0; i < size(); ++i)
      if (component[i] == comp) s += weights[i] * normals.col(i);
    return s;
  }

  double max_radius() const { return nodes.colwise().norm().maxCoeff(); }

  double diameter() const {
    double d = 0.0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) d = std::max(d, (nodes.col(i) - nodes.col(j)).norm());
    return d;
  }

  void append(const DiscretizedBoundary& o) {
    const int n0 = size(), c0 = components();
    nodes.conservativeResize(2, n0 + o.size());
    normals.conservativeResize(2, n0 + o.size());
    weights.conservativeResize(n0 + o.size());
    curvatures.conservativeResize(n0 + o.size());
    nodes.rightCols(o.size()) = o.nodes;
    normals.rightCols(o.size()) = o.normals;
    weights.tail(o.size()) = o.weights;
    curvatures.tail(o.size()) = o.curvatures;
    for (int c : o.component) component.push_back(c + c0);
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  }
};

// ---------------------------------------------------------------------------
// Shape catalog

struct EllipseShape {
  double a = 1.0, b = 1.0;
  Point center = Point::Zero();
  double tilt = 0.0;
};

struct FlowerShape {
  double radius = 1.0;
  double amplitude = 0.3;
  int petals = 5;
  bool missing_petal = false;
  Point center = Point::Zero();
  double phase = 0.0;
};

struct LemniscateShape {
  std::vector<Point> poles;
  double level = 0.5;
};

struct PolygonShape {
  std::vector<Point> vertices;
};

struct ImplicitShape {
  Poly2 poly;
  Box box;
};

using ShapeSpec = std::variant<EllipseShape, FlowerShape, LemniscateShape, PolygonShape, ImplicitShape>;

inline EllipseShape disk_shape(double r = 1.0, Point center = Point::Zero()) { return {r, r, center, 0.0}; }

inline PolygonShape triangle_shape(double side = 1.0) {
  // Equilateral, centroid at the origin.
  const double R = side / std::sqrt(3.0);
  PolygonShape p;
  for (int k = 0; k < 3; ++k) {
    const double t = std::numbers::pi / 2 + 2 * std::numbers::pi * k / 3;
    p.vertices.emplace_back(R * std::cos(t), R * std::sin(t));
  }
  return p;
}

inline PolygonShape diamond_shape(double half_diagonal = 1.0) {
  return {{Point(half_diagonal, 0), Point(0, half_diagonal), Point(-half_diagonal, 0), Point(0, -half_diagonal)}};
}

/// prod_j ((x1 - a_j)^2 + (x2 - b_j)^2) - r.
inline Poly2 lemniscate_poly(const std::vector<Point>& poles, double level) {
  Poly2 p = Poly2::from_terms({{0, 0, 1.0}});
  for (const auto& c : poles) {
    const Poly2 f = Poly2::from_terms({{2, 0, 1.0}, {0, 2, 1.0}, {1, 0, -2 * c.x()}, {0, 1, -2 * c.y()},
                                       {0, 0, c.squaredNorm()}});
    p = p * f;
  }
  return p - Poly2::from_terms({{0, 0, level}});
}

/// Boundary polynomial of an axis-aligned or tilted ellipse.
inline Poly2 ellipse_poly(const EllipseShape& e) {
  // ((c u + s v)/a)^2 + ((-s u + c v)/b)^2 - 1 with u = x1 - cx, v = x2 - cy
  const double c = std::cos(e.tilt), s = std::sin(e.tilt);
  const Poly2 u = Poly2::from_terms({{1, 0, 1.0}, {0, 0, -e.center.x()}});
  const Poly2 v = Poly2::from_terms({{0, 1, 1.0}, {0, 0, -e.center.y()}});
  const Poly2 p = (u * c + v * s) / e.a;
  const Poly2 q = (u * (-s) + v * c) / e.b;
  return p * p + q * q - Poly2::from_terms({{0, 0, 1.0}});
}

// ---------------------------------------------------------------------------
// Smooth parametric curves

namespace detail {

struct CurveSample {
  Eigen::Vector2d x, dx, ddx;
};

inline CurveSample ellipse_sample(const EllipseShape& e, double t) {
  const double c = std::cos(e.tilt), s = std::sin(e.tilt);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Eigen::Vector2d p(e.a * std::cos(t), e.b * std::sin(t));
  const Eigen::Vector2d dp(-e.a * std::sin(t), e.b * std::cos(t));
  return {e.center + rot * p, rot * dp, -(rot * p)};
}

inline CurveSample flower_sample(const FlowerShape& f, double t) {
  const double m = f.petals;
  // Optional bump that removes the petal centred at t = 0.
  double b = 0, db = 0, ddb = 0;
  if (f.missing_petal) {
    const double c = 0.5 * (1 + std::cos(t)), n = 2 * m;
    b = std::pow(c, n);
    const double dc = -0.5 * std::sin(t), ddc = -0.5 * std::cos(t);
    db = n * std::pow(c, n - 1) * dc;
    ddb = n * (n - 1) * std::pow(c, n - 2) * dc * dc + n * std::pow(c, n - 1) * ddc;
  }
  const double cm = std::cos(m * t), sm = std::sin(m * t);
  const double g = cm * (1 - b);
  const double dg = -m * sm * (1 - b) - cm * db;
  const double ddg = -m * m * cm * (1 - b) + 2 * m * sm * db - cm * ddb;
  const double r = f.radius * (1 + f.amplitude * g);
  const double dr = f.radius * f.amplitude * dg, ddr = f.radius * f.amplitude * ddg;
  const double phi = t + f.phase, cp = std::cos(phi), sp = std::sin(phi);
  const Eigen::Vector2d e(cp, sp), de(-sp, cp);
  return {f.center + r * e, dr * e + r * de, ddr * e + 2 * dr * de - r * e};
}

inline DiscretizedBoundary sample_closed_curve(const std::function<CurveSample(double)>& curve, int n) {
  if (n < 16) throw Error(ErrorCode::TooCoarse, "need at least 16 nodes per component, got " + std::to_string(n));
  DiscretizedBoundary b;
  b.nodes.resize(2, n);
  b.normals.resize(2, n);
  b.weights.resize(n);
  b.curvatures.resize(n);
  b.component.assign(n, 0);
  const double dt = 2 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const auto s = curve(i * dt);
    const double speed = s.dx.norm();
    b.nodes.col(i) = s.x;
    b.normals.col(i) = Eigen::Vector2d(s.dx.y(), -s.dx.x()) / speed;
    b.weights[i] = speed * dt;
    b.curvatures[i] = (s.dx.x() * s.ddx.y() - s.dx.y() * s.ddx.x()) / (speed * speed * speed);
  }
  // Counter-clockwise parametrizations give outward (right-hand) normals.
  if (b.area() < 0) {
    b.normals *= -1.0;
    b.curvatures *= -1.0;
  }
  return b;
}

} // namespace detail

inline DiscretizedBoundary discretize_parametric(const ShapeSpec& spec, int n) {
  if (const auto* e = std::get_if<EllipseShape>(&spec)) {
    if (e->a <= 0 || e->b <= 0) throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
    return detail::sample_closed_curve([&](double t) { return detail::ellipse_sample(*e, t); }, n);
  }
  if (const auto* f = std::get_if<FlowerShape>(&spec)) {
    if (f->radius <= 0 || std::abs(f->amplitude) >= 1 || f->petals < 1)
      throw Error(ErrorCode::InvalidArgument, "flower needs radius > 0, |amplitude| < 1, petals >= 1");
    return detail::sample_closed_curve([&](double t) { return detail::flower_sample(*f, t); }, n);
  }
  throw Error(ErrorCode::InvalidArgument, "shape has no closed-form parametrization");
}

// ---------------------------------------------------------------------------
// Polygons

namespace detail {

inline double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

inline bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Symmetric grading of [0,1] that clusters toward both ends like u^q.
inline double grade(double u, double q) {
  return u <= 0.5 ? 0.5 * std::pow(2 * u, q) : 1 - 0.5 * std::pow(2 * (1 - u), q);
}

} // namespace detail

inline DiscretizedBoundary discretize_polygon(const PolygonShape& poly, int n_per_edge, double q = 3.0) {
  auto v = poly.vertices;
  const int m = static_cast<int>(v.size());
  if (m < 3) throw Error(ErrorCode::InvalidPolygon, "polygon needs at least 3 vertices");
  if (n_per_edge < 2) throw Error(ErrorCode::TooCoarse, "need at least 2 nodes per edge");
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "grading exponent must be >= 1");
  for (int i = 0; i < m; ++i) {
    if ((v[(i + 1) % m] - v[i]).norm() == 0) throw Error(ErrorCode::InvalidPolygon, "repeated vertex");
    for (int j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      if (detail::segments_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]))
        throw Error(ErrorCode::InvalidPolygon, "polygon edges " + std::to_string(i) + " and " + std::to_string(j) +
                                                   " intersect");
    }
  }
  double signed_area = 0;
  for (int i = 0; i < m; ++i) signed_area += 0.5 * detail::cross(v[i], v[(i + 1) % m]);
  if (signed_area == 0) throw Error(ErrorCode::InvalidPolygon, "degenerate polygon");
  if (signed_area < 0) std::reverse(v.begin(), v.end());

  DiscretizedBoundary b;
  const int n = m * n_per_edge;
  b.nodes.resize(2, n);
  b.normals.resize(2, n);
  b.weights.resize(n);
  b.curvatures = Eigen::VectorXd::Zero(n);
  b.component.assign(n, 0);
  for (int e = 0; e < m; ++e) {
    const Point a = v[e], c = v[(e + 1) % m];
    const Eigen::Vector2d edge = c - a;
    const double len = edge.norm();
    const Eigen::Vector2d nu(edge.y() / len, -edge.x() / len);
    for (int i = 0; i < n_per_edge; ++i) {
      // Midpoint of each graded cell; weight is the exact graded cell length.
      const double lo = detail::grade(double(i) / n_per_edge, q), hi = detail::grade(double(i + 1) / n_per_edge, q);
      const double mid = detail::grade((i + 0.5) / n_per_edge, q);
      const int k = e * n_per_edge + i;
      b.nodes.col(k) = a + mid * edge;
      b.normals.col(k) = nu;
      b.weights[k] = (hi - lo) * len;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Implicit algebraic curves

struct TraceOptions {
  Box box{};
  int grid = 512;
  int nodes_per_component = 256;
  int reparam_sweeps = 4;
};

namespace detail {

inline Point newton_project(const Poly2& p, Point x, double tol) {
  for (int it = 0; it < 20; ++it) {
    const double v = p.eval(x);
    if (std::abs(v) < tol) break;
    const Eigen::Vector2d g = p.gradient(x);
    const double g2 = g.squaredNorm();
    if (g2 == 0) break;
    x -= (v / g2) * g;
  }
  return x;
}

/// Evaluates sum_k c_k exp(i w_k t) and its t-derivative, with w_k the signed
/// wavenumber of FFT slot k. Phasors are built by recurrence.
inline std::pair<std::complex<double>, std::complex<double>>
fourier_eval(const std::vector<std::complex<double>>& c, double t) {
  const int n = static_cast<int>(c.size());
  const std::complex<double> step = std::polar(1.0, t);
  std::complex<double> ph = 1.0, value = c[0], deriv = 0.0;
  for (int k = 1; 2 * k < n; ++k) {
    ph *= step;
    const std::complex<double> pos = c[k] * ph, neg = c[n - k] * std::conj(ph);
    value += pos + neg;
    deriv += std::complex<double>(0, k) * (pos - neg);
  }
  return {value, deriv};
}

/// Periodic trigonometric interpolant through equispaced samples z_i = z(2 pi i / N).
class TrigInterpolant {
public:
  explicit TrigInterpolant(const std::vector<std::complex<double>>& z) : n_(static_cast<int>(z.size())) {
    Eigen::FFT<double> fft;
    fft.fwd(coef_, z);
    for (auto& c : coef_) c /= double(n_);
    if (n_ % 2 == 0) coef_[n_ / 2] = 0.0; // drop the Nyquist mode
  }

  int wavenumber(int k) const { return k <= n_ / 2 ? k : k - n_; }

  std::complex<double> operator()(double t) const { return fourier_eval(coef_, t).first; }
  std::complex<double> derivative(double t) const { return fourier_eval(coef_, t).second; }

  /// Derivative at all nodes via the inverse transform.
  std::vector<std::complex<double>> derivative_at_nodes() const {
    std::vector<std::complex<double>> d(n_);
    for (int k = 0; k < n_; ++k) d[k] = coef_[k] * std::complex<double>(0, wavenumber(k)) * double(n_);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.inv(out, d);
    return out;
  }

private:
  int n_;
  std::vector<std::complex<double>> coef_;
};

/// Antiderivative of a sampled positive periodic speed: mean * t + periodic part.
class PeriodicIntegral {
public:
  explicit PeriodicIntegral(const std::vector<double>& speed) : n_(static_cast<int>(speed.size())) {
    std::vector<std::complex<double>> s(speed.begin(), speed.end());
    Eigen::FFT<double> fft;
    fft.fwd(coef_, s);
    for (auto& c : coef_) c /= double(n_);
    if (n_ % 2 == 0) coef_[n_ / 2] = 0.0;
    integ_ = coef_;
    integ_[0] = 0.0;
    for (int k = 1; k < n_; ++k) {
      const int w = k <= n_ / 2 ? k : k - n_;
      integ_[k] = coef_[k] / std::complex<double>(0, w);
    }
    offset_ = fourier_eval(integ_, 0.0).first.real();
  }
  double mean() const { return coef_[0].real(); }
  /// Value and derivative at t.
  std::pair<double, double> operator()(double t) const {
    const auto [v, d] = fourier_eval(integ_, t);
    return {mean() * t + v.real() - offset_, mean() + d.real()};
  }

private:
  int n_;
  std::vector<std::complex<double>> coef_, integ_;
  double offset_ = 0.0;
};

inline std::vector<Point> resample_polyline(const std::vector<Point>& pts, int n) {
  std::vector<double> cum{0.0};
  const int m = static_cast<int>(pts.size());
  for (int i = 0; i < m; ++i) cum.push_back(cum.back() + (pts[(i + 1) % m] - pts[i]).norm());
  const double total = cum.back();
  std::vector<Point> out;
  int seg = 0;
  for (int k = 0; k < n; ++k) {
    const double target = total * k / n;
    while (seg < m - 1 && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0 ? (target - cum[seg]) / len : 0.0;
    out.push_back(pts[seg] + t * (pts[(seg + 1) % m] - pts[seg]));
  }
  return out;
}

/// Even-odd ray-casting test of point q against a closed polygon.
inline bool inside_polygon(const Point& q, const std::vector<Point>& poly) {
  bool in = false;
  const int m = static_cast<int>(poly.size());
  for (int i = 0, j = m - 1; i < m; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double xc = a.x() + (q.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (q.x() < xc) in = !in;
    }
  }
  return in;
}

inline double polygon_signed_area(const std::vector<Point>& poly) {
  double a = 0;
  for (size_t i = 0; i < poly.size(); ++i) a += 0.5 * cross(poly[i], poly[(i + 1) % poly.size()]);
  return a;
}

} // namespace detail

/// Traces the closed components of {p = 0} inside opts.box.
inline DiscretizedBoundary trace_implicit(const Poly2& p, const TraceOptions& opts = {}) {
  if (p.effective_degree() < 1) throw Error(ErrorCode::DegenerateInput, "polynomial is constant");
  if (opts.nodes_per_component < 16) throw Error(ErrorCode::TooCoarse, "need at least 16 nodes per component");
  const double scale = std::max(1.0, p.max_abs_coeff());
  const double tol = 1e-12 * scale;

  auto lines = marching_squares([&](const Eigen::Vector2d& x) { return p.eval(x); }, opts.box, opts.grid, 0.0);

  std::vector<std::string> warnings;
  std::vector<std::vector<Point>> comps;
  for (auto& pl : lines) {
    if (!pl.closed) {
      warnings.push_back("Unbounded component: open level-set curve of " + std::to_string(pl.points.size()) +
                         " vertices reaches the box edge and was excluded");
      continue;
    }
    if (pl.points.size() < 4) continue;
    comps.push_back(pl.points);
  }
  if (comps.empty()) throw Error(ErrorCode::NoCurveFound, "no closed component of the zero set inside the box");

  // Components sorted by leftmost node.
  auto leftmost = [](const std::vector<Point>& c) {
    double m = c.front().x();
    for (const auto& q : c) m = std::min(m, q.x());
    return m;
  };
  std::sort(comps.begin(), comps.end(), [&](const auto& a, const auto& b) { return leftmost(a) < leftmost(b); });

  // Nesting depth by ray parity decides which side is outside.
  std::vector<int> depth(comps.size(), 0);
  for (size_t c = 0; c < comps.size(); ++c)
    for (size_t o = 0; o < comps.size(); ++o)
      if (o != c && detail::inside_polygon(comps[c].front(), comps[o])) ++depth[c];

  DiscretizedBoundary out;
  out.nodes.resize(2, 0);
  out.normals.resize(2, 0);
  out.weights.resize(0);
  out.curvatures.resize(0);
  const int n = opts.nodes_per_component;

  for (size_t c = 0; c < comps.size(); ++c) {
    auto poly = comps[c];
    for (auto& q : poly) q = detail::newton_project(p, q, tol);
    // Outer boundaries run counter-clockwise, holes clockwise.
    const bool ccw = depth[c] % 2 == 0;
    if ((detail::polygon_signed_area(poly) > 0) != ccw) std::reverse(poly.begin(), poly.end());

    std::vector<Point> pts = detail::resample_polyline(poly, n);
    for (auto& q : pts) q = detail::newton_project(p, q, tol);

    // Spectral arc-length reparametrization: equispaced parameter, near-constant speed.
    const double two_pi = 2 * std::numbers::pi;
    for (int sweep = 0; sweep < opts.reparam_sweeps; ++sweep) {
      std::vector<std::complex<double>> z(n);
      for (int i = 0; i < n; ++i) z[i] = {pts[i].x(), pts[i].y()};
      detail::TrigInterpolant curve(z);
      const auto dz = curve.derivative_at_nodes();
      std::vector<double> speed(n);
      for (int i = 0; i < n; ++i) speed[i] = std::abs(dz[i]);
      detail::PeriodicIntegral arc(speed);
      const double total = arc.mean() * two_pi;
      double t = 0.0;
      for (int k = 0; k < n; ++k) {
        const double target = total * k / n;
        for (int it = 0; it < 30; ++it) {
          const auto [value, slope] = arc(t);
          const double step = (value - target) / slope;
          t -= step;
          if (std::abs(step) < 1e-15) break;
        }
        const auto zt = curve(t);
        pts[k] = detail::newton_project(p, Point(zt.real(), zt.imag()), tol);
      }
    }

    std::vector<std::complex<double>> z(n);
    for (int i = 0; i < n; ++i) z[i] = {pts[i].x(), pts[i].y()};
    const auto dz = detail::TrigInterpolant(z).derivative_at_nodes();

    DiscretizedBoundary comp;
    comp.nodes.resize(2, n);
    comp.normals.resize(2, n);
    comp.weights.resize(n);
    comp.curvatures.resize(n);
    comp.component.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      const Point& x = pts[i];
      const Eigen::Vector2d g = p.gradient(x);
      const Eigen::Matrix2d h = p.hessian(x);
      const double gn = g.norm();
      // Geometric outward direction from the traversal orientation.
      const Eigen::Vector2d tangent(dz[i].real(), dz[i].imag());
      const Eigen::Vector2d right(tangent.y(), -tangent.x());
      const double sign = right.dot(g) >= 0 ? 1.0 : -1.0;
      comp.nodes.col(i) = x;
      comp.normals.col(i) = sign * g / gn;
      comp.weights[i] = tangent.norm() * two_pi / n;
      const double num = h(0, 0) * g.y() * g.y() - 2 * h(0, 1) * g.x() * g.y() + h(1, 1) * g.x() * g.x();
      comp.curvatures[i] = sign * num / (gn * gn * gn);
    }
    out.append(comp);
  }
  out.warnings = std::move(warnings);
  return out;
}

/// Dispatches any catalog shape to its discretizer. n is nodes per component
/// (smooth and implicit shapes) or nodes per edge (polygons).
struct DiscretizeOptions {
  int n = 256;
  double grading = 3.0;
  Box box{};
  int grid = 512;
};

inline DiscretizedBoundary discretize(const ShapeSpec& spec, const DiscretizeOptions& opts = {}) {
  if (std::holds_alternative<EllipseShape>(spec) || std::holds_alternative<FlowerShape>(spec))
    return discretize_parametric(spec, opts.n);
  if (const auto* poly = std::get_if<PolygonShape>(&spec)) return discretize_polygon(*poly, opts.n, opts.grading);
  TraceOptions t;
  t.box = opts.box;
  t.grid = opts.grid;
  t.nodes_per_component = opts.n;
  if (const auto* lem = std::get_if<LemniscateShape>(&spec)) {
    if (lem->poles.empty() || lem->level <= 0)
      throw Error(ErrorCode::InvalidArgument, "lemniscate needs poles and a positive level");
    return trace_implicit(lemniscate_poly(lem->poles, lem->level), t);
  }
  const auto& imp = std::get<ImplicitShape>(spec);
  t.box = imp.box;
  return trace_implicit(imp.poly, t);
}

} // namespace gptshape
