#pragma once

// Built-in oracle suite behind `gptshape verify`. Every check compares the
// pipeline against an independent closed form or brute-force computation.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gptshape/geometry.hpp"
#include "gptshape/gpt.hpp"
#include "gptshape/npo.hpp"
#include "gptshape/polynomial.hpp"
#include "gptshape/recovery.hpp"
#include "gptshape/transform.hpp"

namespace gptshape {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string note; // set when the check threw
};

struct VerifyOptions {
  bool quick = false;
  DiagonalRule diagonal = DiagonalRule::CurvatureLimit; // Zero deliberately breaks the disk oracles
  unsigned seed = 20240611u;
};

namespace oracle {

/// GPTs of the unit disk from Fourier analysis alone: on the circle the
/// resolvent divides the mean of f by (lambda - 1/2) and the rest by lambda.
/// A 64-point trapezoid rule is exact for the trigonometric polynomials involved.
inline double disk_gpt(MultiIndex alpha, MultiIndex beta, double lambda) {
  constexpr int n = 64;
  std::vector<double> f(n);
  double mean = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    const double c = std::cos(t), s = std::sin(t);
    // nu . grad x^alpha with nu = x on the unit circle equals |alpha| x^alpha.
    f[k] = alpha.order() * std::pow(c, alpha.a1) * std::pow(s, alpha.a2);
    mean += f[k] / n;
  }
  double m = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    const double phi = (f[k] - mean) / lambda + mean / (lambda - 0.5);
    m += std::pow(std::cos(t), beta.a1) * std::pow(std::sin(t), beta.a2) * phi * 2 * std::numbers::pi / n;
  }
  return m;
}

/// Expands (a11 x1 + a12 x2)^(d-h) (a21 x1 + a22 x2)^h by polynomial
/// multiplication and reads off the degree-d block.
inline Eigen::MatrixXd lift_bruteforce(const Eigen::Matrix2d& a, int d) {
  const Poly2 l1 = Poly2::from_terms({{1, 0, a(0, 0)}, {0, 1, a(0, 1)}});
  const Poly2 l2 = Poly2::from_terms({{1, 0, a(1, 0)}, {0, 1, a(1, 1)}});
  Eigen::MatrixXd out(d + 1, d + 1);
  for (int h = 0; h <= d; ++h) {
    Poly2 p = Poly2::from_terms({{0, 0, 1.0}});
    for (int k = 0; k < d - h; ++k) p = p * l1;
    for (int k = 0; k < h; ++k) p = p * l2;
    for (int j = 0; j <= d; ++j) out(h, j) = p[{d - j, j}];
  }
  return out;
}

} // namespace oracle

inline std::vector<VerifyCheck> run_verify(const VerifyOptions& opts = {}) {
  std::vector<VerifyCheck> out;
  auto check = [&](const std::string& name, double tol, const std::function<double()>& err) {
    VerifyCheck c;
    c.name = name;
    c.tolerance = tol;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.error = err();
      c.passed = std::isfinite(c.error) && c.error <= tol;
    } catch (const std::exception& e) {
      c.note = e.what();
      c.error = std::numeric_limits<double>::infinity();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(c));
  };

  const double lambda = 1.5;
  const auto disk = discretize_parametric(disk_shape(), 256);
  const auto disk_npo = assemble_npo(disk, opts.diagonal);

  check("disk npo constant eigenvector", 1e-8, [&] {
    const Eigen::VectorXd a1 = disk_npo.matrix * Eigen::VectorXd::Ones(disk.size());
    return (a1.array() - 0.5).abs().maxCoeff();
  });
  check("disk npo annihilates cos t", 1e-8, [&] {
    Eigen::VectorXd c(disk.size());
    for (int i = 0; i < disk.size(); ++i) c[i] = disk.nodes(0, i);
    return (disk_npo.matrix * c).cwiseAbs().maxCoeff();
  });
  check("disk first-order tensor pi/lambda", 1e-8, [&] {
    const auto m = assemble_gpt<double>(disk, disk_npo, lambda, 1);
    const double pt = std::numbers::pi / lambda;
    return std::max({std::abs(m.at({1, 0}, {1, 0}) - pt) / pt, std::abs(m.at({0, 1}, {0, 1}) - pt) / pt,
                     std::abs(m.at({1, 0}, {0, 1})), std::abs(m.at({0, 1}, {1, 0}))});
  });
  check("disk GPTs to order 2 vs Fourier closed form", 1e-7, [&] {
    const auto m = assemble_gpt<double>(disk, disk_npo, lambda, 2, 2);
    double worst = 0.0;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        worst = std::max(worst, std::abs(m.entries(r, c) - oracle::disk_gpt(m.row_alphas[r], m.col_betas[c], lambda)));
    return worst;
  });

  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto random_matrix = [&] {
    Eigen::Matrix2d a;
    a << u(rng), u(rng), u(rng), u(rng);
    return a;
  };
  const int trials = opts.quick ? 20 : 100;
  check("lift vs brute-force expansion", 1e-12, [&] {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Matrix2d a = random_matrix();
      const int d = t % 7;
      const Eigen::MatrixXd ref = oracle::lift_bruteforce(a, d);
      worst = std::max(worst, (lift(a, d) - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    return worst;
  });
  check("lift multiplicativity", 1e-12, [&] {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Matrix2d a = random_matrix(), b = random_matrix();
      const int d = t % 7;
      const Eigen::MatrixXd ab = lift(a * b, d);
      worst = std::max(worst,
                       (ab - lift(a, d) * lift(b, d)).cwiseAbs().maxCoeff() / std::max(1.0, ab.cwiseAbs().maxCoeff()));
    }
    return worst;
  });

  check("ellipse closure and area", 1e-10, [&] {
    const auto b = discretize_parametric(EllipseShape{2, 1}, 256);
    return std::max(b.closure(0).norm(), std::abs(b.area() - 2 * std::numbers::pi));
  });
  check("flower closure", 1e-10, [&] {
    const auto b = discretize_parametric(FlowerShape{}, 256);
    return b.closure(0).norm();
  });
  check("triangle closure and perimeter", 1e-6, [&] {
    const auto b = discretize_polygon(triangle_shape(1.0), 64, 3);
    return std::max(b.closure(0).norm(), std::abs(b.perimeter() - 3.0));
  });
  if (opts.quick) return out;

  check("two-pole lemniscate closure per component", 1e-8, [&] {
    TraceOptions t;
    t.box = {-2.5, 2.5, -2.5, 2.5};
    const auto b = trace_implicit(lemniscate_poly({Point(-1, 0), Point(1, 0)}, 0.5), t);
    if (b.components() != 2) return std::numeric_limits<double>::infinity();
    return std::max(b.closure(0).norm(), b.closure(1).norm());
  });
  check("ellipse boundary polynomial recovered", 1e-6, [&] {
    const auto b = discretize_parametric(EllipseShape{2, 1}, 512);
    const auto a = assemble_npo(b, opts.diagonal);
    const auto r = recover(assemble_gpt<double>(b, a, lambda, 2));
    return linf_distance(r.g, Poly2::from_terms({{0, 0, -4}, {2, 0, 1}, {0, 2, 4}}));
  });
  check("disk far field multipole vs layer potential", 1e-6, [&] {
    const auto f = far_field(disk, disk_npo, lambda, Poly2::from_terms({{1, 0, 1.0}}), Point(5, 0), 4);
    return std::abs(f.expansion - f.direct);
  });
  return out;
}

} // namespace gptshape
