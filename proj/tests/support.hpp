#pragma once

// Hand-rolled random generators for property tests. Fixed seeds keep runs
// reproducible; each test owns its generator.

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "gptshape/polynomial.hpp"

namespace gptshape::testing {

class Gen {
public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double angle() { return uniform(0.0, 2 * std::numbers::pi); }

  Point point(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }

  Poly2 poly(int degree, double scale = 1.0) {
    Poly2 p(degree);
    for (int i = 0; i < p.coeffs().size(); ++i) p.coeffs()[i] = uniform(-scale, scale);
    return p;
  }

  Eigen::VectorXd vector(int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  Eigen::Matrix2d matrix(double scale = 2.0) {
    Eigen::Matrix2d a;
    a << uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale);
    return a;
  }

  /// Random polynomial with unit coefficient norm.
  Poly2 unit_poly(int degree) {
    Poly2 p = poly(degree);
    return p / p.coeffs().norm();
  }

private:
  std::mt19937 rng_;
};

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace gptshape::testing
