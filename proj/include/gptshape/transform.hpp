#pragma once

// Similarity transforms acting on form coefficients, and shape matching by
// minimizing the coefficient misfit over rotations and scalings.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/error.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

struct Similarity {
  double s = 1.0;
  double theta = 0.0;
  bool reflected = false; // composes with diag(1, -1) first; not part of O_s(2)

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d a;
    const double c = std::cos(theta), sn = std::sin(theta);
    a << c, -sn, sn, c;
    a *= s;
    if (reflected) a.col(1) *= -1.0;
    return a;
  }
  Point apply(const Point& x) const { return matrix() * x; }
};

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

} // namespace detail

/// (d+1)x(d+1) matrix with x'_[d] = A_[d] x_[d] for x' = A x, where
/// x_[d] = (x1^d, x1^(d-1) x2, ..., x2^d). Row h expands
/// (a11 x1 + a12 x2)^(d-h) (a21 x1 + a22 x2)^h as a binomial convolution.
inline Eigen::MatrixXd lift(const Eigen::Matrix2d& a, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative lift degree");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d + 1, d + 1);
  std::vector<double> c(d + 1), e(d + 1);
  for (int h = 0; h <= d; ++h) {
    for (int j = 0; j <= d; ++j) {
      c[j] = j <= d - h ? detail::binomial(d - h, j) * std::pow(a(0, 0), d - h - j) * std::pow(a(0, 1), j) : 0.0;
      e[j] = j <= h ? detail::binomial(h, j) * std::pow(a(1, 0), h - j) * std::pow(a(1, 1), j) : 0.0;
    }
    for (int j = 0; j <= d; ++j) {
      double s = 0.0;
      for (int p = 0; p <= j; ++p) s += c[p] * e[j - p];
      out(h, j) = s;
    }
  }
  return out;
}

/// Polynomial whose zero set is A(zero set of p): block j becomes g_[j] A^{-1}_[j].
inline Poly2 push_forward(const Poly2& p, const Eigen::Matrix2d& a) {
  if (std::abs(a.determinant()) == 0) throw Error(ErrorCode::InvalidArgument, "singular transform");
  const Eigen::Matrix2d inv = a.inverse();
  FormBlocks f = to_forms(p);
  for (int j = 0; j <= f.degree(); ++j) f.blocks[j] = (f.blocks[j].transpose() * lift(inv, j)).transpose();
  return from_forms(f);
}

inline Poly2 push_forward(const Poly2& p, const Similarity& t) { return push_forward(p, t.matrix()); }

struct MatchOptions {
  int angles = 180;
  int scales = 40;
  double s_min = 0.1;
  double s_max = 10.0;
  double simplex_tol = 1e-10;
  int max_iterations = 500;
  bool allow_reflection = false;
  double alternate_ratio = 1.5;
  double alternate_floor = 1e-8; // absolute slack so exact symmetric minima are all reported
  int refine_candidates = 12;
};

struct MatchCandidate {
  Similarity transform;
  int sign = 1;
  double epsilon = 0.0;
};

struct MatchResult {
  Similarity best;
  int sign = 1;
  double epsilon_match = 0.0;
  std::vector<MatchCandidate> alternates;
  Boundedness observed_boundedness = Boundedness::Inconclusive;
};

namespace detail {

inline Eigen::VectorXd flatten(const FormBlocks& f) {
  int n = 0;
  for (const auto& b : f.blocks) n += static_cast<int>(b.size());
  Eigen::VectorXd v(n);
  int k = 0;
  for (const auto& b : f.blocks) {
    v.segment(k, b.size()) = b;
    k += static_cast<int>(b.size());
  }
  return v;
}

/// Matching objective with blocks of the reference pushed forward by T and
/// renormalized to unit length before comparison with the observation.
class MatchObjective {
public:
  MatchObjective(const Poly2& ref, const Poly2& obs, int degree)
      : ref_(to_forms(ref.with_degree(degree))), obs_(flatten(to_forms(obs.with_degree(degree)))) {
    obs_ /= obs_.norm();
  }

  double operator()(const Similarity& t, int sign) const {
    const Eigen::Matrix2d inv = t.matrix().inverse();
    Eigen::VectorXd v(obs_.size());
    int k = 0;
    for (int j = 0; j <= ref_.degree(); ++j) {
      v.segment(k, j + 1) = (ref_.blocks[j].transpose() * lift(inv, j)).transpose();
      k += j + 1;
    }
    const double nv = v.norm();
    if (!(nv > 0)) return 4.0;
    return (sign * obs_ - v / nv).squaredNorm();
  }

private:
  FormBlocks ref_;
  Eigen::VectorXd obs_;
};

inline double wrap_angle(double t) {
  const double two_pi = 2 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  return t < 0 ? t + two_pi : t;
}

/// Nelder-Mead on (log s, theta).
template <class F>
inline std::pair<Eigen::Vector2d, double> nelder_mead(const F& f, Eigen::Vector2d x0, Eigen::Vector2d step,
                                                     double tol, int max_iter) {
  std::array<Eigen::Vector2d, 3> x{x0, x0 + Eigen::Vector2d(step.x(), 0), x0 + Eigen::Vector2d(0, step.y())};
  std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const auto xs = x;
    const auto fs = fx;
    for (int k = 0; k < 3; ++k) {
      x[k] = xs[idx[k]];
      fx[k] = fs[idx[k]];
    }
    const double diam = std::max((x[1] - x[0]).norm(), (x[2] - x[0]).norm());
    if (diam < tol) break;
    const Eigen::Vector2d centroid = 0.5 * (x[0] + x[1]);
    const Eigen::Vector2d xr = centroid + (centroid - x[2]);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const Eigen::Vector2d xe = centroid + 2.0 * (centroid - x[2]);
      const double fe = f(xe);
      if (fe < fr) {
        x[2] = xe;
        fx[2] = fe;
      } else {
        x[2] = xr;
        fx[2] = fr;
      }
    } else if (fr < fx[1]) {
      x[2] = xr;
      fx[2] = fr;
    } else {
      const bool outside = fr < fx[2];
      const Eigen::Vector2d xc = outside ? Eigen::Vector2d(centroid + 0.5 * (xr - centroid))
                                         : Eigen::Vector2d(centroid + 0.5 * (x[2] - centroid));
      const double fc = f(xc);
      if (fc < (outside ? fr : fx[2])) {
        x[2] = xc;
        fx[2] = fc;
      } else {
        for (int k = 1; k < 3; ++k) {
          x[k] = x[0] + 0.5 * (x[k] - x[0]);
          fx[k] = f(x[k]);
        }
      }
    }
  }
  const auto best = std::min_element(fx.begin(), fx.end()) - fx.begin();
  return {x[best], fx[best]};
}

} // namespace detail

/// Finds the similarity T (and coefficient sign) carrying g_ref onto g_obs.
inline MatchResult match(const Poly2& g_ref, const Poly2& g_obs, const MatchOptions& opts = {}) {
  if (g_ref.is_zero() || g_obs.is_zero()) throw Error(ErrorCode::DegenerateInput, "zero polynomial in match");
  // Degree bounds must agree; the effective degrees inside them may differ.
  if (g_ref.degree() != g_obs.degree())
    throw Error(ErrorCode::DegreeMismatch, "reference degree bound " + std::to_string(g_ref.degree()) +
                                               " vs observed degree bound " + std::to_string(g_obs.degree()));
  MatchResult result;
  result.observed_boundedness = boundedness_check(g_obs);
  if (result.observed_boundedness == Boundedness::OddDegreeUnbounded)
    throw Error(ErrorCode::RejectedInput, "observed polynomial has odd degree: its level sets are unbounded");

  const detail::MatchObjective objective(g_ref, g_obs, g_ref.degree());

  struct Cell {
    int ia, is, sign, refl;
    double value;
  };
  const double two_pi = 2 * std::numbers::pi;
  const double ls_min = std::log(opts.s_min), ls_max = std::log(opts.s_max);
  auto angle_at = [&](int ia) { return two_pi * ia / opts.angles; };
  auto logs_at = [&](int is) { return opts.scales > 1 ? ls_min + (ls_max - ls_min) * is / (opts.scales - 1) : ls_min; };

  const int branches = opts.allow_reflection ? 2 : 1;
  // grid[refl][sign][is][ia]
  std::vector<double> grid(static_cast<size_t>(branches) * 2 * opts.scales * opts.angles);
  auto gidx = [&](int refl, int sg, int is, int ia) {
    return ((static_cast<size_t>(refl) * 2 + sg) * opts.scales + is) * opts.angles + ia;
  };
  for (int refl = 0; refl < branches; ++refl)
    for (int sg = 0; sg < 2; ++sg)
      for (int is = 0; is < opts.scales; ++is)
        for (int ia = 0; ia < opts.angles; ++ia)
          grid[gidx(refl, sg, is, ia)] =
              objective({std::exp(logs_at(is)), angle_at(ia), refl == 1}, sg == 0 ? 1 : -1);

  // Local minima of the grid (periodic in angle), best first.
  std::vector<Cell> minima;
  for (int refl = 0; refl < branches; ++refl)
    for (int sg = 0; sg < 2; ++sg)
      for (int is = 0; is < opts.scales; ++is)
        for (int ia = 0; ia < opts.angles; ++ia) {
          const double v = grid[gidx(refl, sg, is, ia)];
          bool local = true;
          for (int ds = -1; ds <= 1 && local; ++ds)
            for (int da = -1; da <= 1 && local; ++da) {
              if (!ds && !da) continue;
              const int js = is + ds;
              if (js < 0 || js >= opts.scales) continue;
              const int ja = (ia + da + opts.angles) % opts.angles;
              if (grid[gidx(refl, sg, js, ja)] < v) local = false;
            }
          if (local) minima.push_back({ia, is, sg == 0 ? 1 : -1, refl, v});
        }
  std::sort(minima.begin(), minima.end(), [](const Cell& a, const Cell& b) { return a.value < b.value; });
  if (static_cast<int>(minima.size()) > opts.refine_candidates) minima.resize(opts.refine_candidates);

  const Eigen::Vector2d step((ls_max - ls_min) / std::max(opts.scales - 1, 1), two_pi / opts.angles);
  std::vector<MatchCandidate> refined;
  for (const auto& c : minima) {
    const bool refl = c.refl == 1;
    auto f = [&](const Eigen::Vector2d& p) { return objective({std::exp(p.x()), p.y(), refl}, c.sign); };
    auto [p, v] = detail::nelder_mead(f, Eigen::Vector2d(logs_at(c.is), angle_at(c.ia)), step, opts.simplex_tol,
                                      opts.max_iterations);
    refined.push_back({{std::exp(p.x()), detail::wrap_angle(p.y()), refl}, c.sign, std::sqrt(std::max(v, 0.0))});
  }
  std::sort(refined.begin(), refined.end(),
            [](const MatchCandidate& a, const MatchCandidate& b) { return a.epsilon < b.epsilon; });

  result.best = refined.front().transform;
  result.sign = refined.front().sign;
  result.epsilon_match = refined.front().epsilon;
  const double cutoff = opts.alternate_ratio * result.epsilon_match + opts.alternate_floor;
  for (size_t i = 1; i < refined.size(); ++i) {
    if (refined[i].epsilon > cutoff) continue;
    // Skip duplicates that converged to the same minimum.
    bool dup = false;
    for (const auto& a : result.alternates)
      dup = dup || (std::abs(a.transform.s - refined[i].transform.s) < 1e-6 &&
                    std::abs(std::remainder(a.transform.theta - refined[i].transform.theta, two_pi)) < 1e-6 &&
                    a.sign == refined[i].sign && a.transform.reflected == refined[i].transform.reflected);
    dup = dup || (std::abs(result.best.s - refined[i].transform.s) < 1e-6 &&
                  std::abs(std::remainder(result.best.theta - refined[i].transform.theta, two_pi)) < 1e-6 &&
                  result.sign == refined[i].sign && result.best.reflected == refined[i].transform.reflected);
    if (!dup) result.alternates.push_back(refined[i]);
  }
  return result;
}

} // namespace gptshape
