#pragma once

// Boundary polynomial recovery from a GPT matrix: the coefficient vector of
// the minimal polynomial spans the numerical kernel of M (rows |alpha| <= 2d,
// columns |beta| <= d), extracted as the last right singular vector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/error.hpp"
#include "gptshape/gpt.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

inline constexpr double kNonzeroThreshold = kCoefficientNoise;
inline constexpr double kAmbiguousGap = 0.1;

struct RecoveryResult {
  Poly2 g;
  std::vector<double> singular_values; // descending
  double kernel_gap = 0.0;             // sigma_last / sigma_{last-1}
  double residual = 0.0;
  std::complex<double> lambda;
  int kernel_dimension = 1; // singular values below RecoverOptions::kernel_tol * sigma_max
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
};

/// Divides by the graded-lex maximal coefficient that is not noise.
inline Poly2 normalize(const Poly2& p, double eps_nz = kNonzeroThreshold) {
  const double mx = p.max_abs_coeff();
  if (!(mx > 0)) throw Error(ErrorCode::ZeroPolynomial, "cannot normalize the zero polynomial");
  const auto& c = p.coeffs();
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    if (std::abs(c[i]) > eps_nz * mx) return p / c[i];
  throw Error(ErrorCode::ZeroPolynomial, "all coefficients below threshold");
}

/// ||M p||_2 / (||M||_F ||p||_2).
template <class Scalar>
inline double kernel_residual(const GptMatrix<Scalar>& m, const Poly2& p) {
  if (p.effective_degree() > m.d) throw Error(ErrorCode::DegreeMismatch, "polynomial degree exceeds GPT column degree");
  const Eigen::VectorXd v = p.with_degree(m.d).coeffs();
  const double denom = m.entries.norm() * v.norm();
  if (denom == 0) return 0.0;
  return (m.entries * v.template cast<Scalar>()).norm() / denom;
}

struct RecoverOptions {
  /// When the numerical kernel has dimension > 1 (d above the boundary's true
  /// degree, so every kernel vector is g times a lower-degree factor), return
  /// the kernel element of lowest degree instead of an arbitrary one.
  bool minimal_degree = false;
  double kernel_tol = 1e-10;
};

namespace detail {

/// Orthonormal kernel basis -> its lowest-degree member. Each pass removes
/// the top degree block if some combination of the basis vectors annihilates it.
template <class Matrix>
inline Matrix reduce_kernel_degree(Matrix k, int d) {
  for (int top = d; top >= 1 && k.cols() > 1; --top) {
    const Matrix block = k.middleRows(basis_size(top - 1), top + 1);
    Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > 1e-8) ++rank;
    const int nullity = static_cast<int>(k.cols()) - rank;
    if (nullity == 0) break;
    k = (k * svd.matrixV().rightCols(nullity)).eval();
  }
  return k;
}

} // namespace detail

template <class Scalar>
inline RecoveryResult recover(const GptMatrix<Scalar>& m, const RecoverOptions& opts = {}) {
  using Matrix = typename GptMatrix<Scalar>::Matrix;
  if (m.rows() <= m.cols()) throw Error(ErrorCode::InvalidArgument, "GPT matrix needs more rows than columns");
  Eigen::JacobiSVD<Matrix> svd(m.entries, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const int n = static_cast<int>(s.size());

  RecoveryResult r;
  r.lambda = std::complex<double>(m.lambda);
  r.singular_values.assign(s.data(), s.data() + n);
  r.kernel_gap = n >= 2 && s[n - 2] > 0 ? s[n - 1] / s[n - 2] : 1.0;
  r.kernel_dimension = 0;
  for (int i = 0; i < n; ++i)
    if (s[i] <= opts.kernel_tol * s[0]) ++r.kernel_dimension;
  r.kernel_dimension = std::max(r.kernel_dimension, 1);

  Matrix v = svd.matrixV().col(n - 1);
  if (opts.minimal_degree && r.kernel_dimension > 1) {
    const Matrix reduced = detail::reduce_kernel_degree<Matrix>(svd.matrixV().rightCols(r.kernel_dimension), m.d);
    v = reduced.col(0);
    if (reduced.cols() < r.kernel_dimension) r.flags.push_back("KernelReduced");
  }

  // Singular vectors of a complex matrix carry an arbitrary phase; remove it
  // with the largest entry before taking the real part.
  Eigen::Index imax = 0;
  v.col(0).cwiseAbs().maxCoeff(&imax);
  const Scalar phase = v(imax, 0) / std::abs(v(imax, 0));
  Eigen::VectorXd coeffs(n);
  for (int i = 0; i < n; ++i) coeffs[i] = std::real(v(i, 0) / phase);

  r.g = normalize(Poly2(m.d, coeffs));
  r.residual = kernel_residual(m, r.g);
  if (r.kernel_gap > kAmbiguousGap) r.flags.push_back("AmbiguousKernel");
  return r;
}

inline double linf_distance(const Poly2& a, const Poly2& b) {
  const int d = std::max(a.degree(), b.degree());
  return (a.with_degree(d).coeffs() - b.with_degree(d).coeffs()).cwiseAbs().maxCoeff();
}

/// Recovers at two contrast values and compares.
inline RecoveryResult recover_crossvalidated(const DiscretizedBoundary& b, int d, double lambda1, double lambda2) {
  if (lambda1 == lambda2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs two distinct lambdas");
  const NpoMatrix a = assemble_npo(b);
  RecoveryResult r1 = recover(assemble_gpt<double>(b, a, lambda1, d));
  RecoveryResult r2 = recover(assemble_gpt<double>(b, a, lambda2, d));
  if (r1.has_flag("AmbiguousKernel") && r2.has_flag("AmbiguousKernel"))
    throw Error(ErrorCode::AmbiguousKernel,
                "kernel not one-dimensional at either lambda (gaps " + std::to_string(r1.kernel_gap) + ", " +
                    std::to_string(r2.kernel_gap) + "); check the degree");
  if (linf_distance(r1.g, r2.g) > 1e-3) {
    RecoveryResult& best = r2.residual < r1.residual ? r2 : r1;
    best.flags.push_back("LambdaSuspect");
    return best;
  }
  return r1;
}

struct DegreeScanRow {
  int d = 0;
  double residual = 0.0;
  double kernel_gap = 0.0;
  Poly2 g;
};

/// Recovery at every degree 1..d_max using leading sub-blocks of one matrix.
template <class Scalar>
inline std::vector<DegreeScanRow> scan_degrees(const GptMatrix<Scalar>& m, int d_max = -1) {
  if (d_max < 0) d_max = m.d;
  std::vector<DegreeScanRow> rows;
  for (int d = 1; d <= d_max; ++d) {
    if (d > m.d || 2 * d > m.row_degree) break;
    const auto r = recover(m.truncated(d));
    rows.push_back({d, r.residual, r.kernel_gap, r.g});
  }
  return rows;
}

struct LambdaEstimate {
  double lambda = 0.0;
  double misfit = 0.0;
  std::vector<std::pair<double, double>> curve; // (lambda, misfit) on the grid
};

/// argmin_lambda ||M(lambda, candidate) - M_target||_F over a grid, refined by golden section.
inline LambdaEstimate estimate_lambda(const GptMatrix<double>& target, const DiscretizedBoundary& candidate,
                                      std::vector<double> grid) {
  if (grid.size() < 3) throw Error(ErrorCode::InvalidArgument, "lambda grid needs at least 3 points");
  std::sort(grid.begin(), grid.end());
  for (double l : grid)
    if (!(std::abs(l) > 0.5)) throw Error(ErrorCode::OutsideResolventBound, "grid value inside [-1/2, 1/2]");
  const NpoMatrix a = assemble_npo(candidate);
  auto misfit = [&](double l) {
    const auto m = assemble_gpt<double>(candidate, a, l, target.d, target.row_degree);
    return (m.entries - target.entries).norm();
  };

  LambdaEstimate est;
  for (double l : grid) est.curve.emplace_back(l, misfit(l));
  auto [lo_it, hi_it] = std::minmax_element(est.curve.begin(), est.curve.end(),
                                            [](const auto& x, const auto& y) { return x.second < y.second; });
  if (hi_it->second - lo_it->second < 1e-12)
    throw Error(ErrorCode::Uninformative, "misfit is flat over the lambda grid");
  const std::size_t ib = static_cast<std::size_t>(lo_it - est.curve.begin());

  // Bracket between the grid neighbours; never cross the excluded interval.
  double lo = grid[ib > 0 ? ib - 1 : ib], hi = grid[ib + 1 < grid.size() ? ib + 1 : ib];
  if (lo * hi < 0) (grid[ib] > 0 ? lo : hi) = grid[ib];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = misfit(x1), f2 = misfit(x2);
  while (hi - lo > 1e-8 * std::max(1.0, std::abs(lo))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = misfit(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = misfit(x2);
    }
  }
  est.lambda = 0.5 * (lo + hi);
  est.misfit = misfit(est.lambda);
  if (lo_it->second < est.misfit) {
    est.lambda = lo_it->first;
    est.misfit = lo_it->second;
  }
  return est;
}

} // namespace gptshape
