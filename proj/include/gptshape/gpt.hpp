#pragma once

// Generalized polarization tensors
//
//   M_{alpha beta}(lambda, D) = int_{dD} y^beta phi_alpha(y) dsigma(y),
//   phi_alpha = (lambda I - K*)^{-1} [nu . grad x^alpha],
//
// plus harmonic combinations and the far-field expansion used to validate them.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/error.hpp"
#include "gptshape/geometry.hpp"
#include "gptshape/npo.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

struct Contrast {
  double k = 2.0;
  double lambda = 1.5;
  bool limit = false; // k = +inf, lambda attained as a limit
};

/// lambda = (k + 1) / (2 (k - 1)).
inline Contrast lambda_of_k(double k) {
  if (!(k >= 0)) throw Error(ErrorCode::InvalidArgument, "conductivity must be nonnegative");
  if (k == 1) throw Error(ErrorCode::NoContrast, "k = 1 carries no contrast");
  if (std::isinf(k)) return {k, 0.5, true};
  return {k, (k + 1) / (2 * (k - 1)), false};
}

/// Inverse map, k = (2 lambda + 1) / (2 lambda - 1).
inline double k_of_lambda(double lambda) {
  if (lambda == 0.5) return std::numeric_limits<double>::infinity();
  return (2 * lambda + 1) / (2 * lambda - 1);
}

template <class Scalar = double>
struct GptMatrix {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Scalar lambda{};
  int d = 0;          // column degree bound
  int row_degree = 0; // row degree bound, 2d by default
  std::vector<MultiIndex> row_alphas;
  std::vector<MultiIndex> col_betas;
  Matrix entries;

  int rows() const { return static_cast<int>(row_alphas.size()); }
  int cols() const { return static_cast<int>(col_betas.size()); }

  /// Row position of alpha (1 <= |alpha| <= row_degree).
  static int row_of(MultiIndex alpha) { return ordinal(alpha) - 1; }
  /// Column position of beta (|beta| <= d).
  static int col_of(MultiIndex beta) { return ordinal(beta); }

  Scalar at(MultiIndex alpha, MultiIndex beta) const { return entries(row_of(alpha), col_of(beta)); }

  /// Leading sub-block with rows |alpha| <= rdeg and columns |beta| <= cdeg.
  GptMatrix truncated(int cdeg, int rdeg) const {
    if (cdeg > d || rdeg > row_degree) throw Error(ErrorCode::InvalidArgument, "cannot enlarge a GPT matrix");
    GptMatrix out;
    out.lambda = lambda;
    out.d = cdeg;
    out.row_degree = rdeg;
    out.row_alphas = enumerate_multiindices(1, rdeg);
    out.col_betas = enumerate_multiindices(0, cdeg);
    out.entries = entries.topLeftCorner(out.rows(), out.cols());
    return out;
  }
  GptMatrix truncated(int cdeg) const { return truncated(cdeg, 2 * cdeg); }
};

/// Assembles M_{alpha beta} for 1 <= |alpha| <= row_degree, 0 <= |beta| <= d.
/// All rows share one factorization of lambda I - K*. row_degree < 0 means 2d.
template <class Scalar = double>
inline GptMatrix<Scalar> assemble_gpt(const DiscretizedBoundary& b, const NpoMatrix& a, Scalar lambda, int d,
                                      int row_degree = -1) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative GPT degree");
  if (row_degree < 0) row_degree = 2 * d;
  if (row_degree < 1) throw Error(ErrorCode::InvalidArgument, "row degree must be at least 1");
  const Resolvent<Scalar> solver(a, lambda);

  GptMatrix<Scalar> m;
  m.lambda = lambda;
  m.d = d;
  m.row_degree = row_degree;
  m.row_alphas = enumerate_multiindices(1, row_degree);
  m.col_betas = enumerate_multiindices(0, d);

  const int n = b.size();
  Eigen::MatrixXd rhs(n, m.rows());
  for (int r = 0; r < m.rows(); ++r) rhs.col(r) = neumann_data(b, m.row_alphas[r]);
  typename GptMatrix<Scalar>::Matrix phi(n, m.rows());
  for (int r = 0; r < m.rows(); ++r) phi.col(r) = solver.solve(rhs.col(r));

  // Weighted moments: moments(i, c) = w_i x_i^beta_c.
  Eigen::MatrixXd moments(n, m.cols());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m.cols(); ++c) moments(i, c) = b.weights[i] * monomial(b.node(i), m.col_betas[c]);
  m.entries = phi.transpose() * moments.template cast<Scalar>();
  return m;
}

inline void require_harmonic(const Poly2& p, const char* name) {
  const double scale = std::max(1.0, p.max_abs_coeff());
  if (p.laplacian().max_abs_coeff() > 1e-10 * scale)
    throw Error(ErrorCode::NotHarmonic, std::string(name) + " is not a harmonic polynomial");
}

/// sum_{alpha, beta} a_alpha b_beta M_{alpha beta} for harmonic a, b.
/// The constant term of a has zero Neumann data and is skipped.
template <class Scalar>
inline Scalar harmonic_combination(const GptMatrix<Scalar>& m, const Poly2& a, const Poly2& b) {
  require_harmonic(a, "a");
  require_harmonic(b, "b");
  if (a.effective_degree() > m.row_degree || b.effective_degree() > m.d)
    throw Error(ErrorCode::InvalidArgument, "harmonic polynomial degree exceeds GPT index range");
  Scalar s{};
  for (int r = 0; r < m.rows(); ++r) {
    const double ca = a[m.row_alphas[r]];
    if (ca == 0) continue;
    for (int c = 0; c < m.cols(); ++c) {
      const double cb = b[m.col_betas[c]];
      if (cb != 0) s += ca * cb * m.entries(r, c);
    }
  }
  return s;
}

/// Real and imaginary parts of z^m as harmonic polynomials.
inline std::pair<Poly2, Poly2> harmonic_basis(int m) {
  Poly2 re(m), im(m);
  // z^m = sum_j C(m, j) x1^(m-j) (i x2)^j
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    const double c = binom;
    switch (j % 4) {
    case 0: re[{m - j, j}] = c; break;
    case 1: im[{m - j, j}] = c; break;
    case 2: re[{m - j, j}] = -c; break;
    case 3: im[{m - j, j}] = -c; break;
    }
    binom = binom * (m - j) / (j + 1);
  }
  return {re, im};
}

/// d^alpha Gamma(x) for Gamma(x) = ln|x| / (2 pi), |alpha| >= 1.
inline double fundamental_derivative(MultiIndex alpha, const Point& x) {
  const int n = alpha.order();
  if (n == 0) return std::log(x.norm()) / (2 * std::numbers::pi);
  // d_x1^a1 d_x2^a2 Re f = Re(i^a2 f^(n)) for holomorphic f = log z.
  const std::complex<double> z(x.x(), x.y());
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  const std::complex<double> dn = (n % 2 == 1 ? 1.0 : -1.0) * fact / std::pow(z, n);
  std::complex<double> ipow = 1.0;
  for (int k = 0; k < alpha.a2; ++k) ipow *= std::complex<double>(0, 1);
  return (ipow * dn).real() / (2 * std::numbers::pi);
}

struct FarField {
  double expansion = 0.0; // truncated multipole sum built from GPTs
  double direct = 0.0;    // single-layer quadrature S[(lambda I - K*)^{-1} d_nu h](x)
};

/// u(x) - h(x) for the transmission problem with harmonic excitation h, two ways.
inline FarField far_field(const DiscretizedBoundary& b, const NpoMatrix& a, double lambda, const Poly2& h,
                          const Point& x, int truncation) {
  require_harmonic(h, "h");
  if (truncation < 1) throw Error(ErrorCode::InvalidArgument, "truncation degree must be at least 1");
  // Multipole convergence needs |x| > max |y|; the factor two keeps the tail small.
  if (x.norm() < 2 * b.max_radius())
    throw Error(ErrorCode::TooClose, "evaluation point must satisfy |x| >= 2 max|y| on the boundary");
  const int hdeg = std::max(h.effective_degree(), 0);
  FarField out;
  if (hdeg == 0) return out;

  // Source index beta runs over h's monomials, moment index alpha over 1..K.
  const auto m = assemble_gpt<double>(b, a, lambda, truncation, hdeg);
  for (int c = 1; c < m.cols(); ++c) {
    const MultiIndex alpha = m.col_betas[c];
    double moment = 0.0;
    for (int r = 0; r < m.rows(); ++r) moment += h[m.row_alphas[r]] * m.entries(r, c);
    double afact = 1.0;
    for (int k = 2; k <= alpha.a1; ++k) afact *= k;
    for (int k = 2; k <= alpha.a2; ++k) afact *= k;
    const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
    out.expansion += sign / afact * fundamental_derivative(alpha, x) * moment;
  }

  Eigen::VectorXd dnh(b.size());
  for (int i = 0; i < b.size(); ++i) dnh[i] = h.gradient(b.node(i)).dot(b.normals.col(i));
  const Eigen::VectorXd phi = resolve<double>(a, lambda, dnh);
  for (int i = 0; i < b.size(); ++i)
    out.direct += b.weights[i] * std::log((x - b.node(i)).norm()) / (2 * std::numbers::pi) * phi[i];
  return out;
}

} // namespace gptshape
