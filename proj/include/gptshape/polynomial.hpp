#pragma once

// Dense bivariate polynomials in graded-lex coefficient order.
//
// Ordering: monomials x1^a1 x2^a2 are sorted first by total degree, then by
// ascending a1 within a degree block:
//
//   (0,0) (0,1) (1,0) (0,2) (1,1) (2,0) (0,3) ...
//
// so a polynomial of degree d stores (d+1)(d+2)/2 coefficients and the
// x1^d coefficient sits in the last slot.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gptshape/error.hpp"

namespace gptshape {

using Point = Eigen::Vector2d;

/// Coefficients below this fraction of max|c| are treated as numerical noise
/// when deciding degrees and normalization slots.
inline constexpr double kCoefficientNoise = 1e-8;

/// Number of monomials of total degree at most d, r_d = (d+1)(d+2)/2.
constexpr int basis_size(int d) { return d < 0 ? 0 : (d + 1) * (d + 2) / 2; }

struct MultiIndex {
  int a1 = 0;
  int a2 = 0;

  constexpr int order() const { return a1 + a2; }

  constexpr auto operator<=>(const MultiIndex& o) const {
    if (auto c = order() <=> o.order(); c != 0) return c;
    return a1 <=> o.a1;
  }
  constexpr bool operator==(const MultiIndex&) const = default;
};

constexpr int ordinal(MultiIndex alpha) { return basis_size(alpha.order() - 1) + alpha.a1; }

constexpr MultiIndex multiindex_at(int i) {
  int n = 0;
  while (basis_size(n) <= i) ++n;
  const int a1 = i - basis_size(n - 1);
  return {a1, n - a1};
}

/// All multi-indices with lo <= |alpha| <= hi, in graded-lex order.
inline std::vector<MultiIndex> enumerate_multiindices(int lo, int hi) {
  std::vector<MultiIndex> out;
  for (int i = basis_size(lo - 1); i < basis_size(hi); ++i) out.push_back(multiindex_at(i));
  return out;
}

inline double monomial(const Point& x, MultiIndex alpha) {
  return std::pow(x.x(), alpha.a1) * std::pow(x.y(), alpha.a2);
}

class Poly2 {
public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int degree) : degree_(degree), coeffs_(Eigen::VectorXd::Zero(basis_size(degree))) {
    if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  }
  Poly2(int degree, Eigen::VectorXd coeffs) : degree_(degree), coeffs_(std::move(coeffs)) {
    if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
    if (coeffs_.size() != basis_size(degree))
      throw Error(ErrorCode::InvalidArgument, "coefficient count does not match (d+1)(d+2)/2");
  }

  /// Builds a polynomial from (a1, a2, coefficient) terms; degree is the largest order seen.
  struct Term {
    int a1;
    int a2;
    double c;
  };
  static Poly2 from_terms(std::initializer_list<Term> terms, int min_degree = 0) {
    int d = min_degree;
    for (const auto& t : terms) d = std::max(d, t.a1 + t.a2);
    Poly2 p(d);
    for (const auto& t : terms) p[{t.a1, t.a2}] += t.c;
    return p;
  }

  int degree() const { return degree_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double operator[](MultiIndex a) const {
    return a.order() <= degree_ ? coeffs_[ordinal(a)] : 0.0;
  }
  double& operator[](MultiIndex a) {
    if (a.order() > degree_) throw Error(ErrorCode::InvalidArgument, "monomial exceeds degree bound");
    return coeffs_[ordinal(a)];
  }

  double max_abs_coeff() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }
  bool is_zero() const { return max_abs_coeff() == 0.0; }

  /// Highest degree whose block holds a coefficient above rel_tol * max|c|; -1 for zero.
  int effective_degree(double rel_tol = 0.0) const {
    const double cut = rel_tol * max_abs_coeff();
    for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
      if (std::abs(coeffs_[i]) > cut && coeffs_[i] != 0.0) return multiindex_at(i).order();
    return -1;
  }

  /// Same polynomial with a different degree bound (dropping only zero blocks when shrinking).
  Poly2 with_degree(int d) const {
    Poly2 out(d);
    const int m = std::min(basis_size(d), basis_size(degree_));
    out.coeffs_.head(m) = coeffs_.head(m);
    return out;
  }

  double eval(const Point& x) const {
    // Powers are tabulated once; each term is a single product.
    const auto px = powers(x.x()), py = powers(x.y());
    double s = 0.0;
    for (int i = 0; i < coeffs_.size(); ++i) {
      const auto a = multiindex_at(i);
      s += coeffs_[i] * px[a.a1] * py[a.a2];
    }
    return s;
  }

  Eigen::Vector2d gradient(const Point& x) const {
    const auto px = powers(x.x()), py = powers(x.y());
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int i = 0; i < coeffs_.size(); ++i) {
      const auto a = multiindex_at(i);
      if (a.a1 > 0) g.x() += coeffs_[i] * a.a1 * px[a.a1 - 1] * py[a.a2];
      if (a.a2 > 0) g.y() += coeffs_[i] * a.a2 * px[a.a1] * py[a.a2 - 1];
    }
    return g;
  }

  Eigen::Matrix2d hessian(const Point& x) const {
    const auto px = powers(x.x()), py = powers(x.y());
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (int i = 0; i < coeffs_.size(); ++i) {
      const auto a = multiindex_at(i);
      const double c = coeffs_[i];
      if (a.a1 > 1) h(0, 0) += c * a.a1 * (a.a1 - 1) * px[a.a1 - 2] * py[a.a2];
      if (a.a2 > 1) h(1, 1) += c * a.a2 * (a.a2 - 1) * px[a.a1] * py[a.a2 - 2];
      if (a.a1 > 0 && a.a2 > 0) h(0, 1) += c * a.a1 * a.a2 * px[a.a1 - 1] * py[a.a2 - 1];
    }
    h(1, 0) = h(0, 1);
    return h;
  }

  /// Coefficients of the Laplacian, degree max(d-2, 0).
  Poly2 laplacian() const {
    Poly2 out(std::max(degree_ - 2, 0));
    for (int i = 0; i < coeffs_.size(); ++i) {
      const auto a = multiindex_at(i);
      if (a.a1 > 1) out[{a.a1 - 2, a.a2}] += coeffs_[i] * a.a1 * (a.a1 - 1);
      if (a.a2 > 1) out[{a.a1, a.a2 - 2}] += coeffs_[i] * a.a2 * (a.a2 - 1);
    }
    return out;
  }

  Poly2 operator*(double s) const { return Poly2(degree_, coeffs_ * s); }
  Poly2 operator/(double s) const { return Poly2(degree_, coeffs_ / s); }

  Poly2 operator+(const Poly2& o) const {
    const int d = std::max(degree_, o.degree_);
    Poly2 out = with_degree(d);
    out.coeffs_ += o.with_degree(d).coeffs_;
    return out;
  }
  Poly2 operator-(const Poly2& o) const { return *this + o * -1.0; }

  Poly2 operator*(const Poly2& o) const {
    Poly2 out(degree_ + o.degree_);
    for (int i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] == 0.0) continue;
      const auto a = multiindex_at(i);
      for (int j = 0; j < o.coeffs_.size(); ++j) {
        const auto b = multiindex_at(j);
        out[{a.a1 + b.a1, a.a2 + b.a2}] += coeffs_[i] * o.coeffs_[j];
      }
    }
    return out;
  }

private:
  std::vector<double> powers(double v) const {
    std::vector<double> p(degree_ + 1, 1.0);
    for (int k = 1; k <= degree_; ++k) p[k] = p[k - 1] * v;
    return p;
  }

  int degree_;
  Eigen::VectorXd coeffs_;
};

// ---------------------------------------------------------------------------
// Homogeneous forms.
//
// Block j holds the degree-j coefficients in the basis
//   x1^j, x1^(j-1) x2, ..., x2^j,
// i.e. entry h of block j multiplies x1^(j-h) x2^h.

struct FormBlocks {
  std::vector<Eigen::VectorXd> blocks;

  int degree() const { return static_cast<int>(blocks.size()) - 1; }
};

constexpr MultiIndex form_index(int j, int h) { return {j - h, h}; }

inline FormBlocks to_forms(const Poly2& p) {
  FormBlocks f;
  for (int j = 0; j <= p.degree(); ++j) {
    Eigen::VectorXd b(j + 1);
    for (int h = 0; h <= j; ++h) b[h] = p[form_index(j, h)];
    f.blocks.push_back(std::move(b));
  }
  return f;
}

inline Poly2 from_forms(const FormBlocks& f) {
  Poly2 p(std::max(f.degree(), 0));
  for (int j = 0; j <= f.degree(); ++j) {
    if (f.blocks[j].size() != j + 1) throw Error(ErrorCode::InvalidArgument, "form block has wrong length");
    for (int h = 0; h <= j; ++h) p[form_index(j, h)] = f.blocks[j][h];
  }
  return p;
}

/// Symmetric (k+1)x(k+1) matrix Q with x_[k]^T Q x_[k] equal to the given degree-2k form.
/// The coefficient of x1^(2k-m) x2^m is split equally over all (h, j) with h + j = m.
inline Eigen::MatrixXd quad_form_matrix(const Eigen::VectorXd& top_block) {
  const int deg = static_cast<int>(top_block.size()) - 1;
  if (deg < 0) throw Error(ErrorCode::InvalidArgument, "empty form");
  if (deg % 2 != 0) throw Error(ErrorCode::OddDegree, "leading form has odd degree " + std::to_string(deg));
  const int k = deg / 2;
  Eigen::MatrixXd q(k + 1, k + 1);
  for (int h = 0; h <= k; ++h) {
    for (int j = 0; j <= k; ++j) {
      const int m = h + j;
      const int pairs = std::min(m, k) - std::max(0, m - k) + 1;
      q(h, j) = top_block[m] / pairs;
    }
  }
  return q;
}

/// Re-expands x_[k]^T Q x_[k] into a degree-2k form block.
inline Eigen::VectorXd form_from_quad_matrix(const Eigen::MatrixXd& q) {
  const int k = static_cast<int>(q.rows()) - 1;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * k + 1);
  for (int h = 0; h <= k; ++h)
    for (int j = 0; j <= k; ++j) b[h + j] += q(h, j);
  return b;
}

enum class Boundedness { CertifiedBounded, Inconclusive, OddDegreeUnbounded };

constexpr const char* to_string(Boundedness b) {
  switch (b) {
  case Boundedness::CertifiedBounded: return "CertifiedBounded";
  case Boundedness::Inconclusive: return "Inconclusive";
  case Boundedness::OddDegreeUnbounded: return "OddDegreeUnbounded";
  }
  return "Unknown";
}

/// Certifies a bounded zero set when the leading form's quadratic matrix is definite.
/// Nonsingular-but-indefinite leading forms (x1^2 - x2^2 - 1) are reported Inconclusive.
inline Boundedness boundedness_check(const Poly2& p, double rel_tol_pd = 1e-10) {
  if (p.is_zero()) throw Error(ErrorCode::DegenerateInput, "zero polynomial");
  const int deg = p.effective_degree(kCoefficientNoise);
  if (deg % 2 != 0) return Boundedness::OddDegreeUnbounded;
  if (deg == 0) return Boundedness::Inconclusive; // nonzero constant: empty zero set
  const auto forms = to_forms(p);
  const Eigen::MatrixXd q = quad_form_matrix(forms.blocks[deg]);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  const double tol = rel_tol_pd * largest;
  const bool positive = (ev.array() > tol).all();
  const bool negative = (ev.array() < -tol).all();
  return positive || negative ? Boundedness::CertifiedBounded : Boundedness::Inconclusive;
}

} // namespace gptshape
