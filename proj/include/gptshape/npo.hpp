#pragma once

// Nystrom discretization of the Neumann-Poincare operator
//
//   K*[phi](x) = 1/(2 pi) p.v. int <x - y, nu(x)> / |x - y|^2 phi(y) dsigma(y)
//
// and dense resolvent solves (lambda I - K*) phi = f.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "gptshape/error.hpp"
#include "gptshape/geometry.hpp"
#include "gptshape/polynomial.hpp"

namespace gptshape {

/// Self-interaction rule for the diagonal. Only CurvatureLimit is correct;
/// Zero exists so the verification suite can prove it detects a broken rule.
enum class DiagonalRule { CurvatureLimit, Zero };

struct NpoMatrix {
  Eigen::MatrixXd matrix;
  const DiscretizedBoundary* boundary = nullptr;

  int size() const { return static_cast<int>(matrix.rows()); }
};

inline NpoMatrix assemble_npo(const DiscretizedBoundary& b, DiagonalRule rule = DiagonalRule::CurvatureLimit) {
  const int n = b.size();
  if (n == 0) throw Error(ErrorCode::DegenerateMesh, "empty boundary");
  const double scale = std::max(b.max_radius(), 1e-300);
  const double inv2pi = 0.5 / std::numbers::pi;
  NpoMatrix a;
  a.boundary = &b;
  a.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d xi = b.nodes.col(i), nu = b.normals.col(i);
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        a.matrix(i, i) = rule == DiagonalRule::CurvatureLimit ? b.curvatures[i] * 0.5 * inv2pi * b.weights[i] : 0.0;
        continue;
      }
      const Eigen::Vector2d r = xi - b.nodes.col(j);
      const double r2 = r.squaredNorm();
      if (r2 <= 1e-28 * scale * scale)
        throw Error(ErrorCode::DegenerateMesh, "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      a.matrix(i, j) = inv2pi * r.dot(nu) / r2 * b.weights[j];
    }
  }
  return a;
}

/// Nodal values of nu . grad(x^alpha).
inline Eigen::VectorXd neumann_data(const DiscretizedBoundary& b, MultiIndex alpha) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(b.size());
  for (int i = 0; i < b.size(); ++i) {
    const double x = b.nodes(0, i), y = b.nodes(1, i);
    if (alpha.a1 > 0) f[i] += b.normals(0, i) * alpha.a1 * std::pow(x, alpha.a1 - 1) * std::pow(y, alpha.a2);
    if (alpha.a2 > 0) f[i] += b.normals(1, i) * alpha.a2 * std::pow(x, alpha.a1) * std::pow(y, alpha.a2 - 1);
  }
  return f;
}

/// Factor-once, solve-many resolvent (lambda I - A)^{-1}. Construction
/// factors; solve() is const and may be called from several threads.
template <class Scalar = double>
class Resolvent {
public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Resolvent(const NpoMatrix& a, Scalar lambda) : lambda_(lambda) {
    if (!(std::abs(lambda) > 0.5))
      throw Error(ErrorCode::OutsideResolventBound, "|lambda| must exceed 1/2");
    op_ = -a.matrix.template cast<Scalar>();
    op_.diagonal().array() += lambda;
    lu_.compute(op_);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-13))
      throw Error(ErrorCode::NearSingular, "lambda I - K* is numerically singular (rcond estimate " +
                                               std::to_string(rcond_) + ")");
  }

  Scalar lambda() const { return lambda_; }
  double rcond() const { return rcond_; }

  template <class Rhs>
  Vector solve(const Rhs& f) const {
    const Vector rhs = f.template cast<Scalar>();
    Vector phi = lu_.solve(rhs);
    const double fn = rhs.cwiseAbs().maxCoeff();
    const double res = (op_ * phi - rhs).cwiseAbs().maxCoeff();
    if (res > 1e-10 * fn)
      throw Error(ErrorCode::NearSingular, "resolvent residual " + std::to_string(res) + " exceeds tolerance");
    return phi;
  }

  template <class Rhs>
  Matrix solve_many(const Rhs& f) const {
    return lu_.solve(f.template cast<Scalar>());
  }

private:
  Scalar lambda_;
  Matrix op_;
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_ = 0.0;
};

/// One-shot solve of (lambda I - A) phi = f.
template <class Scalar = double>
inline Eigen::Matrix<Scalar, Eigen::Dynamic, 1> resolve(const NpoMatrix& a, Scalar lambda, const Eigen::VectorXd& f) {
  return Resolvent<Scalar>(a, lambda).solve(f);
}

/// Debug dump: 8-byte magic "GPTNPO01", uint64 n, then n*n row-major doubles.
inline void dump_npo(const NpoMatrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  const char magic[8] = {'G', 'P', 'T', 'N', 'P', 'O', '0', '1'};
  const std::uint64_t n = static_cast<std::uint64_t>(a.size());
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) {
      const double v = a.matrix(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline Eigen::MatrixXd load_npo_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::string(magic, 8) != "GPTNPO01") throw Error(ErrorCode::ParseError, "bad NPO dump header");
  Eigen::MatrixXd m(n, n);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) in.read(reinterpret_cast<char*>(&m(i, j)), sizeof(double));
  if (!in) throw Error(ErrorCode::ParseError, "truncated NPO dump");
  return m;
}

} // namespace gptshape
