#include <gtest/gtest.h>

#include <numbers>

#include "gptshape/geometry.hpp"
#include "gptshape/recovery.hpp"
#include "gptshape/transform.hpp"
#include "support.hpp"

using namespace gptshape;
using gptshape::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

// Pascal-triangle expansion of (a x1 + b x2)^n, coefficients of x1^(n-j) x2^j.
std::vector<double> binomial_power(double a, double b, int n) {
  std::vector<double> row{1.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (size_t j = 0; j < row.size(); ++j) {
      next[j] += a * row[j];
      next[j + 1] += b * row[j];
    }
    row = next;
  }
  return row;
}

Eigen::MatrixXd lift_pascal(const Eigen::Matrix2d& a, int d) {
  Eigen::MatrixXd out(d + 1, d + 1);
  for (int h = 0; h <= d; ++h) {
    const auto l = binomial_power(a(0, 0), a(0, 1), d - h);
    const auto r = binomial_power(a(1, 0), a(1, 1), h);
    for (int j = 0; j <= d; ++j) {
      double s = 0.0;
      for (int p = 0; p <= j; ++p)
        if (p < static_cast<int>(l.size()) && j - p < static_cast<int>(r.size())) s += l[p] * r[j - p];
      out(h, j) = s;
    }
  }
  return out;
}

// No rotational or reflective symmetry.
const Poly2 kQuartic =
    Poly2::from_terms({{4, 0, 1.0}, {0, 4, 2.0}, {3, 1, 0.5}, {2, 2, 0.3}, {2, 0, -0.4}, {1, 0, 0.3}, {0, 1, -0.2}, {0, 0, -1.0}});

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

} // namespace

TEST(Lift, Identity) {
  for (int d = 0; d <= 6; ++d) EXPECT_EQ(lift(Eigen::Matrix2d::Identity(), d), Eigen::MatrixXd::Identity(d + 1, d + 1));
}

TEST(Lift, ScalarMultiple) {
  for (int d = 0; d <= 6; ++d)
    EXPECT_LE((lift(2.5 * Eigen::Matrix2d::Identity(), d) - std::pow(2.5, d) * Eigen::MatrixXd::Identity(d + 1, d + 1))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
}

TEST(Lift, QuarterTurn) {
  Eigen::Matrix2d r;
  r << 0, -1, 1, 0;
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 0, 1, 0, -1, 0, 1, 0, 0;
  EXPECT_LE((lift(r, 2) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lift, MatchesPascalExpansion) {
  Gen g(23);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Matrix2d a = g.matrix(2.0);
    const int d = g.integer(0, 8);
    const Eigen::MatrixXd ref = lift_pascal(a, d);
    EXPECT_LE((lift(a, d) - ref).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(Lift, Multiplicative) {
  Gen g(29);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Matrix2d a = g.matrix(1.5), b = g.matrix(1.5);
    const int d = g.integer(0, 7);
    const Eigen::MatrixXd ab = lift(a * b, d);
    EXPECT_LE((ab - lift(a, d) * lift(b, d)).cwiseAbs().maxCoeff(), 1e-11 * std::max(1.0, ab.cwiseAbs().maxCoeff()));
  }
}

TEST(Lift, TransformsMonomials) {
  Gen g(31);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Matrix2d a = g.matrix(1.5);
    const Point x = g.point(1.0), y = a * x;
    const int d = g.integer(0, 6);
    Eigen::VectorXd vx(d + 1), vy(d + 1);
    for (int j = 0; j <= d; ++j) {
      vx[j] = std::pow(x.x(), d - j) * std::pow(x.y(), j);
      vy[j] = std::pow(y.x(), d - j) * std::pow(y.y(), j);
    }
    EXPECT_LE((lift(a, d) * vx - vy).cwiseAbs().maxCoeff(), 1e-11 * std::max(1.0, vy.cwiseAbs().maxCoeff()));
  }
  EXPECT_EQ(code_of([] { lift(Eigen::Matrix2d::Identity(), -1); }), ErrorCode::InvalidArgument);
}

TEST(PushForward, Identity) {
  EXPECT_LE(linf_distance(push_forward(kQuartic, Eigen::Matrix2d::Identity()), kQuartic), 1e-15);
}

TEST(PushForward, AxisSwap) {
  // x1^2 + 4 x2^2 - 4 under (x1, x2) -> (x2, x1) becomes 4 x1^2 + x2^2 - 4.
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  const Poly2 e = Poly2::from_terms({{2, 0, 1}, {0, 2, 4}, {0, 0, -4}});
  EXPECT_LE(linf_distance(push_forward(e, swap), Poly2::from_terms({{2, 0, 4}, {0, 2, 1}, {0, 0, -4}})), 1e-15);
}

TEST(PushForward, EvaluationConsistency) {
  Gen g(37);
  for (int t = 0; t < 50; ++t) {
    const Poly2 p = g.poly(g.integer(1, 6), 1.0);
    Eigen::Matrix2d a = g.matrix(1.5);
    if (std::abs(a.determinant()) < 0.1) continue;
    const Point x = g.point(1.0);
    EXPECT_NEAR(push_forward(p, a).eval(a * x), p.eval(x), 1e-9 * std::max(1.0, std::abs(p.eval(x))));
  }
}

TEST(PushForward, ZeroSetMembership) {
  const EllipseShape e{2, 1};
  const auto b = discretize_parametric(e, 64);
  const Similarity t{1.7, 0.9, false};
  const Poly2 q = push_forward(ellipse_poly(e), t);
  for (int i = 0; i < b.size(); ++i) EXPECT_NEAR(q.eval(t.apply(b.node(i))), 0.0, 1e-12);
  EXPECT_LE(linf_distance(normalize(q), normalize(ellipse_poly({2 * 1.7, 1.7, Point::Zero(), 0.9}))), 1e-12);
}

TEST(PushForward, SingularRejected) {
  EXPECT_EQ(code_of([] { push_forward(kQuartic, Eigen::Matrix2d::Zero()); }), ErrorCode::InvalidArgument);
}

TEST(Match, RoundTrip) {
  const Similarity t{2.0, kPi / 6, false};
  const Poly2 obs = push_forward(kQuartic, t) * 0.37;
  const auto r = match(kQuartic, obs);
  EXPECT_NEAR(r.best.s, 2.0, 1e-6);
  EXPECT_LE(angle_gap(r.best.theta, kPi / 6), 1e-6);
  EXPECT_EQ(r.sign, 1);
  EXPECT_LE(r.epsilon_match, 1e-8);
  EXPECT_FALSE(r.best.reflected);
}

TEST(Match, RandomRoundTrips) {
  Gen g(41);
  for (int t = 0; t < 4; ++t) {
    const Similarity tr{std::exp(g.uniform(std::log(0.3), std::log(3.0))), g.angle(), false};
    const auto r = match(kQuartic, push_forward(kQuartic, tr));
    EXPECT_NEAR(r.best.s, tr.s, 1e-6 * tr.s);
    EXPECT_LE(angle_gap(r.best.theta, tr.theta), 1e-6);
    EXPECT_LE(r.epsilon_match, 1e-8);
  }
}

TEST(Match, SelfMatch) {
  const auto r = match(kQuartic, kQuartic);
  EXPECT_LE(r.epsilon_match, 1e-10);
  EXPECT_NEAR(r.best.s, 1.0, 1e-6);
  EXPECT_LE(angle_gap(r.best.theta, 0.0), 1e-6);
}

TEST(Match, ScalingObservationKeepsArgmin) {
  const Poly2 obs = push_forward(kQuartic, Similarity{1.3, 2.0, false});
  const auto r0 = match(kQuartic, obs);
  for (double c : {3.0, 1e-3, -2.0}) {
    const auto r = match(kQuartic, obs * c);
    EXPECT_NEAR(r.best.s, r0.best.s, 1e-6);
    EXPECT_LE(angle_gap(r.best.theta, r0.best.theta), 1e-6);
    EXPECT_NEAR(r.epsilon_match, r0.epsilon_match, 1e-8);
    EXPECT_EQ(r.sign, c > 0 ? r0.sign : -r0.sign);
  }
}

TEST(Match, DifferentShapesDoNotMatch) {
  const Poly2 lem = lemniscate_poly({Point(-1, 0), Point(1, 0)}, 0.5);
  const Poly2 ell = ellipse_poly({2, 1}).with_degree(4);
  EXPECT_GT(match(lem, ell).epsilon_match, 0.1);
}

TEST(Match, Errors) {
  EXPECT_EQ(code_of([] { match(kQuartic, ellipse_poly({2, 1})); }), ErrorCode::DegreeMismatch);
  const Poly2 cubic = Poly2::from_terms({{3, 0, 1}, {0, 1, 1}, {0, 0, -1}});
  EXPECT_EQ(code_of([&] { match(cubic, cubic); }), ErrorCode::RejectedInput);
  EXPECT_EQ(code_of([] { match(Poly2(4), kQuartic); }), ErrorCode::DegenerateInput);
}

TEST(Match, EllipseSymmetryGivesAlternates) {
  const Poly2 ref = ellipse_poly({2, 1});
  const Poly2 obs = push_forward(ref, Similarity{1.5, 0.4, false});
  const auto r = match(ref, obs);
  EXPECT_LE(r.epsilon_match, 1e-8);
  bool found_half_turn = false;
  for (const auto& a : r.alternates)
    if (angle_gap(a.transform.theta, r.best.theta + kPi) < 1e-5 && std::abs(a.transform.s - 1.5) < 1e-5)
      found_half_turn = true;
  EXPECT_TRUE(found_half_turn);
  EXPECT_TRUE(angle_gap(r.best.theta, 0.4) < 1e-5 || angle_gap(r.best.theta, 0.4 + kPi) < 1e-5);
}

TEST(Match, Reflection) {
  const Similarity t{0.8, 1.1, true};
  const Poly2 obs = push_forward(kQuartic, t);
  EXPECT_GT(match(kQuartic, obs).epsilon_match, 1e-3);
  MatchOptions o;
  o.allow_reflection = true;
  const auto r = match(kQuartic, obs, o);
  EXPECT_TRUE(r.best.reflected);
  EXPECT_NEAR(r.best.s, 0.8, 1e-6);
  EXPECT_LE(r.epsilon_match, 1e-8);
  const Eigen::Matrix2d diff = r.best.matrix() - t.matrix();
  EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Similarity, MatrixComposition) {
  const Similarity t{2.0, kPi / 2, false};
  EXPECT_LE((t.apply(Point(1, 0)) - Point(0, 2)).norm(), 1e-15);
  const Similarity r{1.0, 0.0, true};
  EXPECT_LE((r.apply(Point(0.3, 0.7)) - Point(0.3, -0.7)).norm(), 1e-15);
}
