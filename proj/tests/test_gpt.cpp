#include <gtest/gtest.h>

#include <numbers>

#include "gptshape/gpt.hpp"
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

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// Integral of cos^p sin^q over [0, 2 pi].
double circle_moment(int p, int q) {
  if (p % 2 || q % 2) return 0.0;
  return 2 * kPi * double_factorial(p - 1) * double_factorial(q - 1) / double_factorial(p + q);
}

// Unit disk: the resolvent scales the mean of the data by 1/(lambda - 1/2) and the rest by 1/lambda.
double disk_closed_form(MultiIndex a, MultiIndex b, double lambda) {
  const int n = a.order();
  return n / lambda * circle_moment(a.a1 + b.a1, a.a2 + b.a2) +
         n * (1 / (lambda - 0.5) - 1 / lambda) / (2 * kPi) * circle_moment(a.a1, a.a2) * circle_moment(b.a1, b.a2);
}

GptMatrix<double> gpt_of(const ShapeSpec& s, int n, double lambda, int d, int row_degree = -1) {
  const auto b = discretize_parametric(s, n);
  return assemble_gpt<double>(b, assemble_npo(b), lambda, d, row_degree);
}

Eigen::Matrix2d first_order(const GptMatrix<double>& m) {
  Eigen::Matrix2d t;
  t << m.at({1, 0}, {1, 0}), m.at({1, 0}, {0, 1}), m.at({0, 1}, {1, 0}), m.at({0, 1}, {0, 1});
  return t;
}

} // namespace

TEST(Contrast, LambdaOfK) {
  EXPECT_DOUBLE_EQ(lambda_of_k(2).lambda, 1.5);
  EXPECT_DOUBLE_EQ(lambda_of_k(0).lambda, -0.5);
  const auto inf = lambda_of_k(std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(inf.lambda, 0.5);
  EXPECT_TRUE(inf.limit);
  EXPECT_EQ(code_of([] { lambda_of_k(1); }), ErrorCode::NoContrast);
  EXPECT_EQ(code_of([] { lambda_of_k(-1); }), ErrorCode::InvalidArgument);
}

TEST(Contrast, RoundTrip) {
  for (double k : {0.0, 0.25, 3.0, 10.0, 1e4}) EXPECT_NEAR(k_of_lambda(lambda_of_k(k).lambda), k, 1e-9 * (1 + k));
}

TEST(AssembleGpt, ShapeAndIndexing) {
  const auto m = gpt_of(disk_shape(), 64, 1.5, 2);
  EXPECT_EQ(m.rows(), 14);
  EXPECT_EQ(m.cols(), 6);
  EXPECT_EQ(GptMatrix<double>::row_of({1, 0}), 1);
  EXPECT_EQ(GptMatrix<double>::row_of({0, 1}), 0);
  EXPECT_EQ(GptMatrix<double>::col_of({0, 0}), 0);
  EXPECT_EQ(GptMatrix<double>::col_of({2, 0}), 5);
}

TEST(AssembleGpt, DiskFirstOrder) {
  const auto m = gpt_of(disk_shape(), 256, 1.5, 1);
  EXPECT_NEAR(m.at({1, 0}, {1, 0}), kPi / 1.5, 1e-10);
  EXPECT_NEAR(m.at({0, 1}, {0, 1}), kPi / 1.5, 1e-10);
  EXPECT_NEAR(m.at({1, 0}, {0, 1}), 0.0, 1e-12);
  EXPECT_NEAR(m.at({0, 1}, {1, 0}), 0.0, 1e-12);
}

TEST(AssembleGpt, DiskClosedFormToOrderTwo) {
  for (double lambda : {1.5, 0.75, -2.0}) {
    const auto m = gpt_of(disk_shape(), 512, lambda, 2, 2);
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        EXPECT_NEAR(m.entries(r, c), disk_closed_form(m.row_alphas[r], m.col_betas[c], lambda), 1e-7)
            << lambda << " " << r << " " << c;
  }
}

TEST(AssembleGpt, ConstantColumnIsDivergence) {
  // Integrating phi against 1 picks up the flux of grad x^alpha, divided by lambda - 1/2.
  const auto b = discretize_parametric(FlowerShape{}, 256);
  const auto m = assemble_gpt<double>(b, assemble_npo(b), 1.5, 2);
  EXPECT_NEAR(m.at({1, 0}, {0, 0}), 0.0, 1e-9);
  EXPECT_NEAR(m.at({0, 1}, {0, 0}), 0.0, 1e-9);
  EXPECT_NEAR(m.at({2, 0}, {0, 0}), 2 * b.area() / 1.0, 1e-8);
  EXPECT_NEAR(m.at({1, 1}, {0, 0}), 0.0, 1e-9);
}

TEST(AssembleGpt, Dilation) {
  const double lambda = 1.5;
  const auto m1 = gpt_of(disk_shape(), 256, lambda, 1);
  const auto m2 = gpt_of(disk_shape(2.0), 256, lambda, 1);
  EXPECT_NEAR(m2.at({1, 0}, {1, 0}) / m1.at({1, 0}, {1, 0}), 4.0, 1e-10);

  const auto e = gpt_of(EllipseShape{2, 1}, 256, lambda, 2);
  for (double s : {0.5, 2.0}) {
    const auto es = gpt_of(EllipseShape{2 * s, s}, 256, lambda, 2);
    for (int r = 0; r < e.rows(); ++r)
      for (int c = 0; c < e.cols(); ++c) {
        const double scale = std::pow(s, e.row_alphas[r].order() + e.col_betas[c].order());
        EXPECT_NEAR(es.entries(r, c), scale * e.entries(r, c), 1e-9 * std::max(1.0, std::abs(es.entries(r, c))));
      }
  }
}

TEST(AssembleGpt, RotationCovariance) {
  const auto m0 = first_order(gpt_of(EllipseShape{2, 1}, 256, 1.5, 1));
  Gen g(11);
  for (int t = 0; t < 5; ++t) {
    const double th = g.angle();
    const auto mr = first_order(gpt_of(EllipseShape{2, 1, Point::Zero(), th}, 256, 1.5, 1));
    const Eigen::Matrix2d r = Eigen::Rotation2Dd(th).toRotationMatrix();
    EXPECT_LE((mr - r * m0 * r.transpose()).cwiseAbs().maxCoeff(), 1e-9) << th;
  }
}

TEST(AssembleGpt, TranslationLeavesFirstOrderUnchanged) {
  const auto m0 = first_order(gpt_of(EllipseShape{2, 1}, 256, 1.5, 1));
  const auto m1 = first_order(gpt_of(EllipseShape{2, 1, Point(0.7, -0.3)}, 256, 1.5, 1));
  EXPECT_LE((m0 - m1).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(AssembleGpt, EllipsePolarizationTensor) {
  // k = 2: diagonal entries (k - 1) |D| (a + b) / (a + k b) and (k - 1) |D| (a + b) / (b + k a).
  const auto m = gpt_of(EllipseShape{2, 1}, 256, 1.5, 1);
  EXPECT_NEAR(m.at({1, 0}, {1, 0}), 1.5 * kPi, 1e-9);
  EXPECT_NEAR(m.at({0, 1}, {0, 1}), 1.2 * kPi, 1e-9);
  EXPECT_NEAR(m.at({1, 0}, {0, 1}), 0.0, 1e-10);
}

TEST(AssembleGpt, FirstOrderSymmetric) {
  for (const ShapeSpec& s : std::vector<ShapeSpec>{FlowerShape{}, FlowerShape{1, 0.3, 5, true},
                                                   EllipseShape{2, 1, Point(0.2, 0.1), 0.4}}) {
    const auto t = first_order(gpt_of(s, 256, 1.5, 1));
    EXPECT_NEAR(t(0, 1), t(1, 0), 1e-9);
  }
}

TEST(AssembleGpt, ComplexLambdaOnDisk) {
  const auto b = discretize_parametric(disk_shape(), 128);
  const std::complex<double> lambda(1.0, 1.0);
  const auto m = assemble_gpt<std::complex<double>>(b, assemble_npo(b), lambda, 1);
  EXPECT_LE(std::abs(m.at({1, 0}, {1, 0}) - kPi / lambda), 1e-10);
  EXPECT_LE(std::abs(m.at({1, 0}, {0, 1})), 1e-12);
}

TEST(AssembleGpt, RealMatchesComplexWithZeroImaginaryPart) {
  const auto b = discretize_parametric(FlowerShape{}, 128);
  const auto a = assemble_npo(b);
  const auto mr = assemble_gpt<double>(b, a, 1.5, 2);
  const auto mc = assemble_gpt<std::complex<double>>(b, a, {1.5, 0.0}, 2);
  EXPECT_LE((mc.entries.real() - mr.entries).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(mc.entries.imag().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AssembleGpt, RowDegree) {
  const auto m = gpt_of(EllipseShape{2, 1}, 128, 1.5, 2, 3);
  EXPECT_EQ(m.rows(), 9);
  EXPECT_EQ(m.row_degree, 3);
  const auto b = discretize_parametric(disk_shape(), 32);
  EXPECT_EQ(code_of([&] { assemble_gpt<double>(b, assemble_npo(b), 1.5, -1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { assemble_gpt<double>(b, assemble_npo(b), 1.5, 0, 0); }), ErrorCode::InvalidArgument);
}

TEST(AssembleGpt, TruncationMatchesDirectAssembly) {
  const auto full = gpt_of(FlowerShape{}, 192, 1.5, 3);
  const auto direct = gpt_of(FlowerShape{}, 192, 1.5, 2);
  const auto t = full.truncated(2);
  EXPECT_EQ(t.rows(), direct.rows());
  EXPECT_EQ(t.cols(), direct.cols());
  EXPECT_LE((t.entries - direct.entries).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(code_of([&] { direct.truncated(3); }), ErrorCode::InvalidArgument);
}

TEST(HarmonicCombination, DiskFirstOrder) {
  const auto m = gpt_of(disk_shape(), 256, 1.5, 1);
  const Poly2 x1 = Poly2::from_terms({{1, 0, 1.0}});
  EXPECT_NEAR(harmonic_combination(m, x1, x1), kPi / 1.5, 1e-10);
}

TEST(HarmonicCombination, SymmetricForHarmonicPairs) {
  const auto m = gpt_of(EllipseShape{2, 1, Point(0.1, -0.2), 0.3}, 256, 1.5, 3);
  Gen g(5);
  for (int t = 0; t < 20; ++t) {
    Poly2 a(3), b(3);
    for (int k = 1; k <= 3; ++k) {
      const auto [re, im] = harmonic_basis(k);
      a = a + re * g.uniform(-1, 1) + im * g.uniform(-1, 1);
      b = b + re * g.uniform(-1, 1) + im * g.uniform(-1, 1);
    }
    const double ab = harmonic_combination(m, a, b), ba = harmonic_combination(m, b, a);
    EXPECT_NEAR(ab, ba, 1e-8 * std::max(1.0, std::abs(ab)));
  }
}

TEST(HarmonicCombination, DiskCrossTermsVanish) {
  const auto m = gpt_of(disk_shape(), 256, 1.5, 2);
  const auto [re, im] = harmonic_basis(2);
  EXPECT_NEAR(harmonic_combination(m, re, im), 0.0, 1e-10);
  // Re z^2 = cos 2t on the circle with normal derivative 2 cos 2t.
  EXPECT_NEAR(harmonic_combination(m, re, re), 2 * kPi / 1.5, 1e-9);
}

TEST(HarmonicCombination, RejectsNonHarmonic) {
  const auto m = gpt_of(disk_shape(), 64, 1.5, 2);
  const Poly2 q = Poly2::from_terms({{2, 0, 1.0}});
  const Poly2 x1 = Poly2::from_terms({{1, 0, 1.0}});
  EXPECT_EQ(code_of([&] { harmonic_combination(m, q, x1); }), ErrorCode::NotHarmonic);
  EXPECT_EQ(code_of([&] { harmonic_combination(m, x1, q); }), ErrorCode::NotHarmonic);
}

TEST(HarmonicBasis, MatchesComplexPower) {
  Gen g(9);
  for (int k = 0; k <= 6; ++k) {
    const auto [re, im] = harmonic_basis(k);
    EXPECT_LE(re.laplacian().max_abs_coeff(), 1e-12);
    EXPECT_LE(im.laplacian().max_abs_coeff(), 1e-12);
    const Point x = g.point(1.5);
    const std::complex<double> z = std::pow(std::complex<double>(x.x(), x.y()), k);
    EXPECT_NEAR(re.eval(x), z.real(), 1e-10);
    EXPECT_NEAR(im.eval(x), z.imag(), 1e-10);
  }
}

TEST(FarField, ExpansionMatchesLayerPotential) {
  const auto b = discretize_parametric(disk_shape(), 256);
  const auto a = assemble_npo(b);
  const auto f = far_field(b, a, 1.5, Poly2::from_terms({{1, 0, 1.0}}), Point(5, 0), 4);
  EXPECT_NEAR(f.expansion, f.direct, 1e-8);
  EXPECT_GT(std::abs(f.direct), 1e-3);
}

TEST(FarField, FlowerAgreementImprovesWithTruncation) {
  const auto b = discretize_parametric(FlowerShape{}, 256);
  const auto a = assemble_npo(b);
  const Poly2 h = harmonic_basis(2).first;
  const Point x(2.0, 3.0);
  const double e2 = std::abs(far_field(b, a, 1.5, h, x, 2).expansion - far_field(b, a, 1.5, h, x, 2).direct);
  const auto f8 = far_field(b, a, 1.5, h, x, 8);
  EXPECT_LT(std::abs(f8.expansion - f8.direct), e2);
  EXPECT_LT(std::abs(f8.expansion - f8.direct), 1e-4 * std::abs(f8.direct));
}

TEST(FarField, ConstantExcitationHasNoScattering) {
  const auto b = discretize_parametric(disk_shape(), 64);
  const auto f = far_field(b, assemble_npo(b), 1.5, Poly2::from_terms({{0, 0, 3.0}}), Point(5, 0), 4);
  EXPECT_EQ(f.expansion, 0.0);
  EXPECT_EQ(f.direct, 0.0);
}

TEST(FarField, DipoleDecay) {
  const auto b = discretize_parametric(disk_shape(), 256);
  const auto a = assemble_npo(b);
  const Poly2 h = Poly2::from_terms({{1, 0, 1.0}});
  const double u5 = far_field(b, a, 1.5, h, Point(5, 0), 4).direct;
  const double u10 = far_field(b, a, 1.5, h, Point(10, 0), 4).direct;
  EXPECT_NEAR(u5 / u10, 2.0, 1e-6);
}

TEST(FarField, TooClose) {
  const auto b = discretize_parametric(disk_shape(), 64);
  const auto a = assemble_npo(b);
  const Poly2 h = Poly2::from_terms({{1, 0, 1.0}});
  EXPECT_EQ(code_of([&] { far_field(b, a, 1.5, h, Point(1.5, 0), 4); }), ErrorCode::TooClose);
  EXPECT_EQ(code_of([&] { far_field(b, a, 1.5, Poly2::from_terms({{2, 0, 1.0}}), Point(5, 0), 4); }),
            ErrorCode::NotHarmonic);
}
