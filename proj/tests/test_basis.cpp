#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ftn/basis.hpp"
#include "ftn/errors.hpp"

using namespace ftn;

namespace {

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// φ_s from the closed form H_s(x) e^{-x²/2} / √(2^s s! √π), usable for small s.
double hermite_closed_form(std::size_t s, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  double h = s == 0 ? h0 : h1;
  for (std::size_t k = 1; k < s; ++k) {
    h = 2.0 * x * h1 - 2.0 * static_cast<double>(k) * h0;
    h0 = h1;
    h1 = h;
  }
  double fact = 1.0;
  for (std::size_t k = 2; k <= s; ++k) fact *= static_cast<double>(k);
  return h * std::exp(-x * x / 2) / std::sqrt(std::pow(2.0, static_cast<double>(s)) * fact * std::sqrt(std::numbers::pi));
}

}  // namespace

TEST(BasisSpec, Validation) {
  EXPECT_THROW((BasisSpec{1, 0}).validated(), DomainError);
  EXPECT_THROW((BasisSpec{8, 10}).validated(), DomainError);
  EXPECT_EQ((BasisSpec{8, 0}).validated().nodes(), 24u);
  EXPECT_NO_THROW((BasisSpec{8, 24}).validated());
}

TEST(SobEval, MatchesClosedForm) {
  for (std::size_t s = 0; s < 12; ++s)
    for (double x : {-3.1, -0.7, 0.0, 0.4, 2.5}) EXPECT_NEAR(sob_eval(s, x), hermite_closed_form(s, x), 1e-13);
}

TEST(SobEval, GroundStateIsGaussian) {
  EXPECT_NEAR(sob_eval(0, 0.0), std::pow(std::numbers::pi, -0.25), 1e-15);
  EXPECT_NEAR(sob_eval(0, 1.0), std::pow(std::numbers::pi, -0.25) * std::exp(-0.5), 1e-15);
}

TEST(SobEval, FiniteAtHighOrder) {
  const auto values = sob_eval_all(200, 3.0);
  for (double v : values) EXPECT_TRUE(std::isfinite(v));
}

TEST(SobDerivative, MatchesCentralDifference) {
  for (std::size_t s = 0; s < 10; ++s)
    for (double x : {-1.3, 0.2, 2.0}) {
      const double h = 1e-5;
      const double fd = (sob_eval(s, x + h) - sob_eval(s, x - h)) / (2 * h);
      EXPECT_NEAR(sob_derivative(s, x), fd, 1e-8);
    }
}

TEST(GaussHermite, WeightsSumToSqrtPi) {
  for (std::size_t k : {2u, 5u, 16u, 40u, 64u, 128u}) {
    const auto rule = gauss_hermite(k);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    EXPECT_NEAR(sum, std::sqrt(std::numbers::pi), 1e-13) << "K=" << k;
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(rule.nodes[i], -rule.nodes[k - 1 - i], 1e-14);
  }
}

TEST(GaussHermite, IntegratesMoments) {
  // ∫ x^{2j} e^{-x²} dx = Γ(j + ½)
  const auto rule = gauss_hermite(12);
  for (int j = 0; j <= 11; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 2 * j);
    EXPECT_NEAR(s / std::tgamma(j + 0.5), 1.0, 1e-12) << "j=" << j;
  }
}

TEST(Quadrature, GramIsIdentity) {
  const BasisSpec spec{32, 0};
  const auto rule = gauss_hermite(spec.nodes());
  double worst = 0.0;
  for (std::size_t a = 0; a < 32; ++a)
    for (std::size_t b = 0; b < 32; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.scaled_weights[i] * sob_eval(a, rule.nodes[i]) * sob_eval(b, rule.nodes[i]);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(Quadrature, Phi3Normalized) {
  const auto rule = gauss_hermite(20);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.scaled_weights[i] * std::pow(sob_eval(3, rule.nodes[i]), 2);
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Quadrature, IdentityKernel) {
  const BasisSpec spec{10, 0};
  const auto id = operator_matrix_quadrature([](std::size_t s, double x) { return sob_eval(s, x); }, spec);
  EXPECT_LT(max_abs_diff(id, OperatorMatrix::identity(10)), 1e-12);
}

TEST(Quadrature, RejectsNonFiniteKernel) {
  EXPECT_THROW(operator_matrix_quadrature([](std::size_t, double) { return NAN; }, BasisSpec{4, 0}), DomainError);
}

TEST(DMatrix, SmallCase) {
  const auto d = d_matrix(2);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_NEAR(d(0, 1), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(d(1, 0), -std::sqrt(0.5), 1e-15);
  EXPECT_EQ(d(1, 1), 0.0);
}

TEST(DMatrix, AntisymmetricAndEntry) {
  const auto d = d_matrix(9);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) EXPECT_EQ(d(i, j), -d(j, i));
  EXPECT_NEAR(d(2, 3), 1.224745, 1e-6);
  EXPECT_NEAR(d(2, 3), std::sqrt(1.5), 1e-15);
}

TEST(XMatrix, SmallCaseSymmetricEntry) {
  const auto x = x_matrix(2);
  EXPECT_NEAR(x(0, 1), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(x(1, 0), std::sqrt(0.5), 1e-15);
  const auto x6 = x_matrix(6);
  EXPECT_TRUE(x6 == x6.transposed());
  EXPECT_NEAR(x6(3, 4), std::sqrt(2.0), 1e-15);
}

TEST(Ladder, AgreesWithQuadratureUpTo32) {
  for (std::size_t d : {2u, 5u, 16u, 32u}) {
    const BasisSpec spec{d, 0};
    const auto xq = operator_matrix_quadrature([](std::size_t s, double x) { return x * sob_eval(s, x); }, spec);
    const auto dq = operator_matrix_quadrature([](std::size_t s, double x) { return sob_derivative(s, x); }, spec);
    EXPECT_LT(max_abs_diff(xq, x_matrix(d)), 1e-10) << "D=" << d;
    EXPECT_LT(max_abs_diff(dq, d_matrix(d)), 1e-10) << "D=" << d;
  }
}

TEST(MatrixPower, Basics) {
  const auto d = d_matrix(6);
  EXPECT_TRUE(matrix_power(d, 1) == d);
  const auto d2 = matrix_power(d, 2);
  EXPECT_TRUE(d2 == d2.transposed());
  EXPECT_LT(max_abs_diff(matrix_power(d, 3), d * d * d), 1e-14);
  EXPECT_THROW(matrix_power(d, 0), DomainError);
}

TEST(MatrixPower, HarmonicIdentityAwayFromCorner) {
  for (std::size_t d : {8u, 16u, 32u}) {
    const auto h = kinetic_matrix(d) + 0.5 * matrix_power(x_matrix(d), 2);
    double worst = 0.0;
    for (std::size_t i = 0; i + 2 < d; ++i)
      for (std::size_t j = 0; j + 2 < d; ++j)
        worst = std::max(worst, std::abs(h(i, j) - (i == j ? static_cast<double>(i) + 0.5 : 0.0)));
    EXPECT_LT(worst, 1e-12) << "D=" << d;
  }
}

TEST(KineticMatrix, Entries) {
  for (std::size_t d : {2u, 3u, 8u}) EXPECT_NEAR(kinetic_matrix(d)(0, 0), 0.25, 1e-15);
  const auto k = kinetic_matrix(8);
  EXPECT_TRUE(k == k.transposed());
  const auto h = k + 0.5 * matrix_power(x_matrix(8), 2);
  for (std::size_t s = 0; s <= 5; ++s) EXPECT_NEAR(h(s, s), s + 0.5, 1e-14);
}

TEST(TwoSiteQuadrature, Kernels) {
  const BasisSpec spec{4, 0};
  const auto id = two_site_matrix_quadrature(
      [](std::size_t a, std::size_t b, double x1, double x2) { return sob_eval(a, x1) * sob_eval(b, x2); }, spec);
  const auto xx = two_site_matrix_quadrature(
      [](std::size_t a, std::size_t b, double x1, double x2) { return x1 * x2 * sob_eval(a, x1) * sob_eval(b, x2); },
      spec);
  const auto x2x2 = two_site_matrix_quadrature(
      [](std::size_t a, std::size_t b, double x1, double x2) {
        return x1 * x1 * x2 * x2 * sob_eval(a, x1) * sob_eval(b, x2);
      },
      spec);
  // Exact x² in the truncated basis is the projection, i.e. the square of a
  // one-larger X cut back to 4 x 4.
  const auto x5 = matrix_power(x_matrix(5), 2);
  OperatorMatrix x2(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) x2(i, j) = x5(i, j);
  const auto x = x_matrix(4);
  const auto id_ref = TwoSiteOperatorTensor::identity(4);
  const auto xx_ref = TwoSiteOperatorTensor::outer(x, x);
  const auto x2x2_ref = TwoSiteOperatorTensor::outer(x2, x2);
  EXPECT_LT(max_abs_diff(id.tensor(), id_ref.tensor()), 1e-12);
  EXPECT_LT(max_abs_diff(xx.tensor(), xx_ref.tensor()), 1e-10);
  EXPECT_LT(max_abs_diff(x2x2.tensor(), x2x2_ref.tensor()), 1e-10);
}

TEST(WriteCsv, FullPrecisionRowMajor) {
  std::ostringstream os;
  write_csv(os, x_matrix(2));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  const auto comma = line.find(',');
  ASSERT_NE(comma, std::string::npos);
  EXPECT_EQ(std::stod(line.substr(0, comma)), 0.0);
  EXPECT_EQ(std::stod(line.substr(comma + 1)), x_matrix(2)(0, 1));
  EXPECT_NE(line.find('e'), std::string::npos);
}
