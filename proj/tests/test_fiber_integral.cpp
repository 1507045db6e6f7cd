#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsing/errors.hpp"
#include "minsing/fiber_integral.hpp"

using namespace minsing;

namespace {

// (2 pi)^r prod Gamma(1+t_l) Gamma(1+p-sum t) / Gamma(r+1+p)
//   * A_{r+1}^{sum t - p} prod A_l^{-t_l}
double moment_oracle(int r, const std::vector<double>& t, const std::vector<double>& phi, double p) {
  double s = 0.0, lg = r * std::log(2 * std::numbers::pi), la = 0.0;
  for (int l = 0; l < r; ++l) {
    s += t[l];
    lg += std::lgamma(1 + t[l]);
    la -= t[l] * phi[l];
  }
  lg += std::lgamma(1 + p - s) - std::lgamma(r + 1 + p);
  la += (s - p) * phi[r];
  return std::exp(lg + la);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(FiberIntegral, Anchors) {
  QuadratureSpec q;
  FiberProblem p1{1, {0.0}, {0.0, 0.0}};
  EXPECT_NEAR(closed_form(p1), std::numbers::pi, 1e-14);
  EXPECT_LT(rel(numeric_integral(p1, q).value, std::numbers::pi), 1e-10);
  FiberProblem p2{2, {0.5, 0.5}, {0.0, 0.0, 0.0}};
  const double pi3_6 = std::pow(std::numbers::pi, 3) / 6;
  EXPECT_NEAR(closed_form(p2), pi3_6, 1e-13);
  EXPECT_LT(rel(numeric_integral(p2, q).value, pi3_6), 1e-10);
}

TEST(FiberIntegral, ClosedFormMatchesOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int r = 1; r <= 4; ++r)
    for (int i = 0; i < 10; ++i) {
      FiberProblem p{r, sample_window(r, rng), {}};
      for (int l = 0; l <= r; ++l) p.phi.push_back(u(rng));
      EXPECT_LT(rel(closed_form(p), moment_oracle(r, p.t, p.phi, 1.0)), 1e-13);
    }
}

TEST(FiberIntegral, NumericMatchesClosedForm) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  QuadratureSpec q;
  for (int r = 1; r <= 3; ++r)
    for (int i = 0; i < 20; ++i) {
      FiberProblem p{r, sample_window(r, rng), {}};
      for (int l = 0; l <= r; ++l) p.phi.push_back(u(rng));
      auto num = numeric_integral(p, q);
      EXPECT_LT(rel(num.value, closed_form(p)), 1e-8) << "r=" << r << " i=" << i;
      EXPECT_GT(num.panels_used, 0);
      EXPECT_GE(num.tail_bound, 0.0);
    }
}

TEST(FiberIntegral, NearWindowBoundary) {
  QuadratureSpec q;
  for (auto t : std::vector<std::vector<double>>{{-0.999}, {1.99}, {-0.99, -0.99}, {0.995, 0.995}, {-0.9, 2.8}}) {
    const int r = static_cast<int>(t.size());
    FiberProblem p{r, t, std::vector<double>(r + 1, 0.25)};
    EXPECT_LT(rel(numeric_integral(p, q).value, closed_form(p)), 1e-7);
  }
}

TEST(FiberIntegral, GeneralMomentsMatchOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  QuadratureSpec q;
  for (double pw : {0.0, 2.0, 3.0, 4.0})
    for (int r = 1; r <= 3; ++r)
      for (int i = 0; i < 4; ++i) {
        std::vector<double> t(r);
        do {
          for (auto& x : t) x = u(rng) * (1 + pw) * 0.6;
        } while (detail::sum_of(t) >= 0.95 + pw || *std::min_element(t.begin(), t.end()) <= -0.95);
        std::vector<double> phi(r + 1);
        for (auto& x : phi) x = u(rng);
        EXPECT_LT(rel(fiber_moment(r, t, phi, pw, q).value, moment_oracle(r, t, phi, pw)), 1e-8);
      }
}

TEST(FiberIntegral, NormalizationIndependentOfPhi) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  QuadratureSpec q;
  for (int r = 1; r <= 3; ++r) {
    double expected = 1.0;
    for (int l = 1; l <= r; ++l) expected *= 2 * std::numbers::pi / l;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> phi(r + 1);
      for (auto& x : phi) x = u(rng);
      EXPECT_LT(rel(normalization_constant(r, phi, q).value, expected), 1e-10);
    }
  }
}

TEST(FiberIntegral, Orthogonality) {
  QuadratureSpec q;
  std::vector<double> phi1{0.3, -0.2}, phi2{0.1, -0.4, 0.7};
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      double v = orthogonality_check(1, {a}, {b}, phi1, q);
      if (a == b) EXPECT_NEAR(v, 1.0, 1e-12);
      else EXPECT_LE(v, 1e-10);
    }
  for (int a0 = 0; a0 <= 2; ++a0)
    for (int a1 = 0; a1 <= 2; ++a1)
      for (int b0 = 0; b0 <= 2; ++b0)
        for (int b1 = 0; b1 <= 2; ++b1) {
          double v = orthogonality_check(2, {a0, a1}, {b0, b1}, phi2, q);
          if (a0 == b0 && a1 == b1) EXPECT_NEAR(v, 1.0, 1e-12);
          else EXPECT_LE(v, 1e-10);
        }
  EXPECT_THROW(orthogonality_check(2, {1}, {1, 0}, phi2, q), InputError);
  EXPECT_THROW(orthogonality_check(1, {-1}, {0}, phi1, q), InputError);
}

TEST(FiberIntegral, Holder) {
  QuadratureSpec q;
  std::vector<std::vector<double>> phis{{0.0, 0.0}, {0.5, -0.3}, {0.0, 0.0, 0.0}, {0.2, -0.6, 0.4}};
  for (const auto& phi : phis) {
    const int r = static_cast<int>(phi.size()) - 1;
    for (int m = 1; m <= 4; ++m)
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= (r == 2 ? m - a : 0); ++b) {
          std::vector<int> ell = r == 1 ? std::vector<int>{a} : std::vector<int>{a, b};
          auto s = holder_check(r, m, ell, phi, q);
          EXPECT_LE(s.lhs, s.rhs * (1 + 1e-8)) << "r=" << r << " m=" << m;
          if (m == 1) EXPECT_NEAR(s.lhs, s.rhs, 1e-9 * s.rhs);
        }
  }
  EXPECT_THROW(holder_check(1, 2, {3}, {0, 0}, q), InputError);
  EXPECT_THROW(holder_check(1, 0, {0}, {0, 0}, q), InputError);
}

TEST(FiberIntegral, DomainAndShapeErrors) {
  QuadratureSpec q;
  EXPECT_THROW(closed_form({1, {-1.0}, {0, 0}}), DomainError);
  EXPECT_THROW(closed_form({2, {1.0, 1.0}, {0, 0, 0}}), DomainError);
  EXPECT_THROW(numeric_integral({1, {-1.5}, {0, 0}}, q), DomainError);
  EXPECT_THROW(closed_form({2, {0.0}, {0, 0, 0}}), InputError);
  EXPECT_THROW(closed_form({1, {0.0}, {0, 0, 0}}), InputError);
  EXPECT_THROW(closed_form({0, {}, {0}}), InputError);
  EXPECT_THROW(numeric_integral({1, {0.0}, {0, 0}}, {0.0, 1.0, 100}), InputError);
  EXPECT_THROW(numeric_integral({1, {0.0}, {0, 0}}, {1e-10, 1.0, 0}), InputError);
}

TEST(FiberIntegral, PanelBudgetExhaustion) {
  QuadratureSpec q{1e-15, 1.0, 1};
  EXPECT_THROW(numeric_integral({2, {-0.95, 1.9}, {0, 0, 0}}, q), ConvergenceError);
}

TEST(FiberIntegral, GammaFactorsAndMinimum) {
  auto g = gamma_factors({2, {0.5, 0.5}, {0, 0, 0}});
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[0], std::sqrt(std::numbers::pi) / 2, 1e-15);
  EXPECT_NEAR(g[2], 1.0, 1e-15);
  double lo = 1e9;
  for (int i = 1; i < 4000; ++i) lo = std::min(lo, std::tgamma(i / 1000.0));
  EXPECT_NEAR(kGammaMinimum, lo, 1e-6);
  EXPECT_GE(std::tgamma(1.4616321449683623), kGammaMinimum - 1e-15);
}

TEST(FiberIntegral, SampleWindowRespectsMargin) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    auto t = sample_window(3, rng);
    for (double x : t) EXPECT_GT(x, -0.95);
    EXPECT_LT(detail::sum_of(t), 1.95);
  }
}
