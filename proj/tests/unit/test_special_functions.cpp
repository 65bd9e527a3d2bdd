#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gha/error.hpp"
#include "gha/special_functions.hpp"

namespace gha {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: the explicit Gegenbauer sum
//   C_n^l(u) = sum_k (-1)^k Gamma(n - k + l) / (Gamma(l) k! (n - 2k)!) (2u)^{n - 2k}
double gegenbauer_sum(int n, double lambda, double u) {
  double total = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double log_mag = std::lgamma(n - k + lambda) - std::lgamma(lambda) - std::lgamma(k + 1.0) -
                           std::lgamma(n - 2.0 * k + 1.0);
    total += ((k % 2) ? -1.0 : 1.0) * std::exp(log_mag) * std::pow(2.0 * u, n - 2 * k);
  }
  return total;
}

TEST(Gegenbauer, LowOrders) {
  EXPECT_DOUBLE_EQ(gegenbauer(0, 2.7, 0.3), 1.0);
  EXPECT_NEAR(gegenbauer(1, 2.0, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(gegenbauer(2, 1.0, 0.5), 0.0, 1e-15);
}

TEST(Gegenbauer, ChebyshevSecondKindAtLambdaOne) {
  for (int n = 0; n <= 25; ++n) {
    for (double theta : {0.2, kPi / 3, 1.1, 2.5}) {
      const double expected = std::sin((n + 1) * theta) / std::sin(theta);
      EXPECT_NEAR(gegenbauer(n, 1.0, std::cos(theta)), expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(Gegenbauer, MatchesExplicitSum) {
  for (double lambda : {0.5, 1.5, 2.0, 3.0}) {
    for (int n = 0; n <= 12; ++n) {
      for (double u : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
        const double expected = gegenbauer_sum(n, lambda, u);
        EXPECT_NEAR(gegenbauer(n, lambda, u), expected, 1e-10 * std::max(1.0, std::abs(expected)))
            << "n=" << n << " lambda=" << lambda << " u=" << u;
      }
    }
  }
}

TEST(Gegenbauer, ParityProperty) {
  for (int n = 0; n <= 10; ++n) {
    const double sign = (n % 2) ? -1.0 : 1.0;
    EXPECT_NEAR(gegenbauer(n, 2.5, -0.37), sign * gegenbauer(n, 2.5, 0.37), 1e-12);
  }
}

TEST(Gegenbauer, DerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  for (int n = 1; n <= 8; ++n) {
    const double fd = (gegenbauer(n, 1.5, 0.3 + h) - gegenbauer(n, 1.5, 0.3 - h)) / (2 * h);
    EXPECT_NEAR(gegenbauer_derivative(n, 1.5, 0.3), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Gegenbauer, DomainPolicy) {
  EXPECT_THROW(gegenbauer(3, 1.0, 1.5), Error);
  EXPECT_NO_THROW(gegenbauer(3, 1.0, 1.5, DomainPolicy::AllowExtrapolation));
  EXPECT_THROW(gegenbauer(-1, 1.0, 0.5), Error);
}

TEST(LogGamma, KnownValues) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5723649429247001, 1e-14);
}

TEST(LogGamma, RecurrenceProperty) {
  for (double x : {0.3, 1.7, 4.2, 25.5, 120.0}) EXPECT_NEAR(log_gamma(x + 1.0) - log_gamma(x), std::log(x), 1e-12);
}

TEST(NormalizedEigenfunction, GroundStateConstant) {
  // K_0(2) = Gamma(2) 2^{3/2} / sqrt(pi) * sqrt(2 / Gamma(4))
  const double expected = std::tgamma(2.0) * std::pow(2.0, 1.5) / std::sqrt(kPi) * std::sqrt(2.0 / std::tgamma(4.0));
  EXPECT_NEAR(normalized_eigenfunction(0, 2.0, 0.0), expected, 1e-14);
  EXPECT_NEAR(normalized_eigenfunction(0, 2.0, 0.0), 0.921317, 1e-6);
}

TEST(NormalizedEigenfunction, VanishesAtEndpoints) {
  for (int n = 0; n <= 6; ++n) {
    EXPECT_EQ(normalized_eigenfunction(n, 1.5, 1.0), 0.0);
    EXPECT_EQ(normalized_eigenfunction(n, 1.5, -1.0), 0.0);
  }
}

TEST(NormalizedEigenfunction, LambdaOneIsSineMode) {
  for (int n = 0; n <= 15; ++n) {
    for (double x : {0.1, 0.7, 1.6, 2.9}) {
      EXPECT_NEAR(normalized_eigenfunction(n, 1.0, std::cos(x)), std::sqrt(2.0 / kPi) * std::sin((n + 1) * x), 1e-12);
    }
  }
}

TEST(NormalizedEigenfunction, LargeOrderStaysFinite) {
  EXPECT_TRUE(std::isfinite(normalized_eigenfunction(150, 3.0, 0.2)));
}

TEST(Recurrence, MultiplicationExamples) {
  EXPECT_LT(recurrence_residual_multiplication(1, 1.0, interior_grid(101)), 1e-10);
  EXPECT_LT(recurrence_residual_multiplication(10, 3.0, interior_grid(201)), 1e-8);
  EXPECT_LT(recurrence_residual_multiplication(0, 2.0, interior_grid(101)), 1e-10);
}

TEST(Recurrence, DerivativeExamples) {
  EXPECT_LT(recurrence_residual_derivative(1, 1.0, interior_grid(101)), 1e-10);
  EXPECT_LT(recurrence_residual_derivative(5, 1.5, interior_grid(201)), 1e-8);
  EXPECT_LT(recurrence_residual_derivative(0, 2.0, interior_grid(101)), 1e-10);
}

TEST(Recurrence, CoefficientsAgainstExplicitEvaluation) {
  // u E_n = lower E_{n-1} + upper E_{n+1}, checked at a single point by direct evaluation
  for (double lambda : {1.0, 1.5, 2.0, 3.0}) {
    for (int n = 1; n <= 10; ++n) {
      const auto rc = recurrence_coefficients(n, lambda);
      const double u = 0.37;
      const double lhs = u * normalized_eigenfunction(n, lambda, u);
      const double rhs =
          rc.lower * normalized_eigenfunction(n - 1, lambda, u) + rc.upper * normalized_eigenfunction(n + 1, lambda, u);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(Recurrence, FluxMatchesFiniteDifference) {
  const double h = 1e-6;
  for (int n = 0; n <= 6; ++n) {
    const double u = -0.41;
    const double fd = (normalized_eigenfunction(n, 2.5, u + h) - normalized_eigenfunction(n, 2.5, u - h)) / (2 * h);
    EXPECT_NEAR(normalized_eigenfunction_flux(n, 2.5, u), (1 - u * u) * fd, 1e-6);
  }
}

TEST(InteriorGrid, EndpointsPulledIn) {
  const auto g = interior_grid(11);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_GT(g.front(), -1.0);
  EXPECT_LT(g.back(), 1.0);
}

TEST(Orthonormality, SineFamily) {
  const auto M = orthonormality_matrix(1.0, 5);
  EXPECT_LT((M - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(orthonormality_matrix(1.0, 0)(0, 0), 1.0, 1e-14);
}

TEST(Orthonormality, HalfIntegerLambda) {
  const auto M = orthonormality_matrix(2.5, 10);
  EXPECT_LT((M - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-8);
}

class OrthonormalityByLambda : public ::testing::TestWithParam<double> {};

TEST_P(OrthonormalityByLambda, IdentityToTwenty) {
  const auto M = orthonormality_matrix(GetParam(), 20);
  EXPECT_LT((M - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Lambdas, OrthonormalityByLambda, ::testing::Values(1.0, 1.5, 2.0, 2.5, 3.0, 4.5));

TEST(Orthonormality, UnderResolvedQuadratureIsRejected) {
  EXPECT_THROW(orthonormality_matrix(2.0, 20, 5), Error);
}

TEST(ChebyshevNodes, SymmetricAndInside) {
  const auto nodes = chebyshev_nodes(9);
  ASSERT_EQ(nodes.size(), 9u);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    EXPECT_LT(std::abs(nodes[i]), 1.0);
    EXPECT_NEAR(nodes[i], -nodes[nodes.size() - 1 - i], 1e-15);
  }
}

}  // namespace
}  // namespace gha
