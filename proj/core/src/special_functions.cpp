#include "gha/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gha/error.hpp"

namespace gha {

namespace {

constexpr double kEndpointGuard = 1e-14;

void check_unit_interval(double u, DomainPolicy policy) {
  if (policy == DomainPolicy::Strict && std::abs(u) > 1.0) {
    raise(ErrorCode::DomainError, "Gegenbauer argument |u| = " + std::to_string(std::abs(u)) +
                                      " exceeds 1");
  }
}

// (1 - u^2)^{lambda / 2}, zero on the guarded endpoints
double weight(double lambda, double u) {
  if (std::abs(u) >= 1.0 - kEndpointGuard) return 0.0;
  const double one_minus_u2 = (1.0 - u) * (1.0 + u);
  return std::exp(0.5 * lambda * std::log(one_minus_u2));
}

}  // namespace

double gegenbauer(int n, double lambda, double u, DomainPolicy policy) {
  if (n < 0) raise(ErrorCode::DomainError, "Gegenbauer degree must be non-negative");
  if (!(lambda > 0.0)) raise(ErrorCode::DomainError, "Gegenbauer order lambda must be positive");
  check_unit_interval(u, policy);

  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * lambda * u;
  for (int k = 2; k <= n; ++k) {
    const double next = (2.0 * (k + lambda - 1.0) * u * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

double gegenbauer_derivative(int n, double lambda, double u, DomainPolicy policy) {
  if (n <= 0) {
    check_unit_interval(u, policy);
    return 0.0;
  }
  return 2.0 * lambda * gegenbauer(n - 1, lambda + 1.0, u, policy);
}

double log_gamma(double x) {
  if (!(x > 0.0)) raise(ErrorCode::DomainError, "log_gamma requires x > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_normalization(int n, double lambda) {
  using std::numbers::ln2;
  using std::numbers::pi;
  return log_gamma(lambda) + (lambda - 0.5) * ln2 - 0.5 * std::log(pi) +
         0.5 * (log_gamma(n + 1.0) + std::log(n + lambda) - log_gamma(n + 2.0 * lambda));
}

double normalized_eigenfunction(int n, double lambda, double u) {
  const double c = gegenbauer(n, lambda, u);
  const double w = weight(lambda, u);
  if (w == 0.0) return 0.0;
  return std::exp(log_normalization(n, lambda)) * w * c;
}

double normalized_eigenfunction_flux(int n, double lambda, double u) {
  const double c = gegenbauer(n, lambda, u);
  const double dc = gegenbauer_derivative(n, lambda, u);
  const double w = weight(lambda, u);
  if (w == 0.0) return 0.0;
  const double one_minus_u2 = (1.0 - u) * (1.0 + u);
  return std::exp(log_normalization(n, lambda)) * w * (-lambda * u * c + one_minus_u2 * dc);
}

GegenbauerRecurrence recurrence_coefficients(int n, double lambda) {
  GegenbauerRecurrence r;
  const double lowering = n > 0 ? std::sqrt(n * (n + 2.0 * lambda - 1.0) / (n - 1.0 + lambda)) : 0.0;
  const double raising = std::sqrt((n + 1.0) * (n + 2.0 * lambda) / (n + 1.0 + lambda));
  const double s = std::sqrt(n + lambda);
  r.lower = lowering / (2.0 * s);
  r.upper = raising / (2.0 * s);
  r.dlower = 0.5 * s * lowering;
  r.dupper = 0.5 * s * raising;
  return r;
}

std::vector<double> interior_grid(int points) {
  if (points < 1) raise(ErrorCode::DomainError, "grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double h = 2.0 / (points + 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = -1.0 + (i + 1) * h;
  return g;
}

double recurrence_residual_multiplication(int n, double lambda, std::span<const double> grid) {
  const auto rc = recurrence_coefficients(n, lambda);
  double worst = 0.0;
  for (double u : grid) {
    double rhs = rc.upper * normalized_eigenfunction(n + 1, lambda, u);
    if (n > 0) rhs += rc.lower * normalized_eigenfunction(n - 1, lambda, u);
    worst = std::max(worst, std::abs(u * normalized_eigenfunction(n, lambda, u) - rhs));
  }
  return worst;
}

double recurrence_residual_derivative(int n, double lambda, std::span<const double> grid) {
  const auto rc = recurrence_coefficients(n, lambda);
  double worst = 0.0;
  for (double u : grid) {
    double rhs = -rc.dupper * normalized_eigenfunction(n + 1, lambda, u);
    if (n > 0) rhs += rc.dlower * normalized_eigenfunction(n - 1, lambda, u);
    worst = std::max(worst, std::abs(normalized_eigenfunction_flux(n, lambda, u) - rhs));
  }
  return worst;
}

std::vector<double> chebyshev_nodes(int count) {
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    nodes[static_cast<std::size_t>(i)] =
        std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * count));
  }
  return nodes;
}

Eigen::MatrixXd orthonormality_matrix(double lambda, int n_max, int quadrature_points) {
  if (n_max < 0) raise(ErrorCode::DomainError, "n_max must be non-negative");
  const int q = quadrature_points > 0 ? quadrature_points : 4 * n_max + 16;

  // Gauss rule for the weight (1 - u^2)^(lambda - 1/2) by Golub-Welsch. E_n E_m / (1 - u^2)^lambda is a
  // polynomial, so the rule is exact once q > n_max for every lambda, half-integers included.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = std::sqrt(k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0)));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const double mass = std::exp(0.5 * std::log(std::numbers::pi) + log_gamma(lambda + 0.5) - log_gamma(lambda + 1.0));

  Eigen::MatrixXd samples(n_max + 1, q);
  Eigen::VectorXd weights(q);
  for (int i = 0; i < q; ++i) {
    const double u = solver.eigenvalues()(i);
    const double first = solver.eigenvectors()(0, i);
    weights(i) = mass * first * first / std::pow((1.0 - u) * (1.0 + u), lambda);
    for (int n = 0; n <= n_max; ++n) samples(n, i) = normalized_eigenfunction(n, lambda, u);
  }
  Eigen::MatrixXd m = samples * weights.asDiagonal() * samples.transpose();
  for (int n = 0; n <= n_max; ++n) {
    if (std::abs(m(n, n) - 1.0) > 0.01) {
      raise(ErrorCode::QuadratureUnderResolved,
            std::to_string(q) + " nodes leave diagonal entry " + std::to_string(n) + " at " +
                std::to_string(m(n, n)));
    }
  }
  return m;
}

}  // namespace gha
