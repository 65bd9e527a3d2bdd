#pragma once

// Gegenbauer polynomials and the normalized Poschl-Teller eigenfunctions
//   E_n(u) = K_n(lambda) (1 - u^2)^{lambda/2} C_n^lambda(u),
// orthonormal in L^2([-1, 1], du / sqrt(1 - u^2)).

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gha {

enum class DomainPolicy { Strict, AllowExtrapolation };

/// C_n^lambda(u) by the forward three-term recurrence in n.
double gegenbauer(int n, double lambda, double u, DomainPolicy policy = DomainPolicy::Strict);

/// d/du C_n^lambda(u) = 2 lambda C_{n-1}^{lambda+1}(u).
double gegenbauer_derivative(int n, double lambda, double u,
                             DomainPolicy policy = DomainPolicy::Strict);

double log_gamma(double x);

/// ln K_n(lambda), evaluated in log space.
double log_normalization(int n, double lambda);

double normalized_eigenfunction(int n, double lambda, double u);

/// (1 - u^2) d/du E_n(u), from the analytic derivative of C_n^lambda.
double normalized_eigenfunction_flux(int n, double lambda, double u);

/// Coefficients of the multiplication recurrence
///   u E_n = lower(n) E_{n-1} + upper(n) E_{n+1}
/// and of the derivative recurrence
///   (1 - u^2) E_n' = dlower(n) E_{n-1} - dupper(n) E_{n+1}.
struct GegenbauerRecurrence {
  double lower = 0.0;
  double upper = 0.0;
  double dlower = 0.0;
  double dupper = 0.0;
};
GegenbauerRecurrence recurrence_coefficients(int n, double lambda);

/// `points` uniform nodes on [-1, 1] with the endpoints pulled in by one spacing.
std::vector<double> interior_grid(int points);

double recurrence_residual_multiplication(int n, double lambda, std::span<const double> grid);
double recurrence_residual_derivative(int n, double lambda, std::span<const double> grid);

/// Gauss-Chebyshev (first kind) nodes on [-1, 1]; the weights are all pi / count.
std::vector<double> chebyshev_nodes(int count);

/// M[n][m] = integral of E_n E_m du / sqrt(1 - u^2), for n, m <= n_max, by Gauss-Gegenbauer quadrature.
/// quadrature_points <= 0 selects the default 4 n_max + 16.
Eigen::MatrixXd orthonormality_matrix(double lambda, int n_max, int quadrature_points = 0);

}  // namespace gha
