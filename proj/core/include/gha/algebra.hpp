#pragma once

// Generalized Heisenberg algebra primitives: characteristic functions, the
// spectrum recursion, truncated ladder matrices and residual checks for the
// defining relations.
//
// All identities are asserted on the interior of a truncated basis: the
// first M = N - margin basis vectors. Raising operators leak past the top of
// a finite basis, so the last `margin` columns are never inspected.

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gha {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Strictly increasing map driving eps_{n+1} = f(eps_n).
class CharacteristicFunction {
 public:
  enum class Kind { Affine, SqrtShift, QuonAffine, PowerShift, Custom };

  /// x -> slope * x + intercept. The oscillator is affine(1, 1).
  static CharacteristicFunction affine(double slope, double intercept, double domain_min = 0.0);
  /// x -> (sqrt(x) + 1)^2, shared by the Poschl-Teller family and the square well.
  static CharacteristicFunction sqrt_shift(double domain_min = 0.0);
  /// x -> q x + 1 with q in (0, 1].
  static CharacteristicFunction quon_affine(double q, double domain_min = 0.0);
  /// x -> (x^{1/(k+1)} + 1)^{k+1}; generates eps_n = n^{k+1} from eps_0 = 0.
  static CharacteristicFunction power_shift(int k, double domain_min = 0.0);
  static CharacteristicFunction custom(std::function<double(double)> fn, std::string name,
                                       double domain_min = 0.0);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double domain_min() const { return domain_min_; }
  double parameter() const { return p0_; }
  std::string name() const;

  /// Samples `samples` points geometrically spread over [domain_min, domain_min + span]
  /// and reports whether f is strictly increasing on them.
  bool is_strictly_increasing(int samples = 64, double span = 1.0e4) const;

 private:
  CharacteristicFunction(Kind kind, double p0, double p1, double domain_min);

  Kind kind_;
  double p0_ = 0.0;
  double p1_ = 0.0;
  double domain_min_ = 0.0;
  std::function<double(double)> custom_;
  std::string custom_name_;
};

struct Spectrum {
  double epsilon0 = 0.0;
  std::vector<double> values;

  Index size() const { return static_cast<Index>(values.size()); }
  double operator[](Index n) const { return values[static_cast<std::size_t>(n)]; }
  Index n_max() const { return size() - 1; }
};

/// N x N complex matrix tagged with its basis and an interior margin.
class TruncatedOperator {
 public:
  TruncatedOperator() = default;
  TruncatedOperator(CMatrix entries, std::string basis_tag, Index interior_margin);

  Index dim() const { return entries_.rows(); }
  Index margin() const { return margin_; }
  Index interior_dim() const { return dim() - margin_; }
  const CMatrix& matrix() const { return entries_; }
  const std::string& basis_tag() const { return basis_tag_; }

  static TruncatedOperator identity(Index dim, std::string basis_tag, Index margin);
  static TruncatedOperator diagonal(const RVector& diag, std::string basis_tag, Index margin);

 private:
  CMatrix entries_;
  std::string basis_tag_;
  Index margin_ = 0;
};

/// Default interior margin: max(2, N / 8).
Index default_margin(Index N);

struct Residual {
  std::string name;
  double frobenius = 0.0;
  double max_abs = 0.0;
};

struct ResidualReport {
  std::vector<Residual> entries;

  void add(Residual r) { entries.push_back(std::move(r)); }
  const Residual& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  double max_frobenius() const;
};

/// Residual of X restricted to its first `interior` columns, X * P_M.
Residual interior_residual(std::string name, const CMatrix& X, Index interior);
/// Residual of X applied to the columns of W (an explicit interior basis).
Residual subspace_residual(std::string name, const CMatrix& X, const CMatrix& W);

struct GhaRealization {
  TruncatedOperator c;
  TruncatedOperator cdag;
  TruncatedOperator H;
  CharacteristicFunction f;
  Spectrum spectrum;
};

Spectrum iterate_spectrum(const CharacteristicFunction& f, double epsilon0, int n_max);

/// (eps_n - eps_0)! = prod_{j=1..n} (eps_j - eps_0), with 0! = 1.
double generalized_factorial(const Spectrum& spectrum, int n);

/// Lowering weights c[n-1][n] = sqrt(eps_n - eps_0); c^dagger its transpose; H = diag(eps_n).
GhaRealization build_ladder(const Spectrum& spectrum, const CharacteristicFunction& f, Index N,
                            Index margin, std::string basis_tag = "number");

/// f applied entrywise to the diagonal of a diagonal operator.
CMatrix apply_diagonal(const CharacteristicFunction& f, const CMatrix& diagonal_operator);

/// intertwine:    (c H - f(H) c) P_M
/// commutator:    ([c, c^dagger] - (f(H) - H)) P_M
/// factorization: (c^dagger c + eps_0 - H) P_M
ResidualReport gha_residuals(const GhaRealization& g);

/// H_susy = c c^dagger + eps_0 I.
TruncatedOperator susy_partner(const GhaRealization& g);

/// || c e_0 ||.
double check_annihilation(const GhaRealization& g);
double check_annihilation(const CMatrix& c);

}  // namespace gha
