#pragma once

// Catalog of concrete systems: Poschl-Teller, infinite square well, harmonic
// oscillator, quons and pseudo-boson powers, plus the similarity recipes used
// to deform them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gha/algebra.hpp"
#include "gha/deformation.hpp"

namespace gha {

/// Closed-form deformation profiles.
///   RationalPT:    (1 + 2x) / (1 + x)
///   TanhShift:     2 + tanh x
///   InverseCosine: 1 / (alpha + cos(k0 x)), alpha > 1, k0 >= 1
///   CustomSamples: values supplied per grid node (no derivatives)
struct Profile {
  enum class Kind { RationalPT, TanhShift, InverseCosine, CustomSamples };

  Kind kind = Kind::RationalPT;
  double alpha = 2.0;
  int k0 = 1;
  std::vector<double> samples;

  static Profile rational_pt() { return {Kind::RationalPT, 2.0, 1, {}}; }
  static Profile tanh_shift() { return {Kind::TanhShift, 2.0, 1, {}}; }
  static Profile inverse_cosine(double alpha, int k0);
  static Profile custom_samples(std::vector<double> values);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// Sampled values for a grid; custom samples are returned as-is.
  std::vector<double> sample(const std::vector<double>& nodes) const;
  /// Analytic bounds (sigma_m, sigma_M) on the domain x >= domain_min.
  std::pair<double, double> bounds(double domain_min) const;
  std::string name() const;
  void validate() const;
};

struct SimilarityRecipe {
  enum class Kind { MultiplicationFunction, DiagonalOfNumber };

  Kind kind = Kind::MultiplicationFunction;
  Profile profile;

  static SimilarityRecipe multiplication(Profile p) { return {Kind::MultiplicationFunction, std::move(p)}; }
  /// S = sigma(N + 1) in the number basis.
  static SimilarityRecipe diagonal_of_number(Profile sigma) { return {Kind::DiagonalOfNumber, std::move(sigma)}; }
  std::string name() const;
};

enum class ModelKind { PoschlTeller, InfiniteWell, HarmonicOscillator, Quon, PseudoBosonPower };

struct ModelSpec {
  ModelKind kind = ModelKind::InfiniteWell;
  double lambda = 1.0;
  double q = 1.0;
  int k = 1;
  std::optional<SimilarityRecipe> deformation;

  static ModelSpec poschl_teller(double lambda);
  static ModelSpec infinite_well();
  static ModelSpec harmonic_oscillator();
  static ModelSpec quon(double q);
  static ModelSpec pseudo_boson_power(int k);

  ModelSpec with(SimilarityRecipe recipe) const;

  /// Throws ValidationError on parameter violations.
  void validate() const;
  std::string name() const;
  bool has_position_realization() const;
  /// PoschlTeller(1) is routed to the square well.
  ModelKind effective_kind() const;
};

double analytic_spectrum(const ModelSpec& m, int n);
double ground_energy(const ModelSpec& m);
CharacteristicFunction characteristic_function(const ModelSpec& m);

/// Position interval of the model, or nullopt without a position realization.
std::optional<std::pair<double, double>> model_interval(const ModelSpec& m);

double position_eigenfunction(const ModelSpec& m, int n, double x);

/// Harmonic-oscillator eigenfunctions through the Hermite-function recurrence.
double hermite_function(int n, double x);

struct LadderCoefficients {
  std::function<double(int)> lowering;  // c e_n = lowering(n) e_{n-1}
  std::function<double(int)> raising;   // c^dagger e_n = raising(n) e_{n+1}
};
LadderCoefficients ladder_coefficients(const ModelSpec& m);

/// Self-adjoint realization (c, c^dagger, H) of the model in its number basis.
GhaRealization model_realization(const ModelSpec& m, Index N, Index margin);

/// Poschl-Teller ladder operators in the eigenbasis:
///   B    lowering sqrt(n (n + lambda)(n + 2 lambda - 1) / (n - 1 + lambda))
///   G    diag G(n) = sqrt((n + 2l)(n - 1 + l) / ((n + 2l - 1)(n + l)))
///   T    diag (n + l) / (n + 2l)
///   C    B G(N), lowering sqrt(n (n + 2 lambda))
struct LadderSet {
  double lambda = 1.0;
  TruncatedOperator B, Bdag, Nhat, G, T, C, Cdag;
};

double pt_g(double lambda, double t);
double pt_t(double lambda, double t);

LadderSet pt_ladder_matrices(double lambda, Index N, Index margin = -1);
LadderSet well_ladder_matrices(Index N, Index margin = -1);

/// Interior residuals of the ladder identities for a (possibly edited) set:
///   bdb, cdc, ccd, commutator, intertwine, shift_raise, shift_lower,
///   c_similarity, gt_identity
ResidualReport ladder_algebra_report(const LadderSet& set);
ResidualReport pt_algebra_report(double lambda, Index N, Index margin);

/// Quon triple (a, b, h) with a b - q b a = I on the interior, h = b a = diag([n]_q).
/// A DiagonalOfNumber recipe conjugates the triple.
DghaRealization quon_realization(double q, Index N, Index margin = -1,
                                 const std::optional<SimilarityRecipe>& recipe = std::nullopt);
/// Interior residual of a b - q b a - I.
double quon_commutator_residual(const DghaRealization& d, double q);

/// Default pseudo-boson base: the oscillator pair A = c, B = c^dagger,
/// optionally conjugated by a DiagonalOfNumber recipe so that B != A^dagger.
DghaRealization pseudo_boson_base(Index N, Index margin = -1,
                                  const std::optional<SimilarityRecipe>& recipe = std::nullopt);

/// a = A, b = N0^k B, h = N0^{k+1} with N0 = B A and f = power_shift(k).
DghaRealization pseudo_boson_power(int k, const DghaRealization& base, double tolerance = 1e-10);

/// || (A N0^k - (N0 + 1)^k A) W || and || (N0^k B - B (N0 + 1)^k) W ||.
ResidualReport pseudo_boson_shift_residuals(const DghaRealization& base, int k);

/// Similarity pair for a DiagonalOfNumber recipe: S = diag(sigma(n + 1)).
SimilarityPair number_similarity(const Profile& sigma, Index N, Index margin,
                                 const std::string& basis_tag = "number");

/// Effective potential of the tanh-deformed oscillator, as printed:
/// x^2 / 2 - 2 (1 - tanh x).
double effective_potential(const ModelSpec& m, double x);

struct PotentialMinimum {
  double x = 0.0;
  double value = 0.0;
};
/// Brute-force scan of the effective potential over [lo, hi].
PotentialMinimum effective_potential_argmin(const ModelSpec& m, double lo = -4.0, double hi = 4.0,
                                            double step = 1e-4);

/// Square-well expansion coefficients of (alpha + cos(k0 x)) e_n in the e_m
/// basis, from the product-to-sum identity. Index -1 carries no mode and
/// negative indices fold as e_{-j} = -e_{j-2}.
std::vector<std::pair<int, double>> cosine_multiplier_expansion(double alpha, int k0, int n);

}  // namespace gha
