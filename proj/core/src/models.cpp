#include "gha/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gha/error.hpp"
#include "gha/special_functions.hpp"

namespace gha {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

double power_int(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles and recipes

Profile Profile::inverse_cosine(double alpha, int k0) { return {Kind::InverseCosine, alpha, k0, {}}; }

Profile Profile::custom_samples(std::vector<double> values) {
  return {Kind::CustomSamples, 0.0, 0, std::move(values)};
}

double Profile::value(double x) const {
  switch (kind) {
    case Kind::RationalPT: return (1.0 + 2.0 * x) / (1.0 + x);
    case Kind::TanhShift: return 2.0 + std::tanh(x);
    case Kind::InverseCosine: return 1.0 / (alpha + std::cos(k0 * x));
    case Kind::CustomSamples: break;
  }
  raise(ErrorCode::Unsupported, "custom sample profiles have no pointwise closed form");
}

double Profile::derivative(double x) const {
  switch (kind) {
    case Kind::RationalPT: return 1.0 / ((1.0 + x) * (1.0 + x));
    case Kind::TanhShift: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Kind::InverseCosine: {
      const double s = alpha + std::cos(k0 * x);
      return k0 * std::sin(k0 * x) / (s * s);
    }
    case Kind::CustomSamples: break;
  }
  raise(ErrorCode::Unsupported, "custom sample profiles have no derivative");
}

double Profile::second_derivative(double x) const {
  switch (kind) {
    case Kind::RationalPT: return -2.0 / ((1.0 + x) * (1.0 + x) * (1.0 + x));
    case Kind::TanhShift: {
      const double t = std::tanh(x);
      return -2.0 * t * (1.0 - t * t);
    }
    case Kind::InverseCosine: {
      const double s = alpha + std::cos(k0 * x);
      const double k2 = static_cast<double>(k0) * k0;
      const double sn = std::sin(k0 * x);
      return k2 * std::cos(k0 * x) / (s * s) + 2.0 * k2 * sn * sn / (s * s * s);
    }
    case Kind::CustomSamples: break;
  }
  raise(ErrorCode::Unsupported, "custom sample profiles have no derivative");
}

std::vector<double> Profile::sample(const std::vector<double>& nodes) const {
  if (kind == Kind::CustomSamples) {
    if (samples.size() != nodes.size()) {
      raise(ErrorCode::DomainError, "custom profile has " + std::to_string(samples.size()) +
                                        " samples for " + std::to_string(nodes.size()) + " nodes");
    }
    return samples;
  }
  std::vector<double> out(nodes.size());
  std::transform(nodes.begin(), nodes.end(), out.begin(), [&](double x) { return value(x); });
  return out;
}

std::pair<double, double> Profile::bounds(double domain_min) const {
  switch (kind) {
    case Kind::RationalPT: return {value(std::max(domain_min, 0.0)), 2.0};
    case Kind::TanhShift:
      return {std::isfinite(domain_min) ? value(domain_min) : 1.0, 3.0};
    case Kind::InverseCosine: return {1.0 / (alpha + 1.0), 1.0 / (alpha - 1.0)};
    case Kind::CustomSamples: {
      const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
      return {*lo, *hi};
    }
  }
  return {0.0, 0.0};
}

std::string Profile::name() const {
  switch (kind) {
    case Kind::RationalPT: return "rational_pt";
    case Kind::TanhShift: return "tanh_shift";
    case Kind::InverseCosine: return "inverse_cosine(alpha=" + fmt(alpha) + ",k0=" + std::to_string(k0) + ")";
    case Kind::CustomSamples: return "custom_samples";
  }
  return "unknown";
}

void Profile::validate() const {
  if (kind == Kind::InverseCosine) {
    if (!(alpha > 1.0)) raise(ErrorCode::ValidationError, "inverse_cosine requires alpha > 1");
    if (k0 < 1) raise(ErrorCode::ValidationError, "inverse_cosine requires k0 >= 1");
  }
  if (kind == Kind::CustomSamples) {
    if (samples.empty()) raise(ErrorCode::ValidationError, "custom profile has no samples");
    for (double s : samples) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        raise(ErrorCode::ValidationError, "custom profile samples must be positive and finite");
      }
    }
  }
}

std::string SimilarityRecipe::name() const {
  return (kind == Kind::DiagonalOfNumber ? "diagonal_of_number:" : "multiplication:") +
         profile.name();
}

// ---------------------------------------------------------------------------
// Model specs

ModelSpec ModelSpec::poschl_teller(double lambda) {
  ModelSpec m;
  m.kind = ModelKind::PoschlTeller;
  m.lambda = lambda;
  return m;
}

ModelSpec ModelSpec::infinite_well() { return ModelSpec{}; }

ModelSpec ModelSpec::harmonic_oscillator() {
  ModelSpec m;
  m.kind = ModelKind::HarmonicOscillator;
  return m;
}

ModelSpec ModelSpec::quon(double q) {
  ModelSpec m;
  m.kind = ModelKind::Quon;
  m.q = q;
  return m;
}

ModelSpec ModelSpec::pseudo_boson_power(int k) {
  ModelSpec m;
  m.kind = ModelKind::PseudoBosonPower;
  m.k = k;
  return m;
}

ModelSpec ModelSpec::with(SimilarityRecipe recipe) const {
  ModelSpec m = *this;
  m.deformation = std::move(recipe);
  return m;
}

void ModelSpec::validate() const {
  switch (kind) {
    case ModelKind::PoschlTeller:
      if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
        raise(ErrorCode::ValidationError, "poschl_teller requires lambda >= 1, got " + fmt(lambda));
      }
      break;
    case ModelKind::Quon:
      if (!(q > 0.0 && q <= 1.0)) {
        raise(ErrorCode::ValidationError,
              "quon requires q in (0, 1] for an increasing characteristic function, got " + fmt(q));
      }
      break;
    case ModelKind::PseudoBosonPower:
      if (k < 1) raise(ErrorCode::ValidationError, "pseudo_boson_power requires k >= 1");
      break;
    default:
      break;
  }
  if (deformation) {
    deformation->profile.validate();
    if (deformation->kind == SimilarityRecipe::Kind::MultiplicationFunction &&
        !has_position_realization()) {
      raise(ErrorCode::ValidationError,
            name() + " has no position realization; use a diagonal_of_number deformation");
    }
  }
}

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::PoschlTeller: return "poschl_teller(lambda=" + fmt(lambda) + ")";
    case ModelKind::InfiniteWell: return "infinite_well";
    case ModelKind::HarmonicOscillator: return "harmonic_oscillator";
    case ModelKind::Quon: return "quon(q=" + fmt(q) + ")";
    case ModelKind::PseudoBosonPower: return "pseudo_boson_power(k=" + std::to_string(k) + ")";
  }
  return "unknown";
}

bool ModelSpec::has_position_realization() const {
  return kind == ModelKind::PoschlTeller || kind == ModelKind::InfiniteWell ||
         kind == ModelKind::HarmonicOscillator;
}

ModelKind ModelSpec::effective_kind() const {
  if (kind == ModelKind::PoschlTeller && lambda == 1.0) return ModelKind::InfiniteWell;
  return kind;
}

double analytic_spectrum(const ModelSpec& m, int n) {
  if (n < 0) raise(ErrorCode::IndexOutOfRange, "spectrum index must be non-negative");
  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller: return (n + m.lambda) * (n + m.lambda);
    case ModelKind::InfiniteWell: return (n + 1.0) * (n + 1.0);
    case ModelKind::HarmonicOscillator: return n;
    case ModelKind::Quon:
      if (m.q == 1.0) return n;
      return (1.0 - std::pow(m.q, n)) / (1.0 - m.q);
    case ModelKind::PseudoBosonPower: return power_int(n, m.k + 1);
  }
  return 0.0;
}

double ground_energy(const ModelSpec& m) { return analytic_spectrum(m, 0); }

CharacteristicFunction characteristic_function(const ModelSpec& m) {
  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller:
    case ModelKind::InfiniteWell: return CharacteristicFunction::sqrt_shift(ground_energy(m));
    case ModelKind::HarmonicOscillator: return CharacteristicFunction::affine(1.0, 1.0, 0.0);
    case ModelKind::Quon: return CharacteristicFunction::quon_affine(m.q, 0.0);
    case ModelKind::PseudoBosonPower: return CharacteristicFunction::power_shift(m.k, 0.0);
  }
  raise(ErrorCode::Unsupported, "unknown model");
}

std::optional<std::pair<double, double>> model_interval(const ModelSpec& m) {
  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller:
    case ModelKind::InfiniteWell: return std::make_pair(0.0, std::numbers::pi);
    case ModelKind::HarmonicOscillator: return std::make_pair(-8.0, 8.0);
    default: return std::nullopt;
  }
}

double hermite_function(int n, double x) {
  if (n < 0) raise(ErrorCode::DomainError, "Hermite index must be non-negative");
  const double h0 = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  if (n == 0) return h0;
  double prev = h0;
  double cur = std::sqrt(2.0) * x * h0;
  for (int k = 2; k <= n; ++k) {
    const double next = std::sqrt(2.0 / k) * x * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double position_eigenfunction(const ModelSpec& m, int n, double x) {
  if (n < 0) raise(ErrorCode::DomainError, "eigenfunction index must be non-negative");
  switch (m.effective_kind()) {
    case ModelKind::InfiniteWell:
    case ModelKind::PoschlTeller: {
      if (x < 0.0 || x > std::numbers::pi) {
        raise(ErrorCode::DomainError, "x = " + fmt(x) + " outside [0, pi]");
      }
      if (m.effective_kind() == ModelKind::InfiniteWell) {
        return std::sqrt(2.0 / std::numbers::pi) * std::sin((n + 1.0) * x);
      }
      return normalized_eigenfunction(n, m.lambda, std::cos(x));
    }
    case ModelKind::HarmonicOscillator:
      if (!std::isfinite(x)) raise(ErrorCode::DomainError, "x must be finite");
      return hermite_function(n, x);
    default:
      raise(ErrorCode::Unsupported, m.name() + " has no position realization");
  }
}

LadderCoefficients ladder_coefficients(const ModelSpec& m) {
  const double e0 = ground_energy(m);
  return {[m, e0](int n) { return n > 0 ? std::sqrt(analytic_spectrum(m, n) - e0) : 0.0; },
          [m, e0](int n) { return std::sqrt(analytic_spectrum(m, n + 1) - e0); }};
}

GhaRealization model_realization(const ModelSpec& m, Index N, Index margin) {
  m.validate();
  const auto f = characteristic_function(m);
  const auto spectrum = iterate_spectrum(f, ground_energy(m), static_cast<int>(N));
  return build_ladder(spectrum, f, N, margin, "number:" + m.name());
}

// ---------------------------------------------------------------------------
// Poschl-Teller ladders

double pt_g(double lambda, double t) {
  return std::sqrt((t + 2.0 * lambda) * (t - 1.0 + lambda) /
                   ((t + 2.0 * lambda - 1.0) * (t + lambda)));
}

double pt_t(double lambda, double t) { return (t + lambda) / (t + 2.0 * lambda); }

namespace {

LadderSet build_ladder_set(double lambda, Index N, Index margin) {
  if (N < 2) raise(ErrorCode::DomainError, "ladder matrices need N >= 2");
  if (margin < 0) margin = default_margin(N);
  const std::string tag = "pt_eigen(lambda=" + fmt(lambda) + ")";
  CMatrix B = CMatrix::Zero(N, N);
  RVector n_hat(N), g(N), t(N);
  for (Index n = 0; n < N; ++n) {
    const double dn = static_cast<double>(n);
    n_hat(n) = dn;
    g(n) = pt_g(lambda, dn);
    t(n) = pt_t(lambda, dn);
    if (n > 0) {
      B(n - 1, n) = std::sqrt(dn * (dn + lambda) * (dn + 2.0 * lambda - 1.0) / (dn - 1.0 + lambda));
    }
  }
  const CMatrix G = g.cast<Complex>().asDiagonal();
  CMatrix C = B * G;
  CMatrix Cdag = G * B.adjoint();
  CMatrix Bdag = B.adjoint();
  return LadderSet{lambda,
                   TruncatedOperator(std::move(B), tag, margin),
                   TruncatedOperator(std::move(Bdag), tag, margin),
                   TruncatedOperator::diagonal(n_hat, tag, margin),
                   TruncatedOperator::diagonal(g, tag, margin),
                   TruncatedOperator::diagonal(t, tag, margin),
                   TruncatedOperator(std::move(C), tag, margin),
                   TruncatedOperator(std::move(Cdag), tag, margin)};
}

CMatrix diag_of(const std::function<double(double)>& fn, Index N, double shift) {
  CMatrix m = CMatrix::Zero(N, N);
  for (Index n = 0; n < N; ++n) m(n, n) = fn(static_cast<double>(n) + shift);
  return m;
}

}  // namespace

LadderSet pt_ladder_matrices(double lambda, Index N, Index margin) {
  if (!(lambda > 1.0)) {
    raise(ErrorCode::DomainError, "Poschl-Teller ladder matrices need lambda > 1 (lambda = 1 is "
                                  "the square well)");
  }
  return build_ladder_set(lambda, N, margin);
}

LadderSet well_ladder_matrices(Index N, Index margin) { return build_ladder_set(1.0, N, margin); }

ResidualReport ladder_algebra_report(const LadderSet& set) {
  const double lambda = set.lambda;
  const Index N = set.B.dim();
  const Index M = set.B.interior_dim();
  const double eps0 = lambda * lambda;
  const auto f = CharacteristicFunction::sqrt_shift(eps0);

  RVector eps(N), f_eps(N), bdb_target(N);
  for (Index n = 0; n < N; ++n) {
    eps(n) = (n + lambda) * (n + lambda);
    f_eps(n) = f(eps(n));
    const double gn = set.G.matrix()(n, n).real();
    const double shifted = eps(n) - eps0;
    bdb_target(n) = shifted == 0.0 ? 0.0 : shifted / (gn * gn);
  }
  const CMatrix H = eps.cast<Complex>().asDiagonal();
  const CMatrix fH = f_eps.cast<Complex>().asDiagonal();
  const CMatrix I = CMatrix::Identity(N, N);
  const CMatrix& B = set.B.matrix();
  const CMatrix& Bd = set.Bdag.matrix();
  const CMatrix& C = set.C.matrix();
  const CMatrix& Cd = set.Cdag.matrix();

  ResidualReport r;
  r.add(interior_residual("bdb", Bd * B - CMatrix(bdb_target.cast<Complex>().asDiagonal()), M));
  r.add(interior_residual("cdc", Cd * C - (H - eps0 * I), M));
  r.add(interior_residual("ccd", C * Cd - (fH - eps0 * I), M));
  r.add(interior_residual("commutator", C * Cd - Cd * C - (fH - H), M));
  r.add(interior_residual("intertwine", C * H - fH * C, M));

  // shift rules for a smooth function of the number operator; T is finite at t = -1
  const auto smooth = [lambda](double t) { return pt_t(lambda, t); };
  r.add(interior_residual("shift_raise", diag_of(smooth, N, 1.0) * B - B * diag_of(smooth, N, 0.0), M));
  r.add(interior_residual("shift_lower", diag_of(smooth, N, -1.0) * Bd - Bd * diag_of(smooth, N, 0.0), M));

  const auto root_t = [lambda](double t) { return std::sqrt(pt_t(lambda, t)); };
  const auto inv_root_t = [lambda](double t) { return 1.0 / std::sqrt(pt_t(lambda, t)); };
  r.add(interior_residual("c_similarity",
                          C - diag_of(root_t, N, 0.0) * B * diag_of(inv_root_t, N, 0.0), M));

  double gt = 0.0;
  for (Index n = 0; n < M; ++n) {
    const double expected = std::sqrt(pt_t(lambda, n - 1.0) / pt_t(lambda, static_cast<double>(n)));
    gt = std::max(gt, std::abs(set.G.matrix()(n, n).real() - expected));
  }
  r.add({"gt_identity", gt, gt});
  return r;
}

ResidualReport pt_algebra_report(double lambda, Index N, Index margin) {
  if (lambda == 1.0) return ladder_algebra_report(well_ladder_matrices(N, margin));
  return ladder_algebra_report(pt_ladder_matrices(lambda, N, margin));
}

// ---------------------------------------------------------------------------
// Quons and pseudo-bosons

SimilarityPair number_similarity(const Profile& sigma, Index N, Index margin,
                                 const std::string& basis_tag) {
  RVector s(N), si(N);
  for (Index n = 0; n < N; ++n) {
    s(n) = sigma.value(static_cast<double>(n) + 1.0);
    if (!(std::abs(s(n)) > 1e-10)) {
      raise(ErrorCode::SingularMap, "sigma(" + std::to_string(n + 1) + ") vanishes");
    }
    si(n) = 1.0 / s(n);
  }
  return {TruncatedOperator::diagonal(s, basis_tag, margin),
          TruncatedOperator::diagonal(si, basis_tag, margin)};
}

namespace {

DghaRealization apply_number_recipe(const GhaRealization& g,
                                    const std::optional<SimilarityRecipe>& recipe) {
  if (!recipe) return undeformed(g);
  if (recipe->kind != SimilarityRecipe::Kind::DiagonalOfNumber) {
    raise(ErrorCode::Unsupported, "number-basis models accept only diagonal_of_number deformations");
  }
  const auto pair = number_similarity(recipe->profile, g.c.dim(), g.c.margin(), g.c.basis_tag());
  return deform(g, pair.S, pair.S_inv);
}

}  // namespace

DghaRealization quon_realization(double q, Index N, Index margin,
                                 const std::optional<SimilarityRecipe>& recipe) {
  if (!(q > 0.0 && q <= 1.0)) {
    raise(ErrorCode::DomainError, "quon parameter must lie in (0, 1], got " + fmt(q));
  }
  if (margin < 0) margin = default_margin(N);
  const auto f = CharacteristicFunction::quon_affine(q, 0.0);
  const auto spectrum = iterate_spectrum(f, 0.0, static_cast<int>(N));
  const auto g = build_ladder(spectrum, f, N, margin, "number:quon(q=" + fmt(q) + ")");
  return apply_number_recipe(g, recipe);
}

double quon_commutator_residual(const DghaRealization& d, double q) {
  const CMatrix& a = d.a.matrix();
  const CMatrix& b = d.b.matrix();
  const Index N = d.dim();
  return (( a * b - q * (b * a) - CMatrix::Identity(N, N)) * d.interior).norm();
}

DghaRealization pseudo_boson_base(Index N, Index margin,
                                  const std::optional<SimilarityRecipe>& recipe) {
  if (margin < 0) margin = default_margin(N);
  const auto g = model_realization(ModelSpec::harmonic_oscillator(), N, margin);
  return apply_number_recipe(g, recipe);
}

namespace {

CMatrix matrix_power(const CMatrix& m, int k) {
  CMatrix r = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

}  // namespace

DghaRealization pseudo_boson_power(int k, const DghaRealization& base, double tolerance) {
  if (k < 1) raise(ErrorCode::DomainError, "pseudo-boson power requires k >= 1");
  const CMatrix& A = base.a.matrix();
  const CMatrix& B = base.b.matrix();
  const Index N = base.dim();
  const double defect = ((A * B - B * A - CMatrix::Identity(N, N)) * base.interior).norm();
  if (!(defect <= tolerance)) {
    raise(ErrorCode::NonPseudoBosonic, "base commutator [A, B] - I has interior residual " +
                                           std::to_string(defect));
  }
  const CMatrix N0 = B * A;
  const CMatrix N0k = matrix_power(N0, k);
  const std::string& tag = base.h.basis_tag();
  const Index margin = base.h.margin();
  const auto f = CharacteristicFunction::power_shift(k, 0.0);
  DghaRealization d{TruncatedOperator(A, tag, margin),
                    TruncatedOperator(N0k * B, tag, margin),
                    TruncatedOperator(N0k * N0, tag, margin),
                    f,
                    base.phi0,
                    base.psi0,
                    iterate_spectrum(f, 0.0, static_cast<int>(N)),
                    base.interior};
  return d;
}

ResidualReport pseudo_boson_shift_residuals(const DghaRealization& base, int k) {
  const CMatrix& A = base.a.matrix();
  const CMatrix& B = base.b.matrix();
  const Index N = base.dim();
  const CMatrix N0 = B * A;
  const CMatrix N0k = matrix_power(N0, k);
  const CMatrix N1k = matrix_power(N0 + CMatrix::Identity(N, N), k);
  ResidualReport r;
  r.add(subspace_residual("a_shift", A * N0k - N1k * A, base.interior));
  r.add(subspace_residual("b_shift", N0k * B - B * N1k, base.interior));
  return r;
}

// ---------------------------------------------------------------------------
// Figure data and square-well helpers

double effective_potential(const ModelSpec& m, double x) {
  if (m.kind != ModelKind::HarmonicOscillator || !m.deformation ||
      m.deformation->kind != SimilarityRecipe::Kind::MultiplicationFunction ||
      m.deformation->profile.kind != Profile::Kind::TanhShift) {
    raise(ErrorCode::Unsupported, "effective potential is defined for the tanh-deformed oscillator");
  }
  return 0.5 * x * x - 2.0 * (1.0 - std::tanh(x));
}

PotentialMinimum effective_potential_argmin(const ModelSpec& m, double lo, double hi, double step) {
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  PotentialMinimum best{lo, effective_potential(m, lo)};
  for (long i = 1; i <= count; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = effective_potential(m, x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

std::vector<std::pair<int, double>> cosine_multiplier_expansion(double alpha, int k0, int n) {
  std::vector<std::pair<int, double>> terms{{n, alpha}, {n + k0, 0.5}};
  const int low = n - k0;
  if (low >= 0) {
    terms.emplace_back(low, 0.5);
  } else if (low <= -2) {
    terms.emplace_back(-low - 2, -0.5);
  }
  return terms;
}

}  // namespace gha
