#include "gha/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gha/error.hpp"

namespace gha {

namespace {

double root_of_order(double x, int order) {
  if (order == 1) return x;
  if (order == 2) return std::sqrt(x);
  if (order == 3) return std::cbrt(x);
  return std::pow(x, 1.0 / order);
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

CharacteristicFunction::CharacteristicFunction(Kind kind, double p0, double p1, double domain_min)
    : kind_(kind), p0_(p0), p1_(p1), domain_min_(domain_min) {}

CharacteristicFunction CharacteristicFunction::affine(double slope, double intercept,
                                                      double domain_min) {
  return CharacteristicFunction(Kind::Affine, slope, intercept, domain_min);
}

CharacteristicFunction CharacteristicFunction::sqrt_shift(double domain_min) {
  return CharacteristicFunction(Kind::SqrtShift, 0.0, 0.0, domain_min);
}

CharacteristicFunction CharacteristicFunction::quon_affine(double q, double domain_min) {
  if (!(q > 0.0 && q <= 1.0)) {
    raise(ErrorCode::DomainError, "quon parameter q must lie in (0, 1], got " + format_double(q));
  }
  return CharacteristicFunction(Kind::QuonAffine, q, 0.0, domain_min);
}

CharacteristicFunction CharacteristicFunction::power_shift(int k, double domain_min) {
  if (k < 1) raise(ErrorCode::DomainError, "power shift requires k >= 1");
  return CharacteristicFunction(Kind::PowerShift, static_cast<double>(k), 0.0, domain_min);
}

CharacteristicFunction CharacteristicFunction::custom(std::function<double(double)> fn,
                                                      std::string name, double domain_min) {
  CharacteristicFunction f(Kind::Custom, 0.0, 0.0, domain_min);
  f.custom_ = std::move(fn);
  f.custom_name_ = std::move(name);
  return f;
}

double CharacteristicFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::Affine:
      return p0_ * x + p1_;
    case Kind::SqrtShift: {
      if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
      const double r = std::sqrt(x) + 1.0;
      return r * r;
    }
    case Kind::QuonAffine:
      return p0_ * x + 1.0;
    case Kind::PowerShift: {
      if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
      const int order = static_cast<int>(p0_) + 1;
      return std::pow(root_of_order(x, order) + 1.0, order);
    }
    case Kind::Custom:
      return custom_(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string CharacteristicFunction::name() const {
  switch (kind_) {
    case Kind::Affine: return "affine(" + format_double(p0_) + "," + format_double(p1_) + ")";
    case Kind::SqrtShift: return "sqrt_shift";
    case Kind::QuonAffine: return "quon_affine(" + format_double(p0_) + ")";
    case Kind::PowerShift: return "power_shift(" + std::to_string(static_cast<int>(p0_)) + ")";
    case Kind::Custom: return "custom(" + custom_name_ + ")";
  }
  return "unknown";
}

bool CharacteristicFunction::is_strictly_increasing(int samples, double span) const {
  if (samples < 2) return true;
  double prev = (*this)(domain_min_);
  if (!std::isfinite(prev)) return false;
  for (int i = 1; i < samples; ++i) {
    // geometric spread so both the neighbourhood of domain_min and the far range are probed
    const double t = static_cast<double>(i) / (samples - 1);
    const double x = domain_min_ + std::expm1(t * std::log1p(span));
    const double y = (*this)(x);
    if (!std::isfinite(y) || !(y > prev)) return false;
    prev = y;
  }
  return true;
}

TruncatedOperator::TruncatedOperator(CMatrix entries, std::string basis_tag, Index interior_margin)
    : entries_(std::move(entries)), basis_tag_(std::move(basis_tag)), margin_(interior_margin) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    raise(ErrorCode::DomainError, "truncated operator must be a non-empty square matrix");
  }
  if (margin_ < 0 || margin_ >= entries_.rows()) {
    raise(ErrorCode::DomainError, "interior margin must satisfy 0 <= m < N");
  }
}

TruncatedOperator TruncatedOperator::identity(Index dim, std::string basis_tag, Index margin) {
  return TruncatedOperator(CMatrix::Identity(dim, dim), std::move(basis_tag), margin);
}

TruncatedOperator TruncatedOperator::diagonal(const RVector& diag, std::string basis_tag,
                                              Index margin) {
  CMatrix m = CMatrix::Zero(diag.size(), diag.size());
  m.diagonal() = diag.cast<Complex>();
  return TruncatedOperator(std::move(m), std::move(basis_tag), margin);
}

Index default_margin(Index N) { return std::max<Index>(2, N / 8); }

const Residual& ResidualReport::at(std::string_view name) const {
  for (const auto& r : entries) {
    if (r.name == name) return r;
  }
  raise(ErrorCode::IndexOutOfRange, "no residual named '" + std::string(name) + "'");
}

bool ResidualReport::contains(std::string_view name) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Residual& r) { return r.name == name; });
}

double ResidualReport::max_frobenius() const {
  double m = 0.0;
  for (const auto& r : entries) m = std::max(m, r.frobenius);
  return m;
}

Residual interior_residual(std::string name, const CMatrix& X, Index interior) {
  const auto block = X.leftCols(interior);
  return Residual{std::move(name), block.norm(), block.cwiseAbs().maxCoeff()};
}

Residual subspace_residual(std::string name, const CMatrix& X, const CMatrix& W) {
  const CMatrix block = X * W;
  return Residual{std::move(name), block.norm(), block.cwiseAbs().maxCoeff()};
}

Spectrum iterate_spectrum(const CharacteristicFunction& f, double epsilon0, int n_max) {
  if (n_max < 0) raise(ErrorCode::IndexOutOfRange, "n_max must be non-negative");
  if (!std::isfinite(epsilon0)) raise(ErrorCode::NonFiniteValue, "epsilon0 is not finite");

  // local monotonicity probe at eps_0
  const double delta = 1e-3 * std::max(1.0, std::abs(epsilon0));
  double prev = f(epsilon0);
  for (int j = 1; j <= 8; ++j) {
    const double y = f(epsilon0 + j * delta);
    if (!std::isfinite(y) || !std::isfinite(prev)) {
      raise(ErrorCode::NonFiniteValue, "characteristic function not finite near eps_0");
    }
    if (!(y > prev)) {
      raise(ErrorCode::NonIncreasingSpectrum,
            "characteristic function " + f.name() + " is not increasing at eps_0");
    }
    prev = y;
  }

  Spectrum s;
  s.epsilon0 = epsilon0;
  s.values.reserve(static_cast<std::size_t>(n_max) + 1);
  s.values.push_back(epsilon0);
  for (int n = 0; n < n_max; ++n) {
    const double next = f(s.values.back());
    if (!std::isfinite(next)) {
      raise(ErrorCode::NonFiniteValue, "eps_" + std::to_string(n + 1) + " is not finite");
    }
    if (!(next > s.values.back())) {
      raise(ErrorCode::NonIncreasingSpectrum,
            "eps_" + std::to_string(n + 1) + " <= eps_" + std::to_string(n));
    }
    s.values.push_back(next);
  }
  return s;
}

double generalized_factorial(const Spectrum& spectrum, int n) {
  if (n < 0 || n > spectrum.n_max()) {
    raise(ErrorCode::IndexOutOfRange, "generalized factorial index " + std::to_string(n) +
                                          " outside [0, " + std::to_string(spectrum.n_max()) + "]");
  }
  double p = 1.0;
  for (int j = 1; j <= n; ++j) p *= spectrum[j] - spectrum.epsilon0;
  return p;
}

GhaRealization build_ladder(const Spectrum& spectrum, const CharacteristicFunction& f, Index N,
                            Index margin, std::string basis_tag) {
  if (N < 1 || spectrum.size() < N) {
    raise(ErrorCode::InsufficientSpectrum, "spectrum has " + std::to_string(spectrum.size()) +
                                               " entries, need " + std::to_string(N));
  }
  CMatrix c = CMatrix::Zero(N, N);
  RVector diag(N);
  for (Index n = 0; n < N; ++n) {
    diag(n) = spectrum[n];
    if (n > 0) c(n - 1, n) = std::sqrt(spectrum[n] - spectrum.epsilon0);
  }
  CMatrix cdag = c.adjoint();
  return GhaRealization{TruncatedOperator(std::move(c), basis_tag, margin),
                        TruncatedOperator(std::move(cdag), basis_tag, margin),
                        TruncatedOperator::diagonal(diag, basis_tag, margin), f, spectrum};
}

CMatrix apply_diagonal(const CharacteristicFunction& f, const CMatrix& diagonal_operator) {
  const Index n = diagonal_operator.rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) out(i, i) = f(diagonal_operator(i, i).real());
  return out;
}

ResidualReport gha_residuals(const GhaRealization& g) {
  const CMatrix& c = g.c.matrix();
  const CMatrix& cd = g.cdag.matrix();
  const CMatrix& H = g.H.matrix();
  const CMatrix fH = apply_diagonal(g.f, H);
  const Index M = g.c.interior_dim();
  const Index N = g.c.dim();
  const CMatrix I = CMatrix::Identity(N, N);

  ResidualReport r;
  r.add(interior_residual("intertwine", c * H - fH * c, M));
  r.add(interior_residual("commutator", c * cd - cd * c - (fH - H), M));
  r.add(interior_residual("factorization", cd * c + g.spectrum.epsilon0 * I - H, M));
  return r;
}

TruncatedOperator susy_partner(const GhaRealization& g) {
  const Index N = g.c.dim();
  CMatrix hs = g.c.matrix() * g.cdag.matrix() + g.spectrum.epsilon0 * CMatrix::Identity(N, N);
  return TruncatedOperator(std::move(hs), g.c.basis_tag(), g.c.margin());
}

double check_annihilation(const CMatrix& c) { return c.col(0).norm(); }

double check_annihilation(const GhaRealization& g) { return check_annihilation(g.c.matrix()); }

}  // namespace gha
