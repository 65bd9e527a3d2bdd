#include "gha/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gha/error.hpp"

namespace gha {

namespace {

bool is_diagonal(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

CMatrix normalized_columns(const CMatrix& m) {
  CMatrix out = m;
  for (Index j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return out;
}

// Thin QR of the family matrix with R carrying a positive real diagonal, so a
// diagonal positive family maps to the leading coordinate vectors exactly.
struct PositiveQr {
  CMatrix Q;
  CMatrix R;
};

PositiveQr positive_qr(const CMatrix& phi) {
  const Index n = phi.cols();
  Eigen::HouseholderQR<CMatrix> qr(phi);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(phi.rows(), n);
  CMatrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const Complex d = R(k, k);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const Complex phase = d / mag;
    Q.col(k) *= phase;
    R.row(k) /= phase;
  }
  return {std::move(Q), std::move(R)};
}

struct HermitianRoot {
  CMatrix root;
  RVector eigenvalues;
};

HermitianRoot hermitian_sqrt(const CMatrix& m, std::vector<std::string>& warnings,
                             const char* label) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  RVector ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-12) {
      raise(ErrorCode::NotPositive,
            std::string(label) + " has eigenvalue " + std::to_string(ev(i)) + " < 0");
    }
    if (ev(i) <= 0.0) {
      warnings.push_back(std::string(label) + ": clamped eigenvalue " + std::to_string(ev(i)) +
                         " to 0");
      ev(i) = 0.0;
    }
  }
  const CMatrix& V = es.eigenvectors();
  CMatrix root = V * ev.cwiseSqrt().cast<Complex>().asDiagonal() * V.adjoint();
  return {std::move(root), es.eigenvalues()};
}

double hermitian_condition(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  const double floor = hi * static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon();
  if (!(lo > floor)) {
    raise(ErrorCode::RankDeficient, "frame operator is numerically singular (lambda_min = " +
                                        std::to_string(lo) + ", lambda_max = " +
                                        std::to_string(hi) + ")");
  }
  return hi / lo;
}

double gap(const DghaRealization& d, Index n) {
  return d.spectrum[n] - d.spectrum.epsilon0;
}

}  // namespace

DghaRealization deform(const GhaRealization& g, const TruncatedOperator& S,
                       const TruncatedOperator& S_inv, double inverse_tolerance) {
  const Index N = g.c.dim();
  if (S_inv.dim() == 0) raise(ErrorCode::SingularMap, "no inverse supplied for the similarity");
  if (S.dim() != N || S_inv.dim() != N) {
    raise(ErrorCode::DomainError, "similarity and realization dimensions differ");
  }
  if (S.basis_tag() != g.c.basis_tag()) {
    raise(ErrorCode::DomainError, "similarity basis '" + S.basis_tag() +
                                      "' differs from realization basis '" + g.c.basis_tag() + "'");
  }
  const CMatrix& s = S.matrix();
  const CMatrix& si = S_inv.matrix();
  const double defect = (s * si - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
  if (!(defect < inverse_tolerance)) {
    raise(ErrorCode::NotInverse, "|| S S_inv - I ||_max = " + std::to_string(defect));
  }

  const Index margin = g.c.margin();
  const std::string& tag = g.c.basis_tag();
  DghaRealization d{
      TruncatedOperator(s * g.c.matrix() * si, tag, margin),
      TruncatedOperator(s * g.cdag.matrix() * si, tag, margin),
      TruncatedOperator(s * g.H.matrix() * si, tag, margin),
      g.f,
      s.col(0),
      si.adjoint().col(0),
      g.spectrum,
      CMatrix()};

  d.phi0 /= d.phi0.norm();
  d.psi0 /= d.psi0.norm();
  const Complex pairing = d.psi0.dot(d.phi0);  // <psi0, phi0>
  d.psi0 /= std::conj(pairing);

  const Index M = g.c.interior_dim();
  if (is_diagonal(s)) {
    d.interior = CMatrix::Identity(N, M);
  } else {
    d.interior = normalized_columns(s.leftCols(M));
  }
  return d;
}

DghaRealization undeformed(const GhaRealization& g) {
  const Index N = g.c.dim();
  const auto I = TruncatedOperator::identity(N, g.c.basis_tag(), g.c.margin());
  return deform(g, I, I);
}

CMatrix BiorthogonalFamily::phi_matrix() const {
  if (phis.empty()) return {};
  CMatrix m(phis.front().size(), size());
  for (Index n = 0; n < size(); ++n) m.col(n) = phis[static_cast<std::size_t>(n)];
  return m;
}

CMatrix BiorthogonalFamily::psi_matrix() const {
  if (psis.empty()) return {};
  CMatrix m(psis.front().size(), size());
  for (Index n = 0; n < size(); ++n) m.col(n) = psis[static_cast<std::size_t>(n)];
  return m;
}

void refresh_gram(BiorthogonalFamily& fam) { fam.gram = fam.psi_matrix().adjoint() * fam.phi_matrix(); }

BiorthogonalFamily build_families(const DghaRealization& d, int n_max) {
  if (n_max < 0 || n_max + d.h.margin() > d.dim()) {
    raise(ErrorCode::IndexOutOfRange, "family depth " + std::to_string(n_max) +
                                          " plus margin exceeds dimension " +
                                          std::to_string(d.dim()));
  }
  if (d.spectrum.n_max() < n_max) {
    raise(ErrorCode::InsufficientSpectrum, "spectrum shorter than the requested family");
  }
  if (!std::isfinite(generalized_factorial(d.spectrum, n_max))) {
    raise(ErrorCode::Overflow, "(eps_n - eps_0)! overflows at n = " + std::to_string(n_max) +
                                   "; reduce n_max");
  }

  const CMatrix& b = d.b.matrix();
  const CMatrix a_dag = d.a.matrix().adjoint();
  BiorthogonalFamily fam;
  fam.interior_dim = d.interior_dim();
  fam.phis.reserve(static_cast<std::size_t>(n_max) + 1);
  fam.psis.reserve(static_cast<std::size_t>(n_max) + 1);
  fam.phis.push_back(d.phi0);
  fam.psis.push_back(d.psi0);
  // dividing by sqrt(eps_n - eps_0) at each step reproduces b^n phi0 / sqrt((eps_n - eps0)!)
  for (int n = 1; n <= n_max; ++n) {
    const double s = std::sqrt(gap(d, n));
    fam.phis.push_back(b * fam.phis.back() / s);
    fam.psis.push_back(a_dag * fam.psis.back() / s);
  }
  refresh_gram(fam);
  return fam;
}

CMatrix characteristic_of(const CMatrix& h, const CharacteristicFunction& f,
                          const DghaOptions& options) {
  Eigen::ComplexEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) {
    raise(ErrorCode::ConvergenceFailure, "eigendecomposition of h did not converge");
  }
  const CMatrix& V = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(V);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!(cond < options.condition_cap)) {
    raise(ErrorCode::DefectiveOperator,
          "eigenvector matrix of h has condition " + std::to_string(cond));
  }
  CVector fl(h.rows());
  for (Index i = 0; i < h.rows(); ++i) fl(i) = f(es.eigenvalues()(i).real());
  return V * fl.asDiagonal() * V.inverse();
}

ResidualReport dgha_residuals(const DghaRealization& d, const BiorthogonalFamily& fam,
                              const DghaOptions& options) {
  const CMatrix& a = d.a.matrix();
  const CMatrix& b = d.b.matrix();
  const CMatrix& h = d.h.matrix();
  const CMatrix fh = characteristic_of(h, d.f, options);
  const CMatrix& W = d.interior;

  ResidualReport r;
  r.add(subspace_residual("r21a", h * b - b * fh, W));
  r.add(subspace_residual("r21b", a * h - fh * a, W));
  r.add(subspace_residual("r25", a * b - b * a - (fh - h), W));

  const CMatrix a_dag = a.adjoint();
  const CMatrix b_dag = b.adjoint();
  const Index count = std::min(fam.size(), d.interior_dim());
  // family norms may grow factorially (pseudo-boson powers), so each vector
  // residual is taken relative to the size of the term it should reproduce
  double r26a = 0.0, r26b = 0.0, ba = 0.0, ab = 0.0, adbd = 0.0, bdad = 0.0;
  double m26a = 0.0, m26b = 0.0;
  for (Index n = 0; n < count; ++n) {
    const CVector& phi = fam.phis[static_cast<std::size_t>(n)];
    const CVector& psi = fam.psis[static_cast<std::size_t>(n)];
    const double lower = gap(d, n);
    const double upper = d.f(d.spectrum[n]) - d.spectrum.epsilon0;
    if (n > 0) {
      const double s = std::sqrt(lower);
      const CVector& phi_prev = fam.phis[static_cast<std::size_t>(n - 1)];
      const CVector& psi_prev = fam.psis[static_cast<std::size_t>(n - 1)];
      const CVector ra = (a * phi - s * phi_prev) / (s * phi_prev.norm());
      const CVector rb = (b_dag * psi - s * psi_prev) / (s * psi_prev.norm());
      r26a = std::max(r26a, ra.norm());
      r26b = std::max(r26b, rb.norm());
      m26a = std::max(m26a, ra.cwiseAbs().maxCoeff());
      m26b = std::max(m26b, rb.cwiseAbs().maxCoeff());
    }
    const double phi_scale = phi.norm();
    const double psi_scale = psi.norm();
    ba = std::max(ba, (b * (a * phi) - lower * phi).norm() / (std::max(1.0, lower) * phi_scale));
    ab = std::max(ab, (a * (b * phi) - upper * phi).norm() / (std::max(1.0, upper) * phi_scale));
    adbd = std::max(adbd, (a_dag * (b_dag * psi) - lower * psi).norm() / (std::max(1.0, lower) * psi_scale));
    bdad = std::max(bdad, (b_dag * (a_dag * psi) - upper * psi).norm() / (std::max(1.0, upper) * psi_scale));
  }
  r.add({"r26a", r26a, m26a});
  r.add({"r26b", r26b, m26b});
  r.add({"r27_ba", ba, ba});
  r.add({"r27_ab", ab, ab});
  r.add({"r27_adbd", adbd, adbd});
  r.add({"r27_bdad", bdad, bdad});
  const double p1 = (a * d.phi0).norm();
  const double p2 = (b_dag * d.psi0).norm();
  r.add({"annihilate_phi0", p1, p1});
  r.add({"annihilate_psi0", p2, p2});
  return r;
}

double Eigencheck::max() const {
  double m = 0.0;
  for (double v : right) m = std::max(m, v);
  for (double v : left) m = std::max(m, v);
  return m;
}

Eigencheck eigencheck(const DghaRealization& d, const BiorthogonalFamily& fam) {
  const CMatrix& h = d.h.matrix();
  const CMatrix h_dag = h.adjoint();
  Eigencheck out;
  for (Index n = 0; n < fam.size(); ++n) {
    const CVector& phi = fam.phis[static_cast<std::size_t>(n)];
    const CVector& psi = fam.psis[static_cast<std::size_t>(n)];
    const double e = d.spectrum[n];
    out.right.push_back((h * phi - e * phi).norm() / phi.norm());
    out.left.push_back((h_dag * psi - e * psi).norm() / psi.norm());
  }
  return out;
}

GaussianSource::GaussianSource(std::uint64_t seed) : engine_(seed) {}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms; u1 is kept away from zero for the logarithm
  const double u1 = 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex GaussianSource::next_complex() {
  const double re = next();
  const double im = next();
  return {re, im};
}

QuasiBasisResult quasi_basis_check(const BiorthogonalFamily& fam, int trials, std::uint64_t seed) {
  if (trials < 1) raise(ErrorCode::DomainError, "quasi-basis check needs at least one trial");
  const CMatrix Phi = fam.phi_matrix();
  const CMatrix Psi = fam.psi_matrix();
  const Index dim = Phi.rows();
  const Index support = std::min(fam.interior_dim > 0 ? fam.interior_dim : dim, dim);

  GaussianSource rng(seed);
  QuasiBasisResult out;
  for (int t = 0; t < trials; ++t) {
    CVector f = CVector::Zero(dim);
    CVector g = CVector::Zero(dim);
    for (Index i = 0; i < support; ++i) f(i) = rng.next_complex();
    for (Index i = 0; i < support; ++i) g(i) = rng.next_complex();
    f /= f.norm();
    g /= g.norm();
    const Complex inner = f.dot(g);
    const CVector f_psi = Psi.adjoint() * f;  // conj(<f, psi_n>)
    const CVector g_phi = Phi.adjoint() * g;  // <phi_n, g>
    const CVector f_phi = Phi.adjoint() * f;
    const CVector g_psi = Psi.adjoint() * g;
    const Complex direct = f_psi.dot(g_phi);   // sum <f, psi_n><phi_n, g>
    const Complex swapped = f_phi.dot(g_psi);  // sum <f, phi_n><psi_n, g>
    out.direct = std::max(out.direct, std::abs(inner - direct));
    out.swapped = std::max(out.swapped, std::abs(inner - swapped));
  }
  return out;
}

FrameDiagnostics frame_diagnostics(const BiorthogonalFamily& fam, double condition_cap) {
  if (fam.size() == 0) raise(ErrorCode::RankDeficient, "empty family");
  const auto [Q, R] = positive_qr(fam.phi_matrix());
  const CMatrix psi_q = Q.adjoint() * fam.psi_matrix();
  const CMatrix s_phi = R * R.adjoint();
  const CMatrix s_psi = psi_q * psi_q.adjoint();

  FrameDiagnostics out;
  out.s_phi_condition = hermitian_condition(s_phi);
  out.s_psi_condition = hermitian_condition(s_psi);
  out.frame_inverse_residual =
      (s_phi * s_psi - CMatrix::Identity(fam.size(), fam.size())).norm();
  out.quasi_basis_residual = quasi_basis_check(fam, 8, 0).max();
  out.riesz_flag = out.s_phi_condition < condition_cap && out.s_psi_condition < condition_cap;
  return out;
}

ReconstructedGha reconstruct_gha(const DghaRealization& d, const BiorthogonalFamily& fam) {
  if (fam.size() < 2) raise(ErrorCode::RankDeficient, "family too small to reconstruct");
  ReconstructedGha out;
  auto [Q, R] = positive_qr(fam.phi_matrix());
  const Index n = fam.size();
  const CMatrix s_phi = R * R.adjoint();
  hermitian_condition(s_phi);

  // S_psi^{1/2} is taken as S_phi^{-1/2}: the two agree when span{psi_n} =
  // span{phi_n}, and only the latter is guaranteed for a truncated family
  const HermitianRoot root = hermitian_sqrt(s_phi, out.warnings, "S_phi");
  const CMatrix& phi_half = root.root;
  const CMatrix psi_half = phi_half.inverse();

  out.c = psi_half * (Q.adjoint() * d.a.matrix() * Q) * phi_half;
  out.cdag = psi_half * (Q.adjoint() * d.b.matrix() * Q) * phi_half;
  out.H = psi_half * (Q.adjoint() * d.h.matrix() * Q) * phi_half;
  out.basis = psi_half * R;
  out.Q = std::move(Q);

  // b pushes the top family member out of span{phi_n}; in the reconstructed
  // basis that leak stays in the last column, so identities use the rest
  const Index k = n - 1;
  RVector eps(k);
  for (Index i = 0; i < k; ++i) eps(i) = d.spectrum[i];
  const CMatrix& e = out.basis;
  const CMatrix c_e = (e.adjoint() * out.c * e).topLeftCorner(k, k);
  const CMatrix cdag_e = (e.adjoint() * out.cdag * e).topLeftCorner(k, k);
  const CMatrix H_e = (e.adjoint() * out.H * e).topLeftCorner(k, k);
  const CMatrix adjoint_gap = c_e - cdag_e.adjoint();
  const CMatrix h_in_basis = H_e - CMatrix(eps.cast<Complex>().asDiagonal());
  const CMatrix ortho = e.adjoint() * e - CMatrix::Identity(n, n);
  // (c^dagger c)_{ij} for i, j < k only involves c columns below the top
  const CMatrix c_full = e.adjoint() * out.c * e;
  const CMatrix cdag_full = e.adjoint() * out.cdag * e;
  const CMatrix factor =
      cdag_full.topRows(k) * c_full.leftCols(k) + d.spectrum.epsilon0 * CMatrix::Identity(k, k) - H_e;
  out.residuals.add({"self_adjoint", adjoint_gap.norm(), adjoint_gap.cwiseAbs().maxCoeff()});
  out.residuals.add({"h_diagonal", h_in_basis.norm(), h_in_basis.cwiseAbs().maxCoeff()});
  out.residuals.add({"orthonormality", ortho.norm(), ortho.cwiseAbs().maxCoeff()});
  out.residuals.add({"factorization", factor.norm(), factor.cwiseAbs().maxCoeff()});
  return out;
}

NlpbReport nlpb_check(const DghaRealization& d, const BiorthogonalFamily& fam) {
  const CMatrix& a = d.a.matrix();
  const CMatrix& b = d.b.matrix();
  const CMatrix b_dag = b.adjoint();
  const CMatrix comm = a * b - b * a;

  NlpbReport out;
  out.p1 = (a * d.phi0).norm();
  out.p2 = (b_dag * d.psi0).norm();
  const Index count = std::min(fam.size(), d.interior_dim());
  out.min_positivity = std::numeric_limits<double>::infinity();
  for (Index n = 0; n < count; ++n) {
    const CVector& phi = fam.phis[static_cast<std::size_t>(n)];
    const CVector& psi = fam.psis[static_cast<std::size_t>(n)];
    if (n > 0) {
      // shifted spectrum: eps'_n = eps_n - eps_0
      const double s = std::sqrt(d.spectrum[n] - d.spectrum.epsilon0);
      const CVector& phi_prev = fam.phis[static_cast<std::size_t>(n - 1)];
      const CVector& psi_prev = fam.psis[static_cast<std::size_t>(n - 1)];
      out.p3_phi = std::max(out.p3_phi, (a * phi - s * phi_prev).norm() / (s * phi_prev.norm()));
      out.p3_psi = std::max(out.p3_psi, (b_dag * psi - s * psi_prev).norm() / (s * psi_prev.norm()));
    }
    const double value = phi.dot(comm * phi).real() / phi.squaredNorm();
    const double g = d.f(d.spectrum[n]) - d.spectrum[n];
    out.positivity.push_back(value);
    out.gaps.push_back(g);
    out.positivity_residual = std::max(out.positivity_residual, std::abs(value - g));
    out.min_positivity = std::min(out.min_positivity, value);
  }
  return out;
}

}  // namespace gha
