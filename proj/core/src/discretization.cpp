#include "gha/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

#include "gha/error.hpp"

namespace gha {

namespace {

constexpr double kPotentialCap = 1e12;
constexpr double kNearZeroSample = 1e-10;

double pt_potential(double lambda, double x) {
  const double s = std::sin(x);
  const double v = lambda * (lambda - 1.0) / (s * s);
  return std::isfinite(v) ? std::min(v, kPotentialCap) : kPotentialCap;
}

double model_potential(const ModelSpec& m, double x) {
  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller: return pt_potential(m.lambda, x);
    case ModelKind::InfiniteWell: return 0.0;
    case ModelKind::HarmonicOscillator: return 0.5 * x * x - 0.5;
    default: raise(ErrorCode::Unsupported, m.name() + " has no position realization");
  }
}

double model_kinetic(const ModelSpec& m) {
  return m.effective_kind() == ModelKind::HarmonicOscillator ? 0.5 : 1.0;
}

// -kinetic d^2 with Dirichlet walls
RMatrix second_difference(const Grid& grid, double kinetic) {
  const int n = grid.n_points;
  const double w = kinetic / (grid.spacing() * grid.spacing());
  RMatrix H = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 2.0 * w;
    if (i > 0) H(i, i - 1) = -w;
    if (i + 1 < n) H(i, i + 1) = -w;
  }
  return H;
}

void add_first_difference(RMatrix& H, const Grid& grid, const std::vector<double>& coefficient) {
  const int n = grid.n_points;
  const double inv2h = 0.5 / grid.spacing();
  for (int i = 0; i < n; ++i) {
    const double c = coefficient[static_cast<std::size_t>(i)] * inv2h;
    if (i + 1 < n) H(i, i + 1) += c;
    if (i > 0) H(i, i - 1) -= c;
  }
}

double printed_potential(const PrintedForm& form, double x) {
  switch (form.kind) {
    case PrintedForm::Kind::PtHam: return form.lambda == 1.0 ? 0.0 : pt_potential(form.lambda, x);
    case PrintedForm::Kind::HoHhod: return 0.5 * x * x;
    case PrintedForm::Kind::WellCosine: return 0.0;
  }
  return 0.0;
}

double discrete_norm(const CVector& v, double spacing) { return std::sqrt(spacing) * v.norm(); }

struct SortedIndex {
  double re;
  double im;
  Index j;
};

}  // namespace

// ---------------------------------------------------------------------------
// Grids and operators

Grid Grid::make(double x_min, double x_max, int n_points) {
  if (n_points < 16) raise(ErrorCode::DomainError, "grid needs at least 16 interior nodes");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    raise(ErrorCode::DomainError, "grid interval must be finite with x_max > x_min");
  }
  return Grid{x_min, x_max, n_points};
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) out[static_cast<std::size_t>(i)] = node(i);
  return out;
}

Grid default_grid(const ModelSpec& m, int n_points) {
  const auto interval = model_interval(m);
  if (!interval) raise(ErrorCode::Unsupported, m.name() + " has no position realization");
  return Grid::make(interval->first, interval->second, n_points);
}

RMatrix build_hamiltonian(const ModelSpec& m, const Grid& grid) {
  if (!m.has_position_realization()) {
    raise(ErrorCode::Unsupported, m.name() + " has no position realization");
  }
  RMatrix H = second_difference(grid, model_kinetic(m));
  for (int i = 0; i < grid.n_points; ++i) H(i, i) += model_potential(m, grid.node(i));
  return H;
}

RMatrix conjugate_by_multiplication(const RMatrix& H, const std::vector<double>& samples) {
  if (static_cast<Index>(samples.size()) != H.rows()) {
    raise(ErrorCode::DomainError, "sample count does not match the operator dimension");
  }
  RVector s(H.rows());
  for (Index i = 0; i < H.rows(); ++i) {
    const double v = samples[static_cast<std::size_t>(i)];
    if (!(std::abs(v) >= kNearZeroSample)) {
      raise(ErrorCode::NearZeroSample, "multiplication sample " + std::to_string(i) + " is " +
                                           std::to_string(v));
    }
    s(i) = v;
  }
  return s.asDiagonal() * H * s.cwiseInverse().asDiagonal();
}

// ---------------------------------------------------------------------------
// Dense eigensolve

namespace {

EigenReport symmetric_eigensolve(const RMatrix& A, Index k) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  RMatrix work = A;
  RVector w(n);
  RMatrix z(n, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, 1,
                                         static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), n,
                                         support.data());
  if (info != 0 || found != k) {
    raise(ErrorCode::ConvergenceFailure, "dsyevr returned info " + std::to_string(info));
  }
  EigenReport r;
  r.symmetric = true;
  r.eigenvalues = w.head(k).cast<Complex>();
  r.right = z.cast<Complex>();
  r.left = r.right;
  return r;
}

EigenReport general_eigensolve(const RMatrix& A, Index k, const EigensolveOptions& options) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  RMatrix work = A;
  RVector wr(n), wi(n);
  RMatrix vl(n, n), vr(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'V', 'V', n, work.data(), n, wr.data(), wi.data(),
                                        vl.data(), n, vr.data(), n);
  if (info != 0) raise(ErrorCode::ConvergenceFailure, "dgeev returned info " + std::to_string(info));

  // complex pairs occupy adjacent columns (re, im) with the positive imaginary part first
  const auto column = [n](const RMatrix& v, const RVector& imag, Index j) {
    CVector out(n);
    if (imag(j) == 0.0) {
      out = v.col(j).cast<Complex>();
    } else if (imag(j) > 0.0) {
      for (Index i = 0; i < n; ++i) out(i) = Complex(v(i, j), v(i, j + 1));
    } else {
      for (Index i = 0; i < n; ++i) out(i) = Complex(v(i, j - 1), -v(i, j));
    }
    return out;
  };

  std::vector<SortedIndex> order(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = {wr(j), wi(j), j};
  std::stable_sort(order.begin(), order.end(), [](const SortedIndex& a, const SortedIndex& b) {
    return a.re != b.re ? a.re < b.re : a.im < b.im;
  });

  EigenReport r;
  r.eigenvalues.resize(k);
  r.right.resize(n, k);
  r.left.resize(n, k);
  for (Index t = 0; t < k; ++t) {
    const auto& s = order[static_cast<std::size_t>(t)];
    r.eigenvalues(t) = Complex(s.re, s.im);
    CVector v = column(vr, wi, s.j);
    CVector u = column(vl, wi, s.j);
    v /= v.norm();
    const Complex pairing = u.dot(v);  // u^H v
    const double cosine = std::abs(pairing) / u.norm();
    if (!(cosine >= 1.0 / options.pairing_cap)) {
      raise(ErrorCode::DefectivePair, "left/right pairing of eigenvalue " + std::to_string(t) +
                                          " has |cos| = " + std::to_string(cosine));
    }
    r.right.col(t) = v;
    r.left.col(t) = u / std::conj(pairing);
  }
  return r;
}

}  // namespace

EigenReport eigensolve(const RMatrix& A, Index k, const EigensolveOptions& options) {
  if (A.rows() != A.cols() || A.rows() == 0) raise(ErrorCode::DomainError, "eigensolve needs a square matrix");
  if (k < 1 || k > A.rows()) raise(ErrorCode::IndexOutOfRange, "requested pair count out of range");
  if (!A.allFinite()) raise(ErrorCode::NonFiniteValue, "matrix has non-finite entries");

  const bool symmetric = options.detect_symmetric && A == A.transpose();
  EigenReport r = symmetric ? symmetric_eigensolve(A, k) : general_eigensolve(A, k, options);

  const CMatrix Ac = A.cast<Complex>();
  r.residual_per_pair.resize(static_cast<std::size_t>(k));
  for (Index t = 0; t < k; ++t) {
    const CVector v = r.right.col(t);
    r.residual_per_pair[static_cast<std::size_t>(t)] = (Ac * v - r.eigenvalues(t) * v).norm() / v.norm();
    const double im = std::abs(r.eigenvalues(t).imag());
    r.max_imaginary = std::max(r.max_imaginary, im);
    if (im > options.imaginary_tolerance) r.complex_flags.push_back(t);
  }
  const CMatrix pairing = r.left.adjoint() * r.right;
  r.biorth_error = (pairing - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
  return r;
}

double compare_to_samples(const EigenReport& report, const std::vector<double>& target, double spacing,
                          int n, EigenSide side) {
  if (n < 0 || n >= report.eigenvalues.size()) {
    raise(ErrorCode::IndexOutOfRange, "eigenvector index " + std::to_string(n) + " not in report");
  }
  const CMatrix& vectors = side == EigenSide::Right ? report.right : report.left;
  if (static_cast<Index>(target.size()) != vectors.rows()) {
    raise(ErrorCode::DomainError, "target sample count does not match the eigenvectors");
  }
  CVector t(vectors.rows());
  for (Index i = 0; i < t.size(); ++i) t(i) = target[static_cast<std::size_t>(i)];
  CVector v = vectors.col(n);
  const double tn = discrete_norm(t, spacing);
  const double vn = discrete_norm(v, spacing);
  if (tn == 0.0 || vn == 0.0) raise(ErrorCode::AlignmentFailure, "zero vector in comparison");
  t /= tn;
  v /= vn;
  const Complex overlap = spacing * t.dot(v);
  if (std::abs(overlap) < 0.5) {
    raise(ErrorCode::AlignmentFailure, "overlap " + std::to_string(std::abs(overlap)) +
                                           " below 0.5 for eigenvector " + std::to_string(n));
  }
  v *= std::conj(overlap) / std::abs(overlap);
  return discrete_norm(v - t, spacing);
}

double compare_eigenfunctions(const EigenReport& report, const ModelSpec& m, const Grid& grid,
                              const std::optional<std::vector<double>>& samples, int n, EigenSide side) {
  std::vector<double> target(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    double e = position_eigenfunction(m, n, grid.node(i));
    if (samples) {
      const double s = (*samples)[idx];
      e = side == EigenSide::Right ? s * e : e / s;
    }
    target[idx] = e;
  }
  return compare_to_samples(report, target, grid.spacing(), n, side);
}

// ---------------------------------------------------------------------------
// Printed forms

ModelSpec PrintedForm::model() const {
  switch (kind) {
    case Kind::PtHam: return ModelSpec::poschl_teller(lambda);
    case Kind::HoHhod: return ModelSpec::harmonic_oscillator();
    case Kind::WellCosine: return ModelSpec::infinite_well();
  }
  return {};
}

Profile PrintedForm::similarity() const {
  switch (kind) {
    case Kind::PtHam: return Profile::rational_pt();
    case Kind::HoHhod: return Profile::tanh_shift();
    case Kind::WellCosine: return Profile::inverse_cosine(alpha, k0);
  }
  return {};
}

double PrintedForm::drift(double x) const {
  switch (kind) {
    case Kind::PtHam: return 2.0 / ((1.0 + x) * (1.0 + 2.0 * x));
    case Kind::HoHhod: return 2.0 * (1.0 - std::tanh(x));
    case Kind::WellCosine: return 2.0 * k0 * std::sin(k0 * x) / (alpha + std::cos(k0 * x));
  }
  return 0.0;
}

double PrintedForm::extra(double x) const {
  switch (kind) {
    case Kind::PtHam: return -4.0 / ((1.0 + x) * (1.0 + 2.0 * x) * (1.0 + 2.0 * x));
    case Kind::HoHhod: return -2.0 * (1.0 - std::tanh(x));
    // printed with k0 where the conjugation gives k0^2; the two agree at k0 = 1
    case Kind::WellCosine: return k0 * std::cos(k0 * x) / (alpha + std::cos(k0 * x));
  }
  return 0.0;
}

std::string PrintedForm::name() const {
  switch (kind) {
    case Kind::PtHam: return "ptham";
    case Kind::HoHhod: return "hhod";
    case Kind::WellCosine: return "well_cosine";
  }
  return "unknown";
}

double oracle_drift(const PrintedForm& form, double x) {
  const Profile s = form.similarity();
  return 2.0 * form.kinetic() * s.derivative(x) / s.value(x);
}

double oracle_extra(const PrintedForm& form, double x) {
  const Profile s = form.similarity();
  const double v = s.value(x);
  const double log_derivative = s.derivative(x) / v;
  return form.kinetic() * (s.second_derivative(x) / v - 2.0 * log_derivative * log_derivative);
}

RMatrix build_printed_hamiltonian(const PrintedForm& form, const Grid& grid) {
  RMatrix H = second_difference(grid, form.kinetic());
  std::vector<double> drift(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.node(i);
    drift[static_cast<std::size_t>(i)] = form.drift(x);
    H(i, i) += printed_potential(form, x) + form.extra(x);
  }
  add_first_difference(H, grid, drift);
  return H;
}

PrintedFormResult printed_form_residual(const PrintedForm& form, const Grid& grid, int probes) {
  const ModelSpec m = form.model();
  const Profile s = form.similarity();
  const auto nodes = grid.nodes();
  const auto samples = s.sample(nodes);
  const RMatrix conj = conjugate_by_multiplication(build_hamiltonian(m, grid), samples);
  const RMatrix printed = build_printed_hamiltonian(form, grid);
  const RMatrix diff = printed - conj;

  const int skip = std::max(1, grid.n_points / 20);
  const int lo = skip;
  const int hi = grid.n_points - skip;

  PrintedFormResult r;
  r.gated = form.gated();
  for (int n = 0; n < std::max(1, probes); ++n) {
    RVector g(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      g(i) = samples[idx] * position_eigenfunction(m, n, nodes[idx]);
    }
    const RVector dg = diff * g;
    const RVector hg = conj * g;
    const double scale = hg.segment(lo, hi - lo).cwiseAbs().maxCoeff();
    const double worst = dg.segment(lo, hi - lo).cwiseAbs().maxCoeff();
    r.residual = std::max(r.residual, scale > 0.0 ? worst / scale : worst);
  }
  for (int i = lo; i < hi; ++i) {
    const double x = nodes[static_cast<std::size_t>(i)];
    r.drift_deviation = std::max(r.drift_deviation, std::abs(form.drift(x) - oracle_drift(form, x)));
    r.extra_deviation = std::max(r.extra_deviation, std::abs(form.extra(x) - oracle_extra(form, x)));
  }
  r.drift_first_node = form.drift(nodes.front());
  r.oracle_drift_first_node = oracle_drift(form, nodes.front());
  return r;
}

// ---------------------------------------------------------------------------
// Grid bases

GridBasis grid_basis(const ModelSpec& m, const Grid& grid, Index K) {
  if (K < 1 || K > grid.n_points) raise(ErrorCode::IndexOutOfRange, "basis size out of range");
  const double root_h = std::sqrt(grid.spacing());
  RMatrix E(grid.n_points, K);
  for (Index n = 0; n < K; ++n) {
    for (int i = 0; i < grid.n_points; ++i) {
      E(i, n) = root_h * position_eigenfunction(m, static_cast<int>(n), grid.node(i));
    }
  }
  Eigen::HouseholderQR<RMatrix> qr(E);
  RMatrix U = qr.householderQ() * RMatrix::Identity(grid.n_points, K);
  const RMatrix R = qr.matrixQR().topRows(K);
  for (Index n = 0; n < K; ++n) {
    if (R(n, n) < 0.0) U.col(n) *= -1.0;
  }
  return {grid, std::move(U)};
}

SimilarityPair multiplication_similarity(const GridBasis& basis, const std::vector<double>& samples,
                                         Index margin, const std::string& basis_tag) {
  if (static_cast<int>(samples.size()) != basis.grid.n_points) {
    raise(ErrorCode::DomainError, "sample count does not match the grid");
  }
  const double smallest = std::transform_reduce(samples.begin(), samples.end(), samples.front(),
                                                [](double a, double b) { return std::min(a, b); },
                                                [](double v) { return std::abs(v); });
  if (smallest < kNearZeroSample) raise(ErrorCode::NearZeroSample, "multiplication sample vanishes");
  const Eigen::Map<const RVector> s(samples.data(), static_cast<Index>(samples.size()));
  const RMatrix SK = basis.U.transpose() * s.asDiagonal() * basis.U;
  const RMatrix SK_inv = SK.partialPivLu().inverse();
  return {TruncatedOperator(SK.cast<Complex>(), basis_tag, margin),
          TruncatedOperator(SK_inv.cast<Complex>(), basis_tag, margin)};
}

DghaRealization grid_deformation(const ModelSpec& m, const Grid& grid, Index K, Index margin) {
  if (!m.deformation || m.deformation->kind != SimilarityRecipe::Kind::MultiplicationFunction) {
    raise(ErrorCode::Unsupported, "grid deformation needs a multiplication recipe");
  }
  const auto g = model_realization(m, K, margin);
  const auto basis = grid_basis(m, grid, K);
  const auto samples = m.deformation->profile.sample(grid.nodes());
  const auto pair = multiplication_similarity(basis, samples, margin, g.c.basis_tag());
  return deform(g, pair.S, pair.S_inv);
}

}  // namespace gha
