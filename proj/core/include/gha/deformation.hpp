#pragma once

// Non-self-adjoint deformations of a GHA by similarity, the biorthogonal
// eigenfamilies they generate, and the way back through frame operators.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gha/algebra.hpp"

namespace gha {

/// Operator triple (a, b, h) with its characteristic function and ground vectors.
///
/// `interior` holds unit columns spanning the subspace on which identities are
/// asserted. For an undeformed or diagonally deformed realization it is the
/// first M coordinate vectors; for a dense similarity S it is S P_M, which is
/// the image of the interior under the deformation.
struct DghaRealization {
  TruncatedOperator a;
  TruncatedOperator b;
  TruncatedOperator h;
  CharacteristicFunction f;
  CVector phi0;
  CVector psi0;
  Spectrum spectrum;
  CMatrix interior;

  Index dim() const { return h.dim(); }
  Index interior_dim() const { return interior.cols(); }
};

struct SimilarityPair {
  TruncatedOperator S;
  TruncatedOperator S_inv;
};

/// a = S c S^-1, b = S c^dagger S^-1, h = S H S^-1, phi0 = S e0, psi0 = (S^-1)^dagger e0.
/// phi0 and psi0 are unit-normalized, then psi0 is rescaled so <psi0, phi0> = 1.
DghaRealization deform(const GhaRealization& g, const TruncatedOperator& S,
                       const TruncatedOperator& S_inv, double inverse_tolerance = 1e-10);

/// Identity deformation: (a, b, h) = (c, c^dagger, H).
DghaRealization undeformed(const GhaRealization& g);

struct BiorthogonalFamily {
  std::vector<CVector> phis;
  std::vector<CVector> psis;
  CMatrix gram;  // gram(n, m) = <psi_n, phi_m>
  Index interior_dim = 0;

  Index size() const { return static_cast<Index>(phis.size()); }
  CMatrix phi_matrix() const;
  CMatrix psi_matrix() const;
};

/// phi_n = b^n phi0 / sqrt((eps_n - eps0)!), psi_n = (a^dagger)^n psi0 / sqrt((eps_n - eps0)!).
BiorthogonalFamily build_families(const DghaRealization& d, int n_max);

/// Rebuilds the gram matrix after a caller has edited the vectors.
void refresh_gram(BiorthogonalFamily& fam);

struct DghaOptions {
  /// Cap on cond(V) for h = V L V^-1 before f(h) is declared untrustworthy.
  double condition_cap = 1e8;
  /// Eigenvalues of h whose imaginary part exceeds this are flagged.
  double imaginary_tolerance = 1e-6;
};

/// f(h) = V f(L) V^-1 through the eigendecomposition of h.
CMatrix characteristic_of(const CMatrix& h, const CharacteristicFunction& f,
                          const DghaOptions& options = {});

/// Matrix residuals on the interior subspace:
///   r21a: h b - b f(h)        r21b: a h - f(h) a        r25: [a, b] - (f(h) - h)
/// Vector residuals over the family (max over n), each relative to the size of
/// the term it should reproduce:
///   r26a: a phi_n - sqrt(eps_n - eps0) phi_{n-1}
///   r26b: b^dagger psi_n - sqrt(eps_n - eps0) psi_{n-1}
///   r27_ba, r27_ab:     b a phi_n, a b phi_n against eps_n - eps0, eps_{n+1} - eps0
///   r27_adbd, r27_bdad: a^dagger b^dagger psi_n, b^dagger a^dagger psi_n likewise
ResidualReport dgha_residuals(const DghaRealization& d, const BiorthogonalFamily& fam,
                              const DghaOptions& options = {});

struct Eigencheck {
  std::vector<double> right;  // ||h phi_n - eps_n phi_n|| / ||phi_n||
  std::vector<double> left;   // ||h^dagger psi_n - eps_n psi_n|| / ||psi_n||
  double max() const;
};
Eigencheck eigencheck(const DghaRealization& d, const BiorthogonalFamily& fam);

/// Deterministic complex Gaussian source: mt19937_64 feeding Box-Muller.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed);
  double next();
  Complex next_complex();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct QuasiBasisResult {
  double direct = 0.0;   // |<f, g> - sum <f, psi_n><phi_n, g>|
  double swapped = 0.0;  // |<f, g> - sum <f, phi_n><psi_n, g>|
  double max() const { return direct > swapped ? direct : swapped; }
};
/// Random pairs supported on the first interior_dim coordinates.
QuasiBasisResult quasi_basis_check(const BiorthogonalFamily& fam, int trials, std::uint64_t seed);

struct FrameDiagnostics {
  double s_phi_condition = 1.0;
  double s_psi_condition = 1.0;
  double frame_inverse_residual = 0.0;  // || S_phi S_psi - I || on the family span
  double quasi_basis_residual = 0.0;
  bool riesz_flag = false;  // heuristic only: both conditions under the cap
  std::vector<std::string> warnings;
};
FrameDiagnostics frame_diagnostics(const BiorthogonalFamily& fam, double condition_cap = 1e6);

/// Reconstructed self-adjoint algebra, expressed in an orthonormal basis Q of
/// span{phi_n}: c = S_phi^{-1/2} a S_phi^{1/2} and likewise for c^dagger and H.
/// S_phi^{-1/2} stands in for S_psi^{1/2}; they coincide when the two families
/// span the same subspace.
struct ReconstructedGha {
  CMatrix Q;      // dim x n, orthonormal basis of span{phi_n}
  CMatrix c;      // n x n in Q coordinates
  CMatrix cdag;
  CMatrix H;
  CMatrix basis;  // columns e_n = S_phi^{-1/2} phi_n in Q coordinates
  ResidualReport residuals;  // self_adjoint, h_diagonal, orthonormality, factorization in the e_n basis
  std::vector<std::string> warnings;
};
ReconstructedGha reconstruct_gha(const DghaRealization& d, const BiorthogonalFamily& fam);

struct NlpbReport {
  double p1 = 0.0;  // || a phi_0 ||
  double p2 = 0.0;  // || b^dagger psi_0 ||
  double p3_phi = 0.0;  // relative lowering residuals
  double p3_psi = 0.0;
  std::vector<double> positivity;  // <phi_n, [a, b] phi_n> / ||phi_n||^2
  std::vector<double> gaps;        // eps_{n+1} - eps_n
  double positivity_residual = 0.0;
  double min_positivity = 0.0;
};
/// Nonlinear pseudo-boson properties p1-p3 with the spectrum shifted so eps_0 = 0.
NlpbReport nlpb_check(const DghaRealization& d, const BiorthogonalFamily& fam);

}  // namespace gha
