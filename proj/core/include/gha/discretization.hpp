#pragma once

// Position-space cross-checks: finite-difference Hamiltonians on Dirichlet
// grids, dense eigensolves with left and right vectors, discrete similarity
// by multiplication operators, and the printed deformed Hamiltonians.

#include <optional>
#include <string>
#include <vector>

#include "gha/algebra.hpp"
#include "gha/deformation.hpp"
#include "gha/models.hpp"

namespace gha {

/// Interior nodes x_i = x_min + (i + 1) h, h = (x_max - x_min) / (n_points + 1).
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_points = 16;

  static Grid make(double x_min, double x_max, int n_points);
  double spacing() const { return (x_max - x_min) / (n_points + 1); }
  double node(int i) const { return x_min + (i + 1) * spacing(); }
  std::vector<double> nodes() const;
};

/// (0, pi) for the well and Poschl-Teller, [-8, 8] for the oscillator.
Grid default_grid(const ModelSpec& m, int n_points);

/// Poschl-Teller: -d^2 + lambda (lambda - 1) / sin^2 x, capped at 1e12.
/// Square well:   -d^2.
/// Oscillator:    -d^2 / 2 + x^2 / 2 - 1/2, so the spectrum is n.
RMatrix build_hamiltonian(const ModelSpec& m, const Grid& grid);

/// diag(S) H diag(S)^-1.
RMatrix conjugate_by_multiplication(const RMatrix& H, const std::vector<double>& samples);

struct EigenReport {
  CVector eigenvalues;  // ascending real part
  CMatrix right;        // unit columns
  CMatrix left;         // scaled so <w_j, v_j> = 1
  std::vector<double> residual_per_pair;
  double biorth_error = 0.0;
  double max_imaginary = 0.0;
  std::vector<Index> complex_flags;  // pairs whose imaginary part exceeds the tolerance
  bool symmetric = false;
};

struct EigensolveOptions {
  /// Pairs with |cos angle(w_j, v_j)| below 1 / pairing_cap raise DefectivePair.
  double pairing_cap = 1e6;
  double imaginary_tolerance = 1e-6;
  /// Exactly symmetric input goes to the symmetric solver.
  bool detect_symmetric = true;
};

/// k lowest-real-part eigenpairs of a dense real matrix.
EigenReport eigensolve(const RMatrix& A, Index k, const EigensolveOptions& options = {});

enum class EigenSide { Right, Left };

/// L2 distance between the aligned n-th eigenvector and S e_n (right) or
/// S^-1 e_n (left); e_n alone when no samples are given.
double compare_eigenfunctions(const EigenReport& report, const ModelSpec& m, const Grid& grid,
                              const std::optional<std::vector<double>>& samples, int n,
                              EigenSide side = EigenSide::Right);

/// L2 distance between the aligned n-th eigenvector and arbitrary target samples.
double compare_to_samples(const EigenReport& report, const std::vector<double>& target, double spacing,
                          int n, EigenSide side = EigenSide::Right);

/// Printed deformed Hamiltonians, each written as
///   -kinetic d^2 + drift(x) d + V(x) + extra(x).
struct PrintedForm {
  enum class Kind { PtHam, HoHhod, WellCosine };

  Kind kind = Kind::PtHam;
  double lambda = 2.0;
  double alpha = 2.0;
  int k0 = 1;

  static PrintedForm pt_ham(double lambda) { return {Kind::PtHam, lambda, 2.0, 1}; }
  static PrintedForm ho_hhod() { return {Kind::HoHhod, 1.0, 2.0, 1}; }
  static PrintedForm well_cosine(double alpha, int k0) { return {Kind::WellCosine, 1.0, alpha, k0}; }

  /// The undeformed model together with its multiplication profile S.
  ModelSpec model() const;
  Profile similarity() const;
  double kinetic() const { return 1.0; }
  double drift(double x) const;
  double extra(double x) const;
  /// The oscillator form is under question and never gates a suite.
  bool gated() const { return kind != Kind::HoHhod; }
  std::string name() const;
};

/// Conjugation oracle for a printed form in its own kinetic convention:
///   drift 2 k S'/S, extra k (S''/S - 2 (S'/S)^2).
double oracle_drift(const PrintedForm& form, double x);
double oracle_extra(const PrintedForm& form, double x);

struct PrintedFormResult {
  /// max |(h_printed - h_conj) g| / max |h_conj g| over smooth probes g = S e_n,
  /// outer 5% of nodes excluded.
  double residual = 0.0;
  double drift_deviation = 0.0;   // max |printed drift - oracle drift|
  double extra_deviation = 0.0;   // max |printed extra - oracle extra|
  double drift_first_node = 0.0;  // printed drift at the first retained node
  double oracle_drift_first_node = 0.0;
  bool gated = true;
};

PrintedFormResult printed_form_residual(const PrintedForm& form, const Grid& grid, int probes = 4);

/// Discretized printed operator on a grid.
RMatrix build_printed_hamiltonian(const PrintedForm& form, const Grid& grid);

/// Orthonormal columns spanning the sampled analytic eigenfunctions e_0..e_{K-1}.
struct GridBasis {
  Grid grid;
  RMatrix U;  // n_points x K
  Index size() const { return U.cols(); }
};

GridBasis grid_basis(const ModelSpec& m, const Grid& grid, Index K);

/// S_K = U^T diag(samples) U and its exact inverse.
SimilarityPair multiplication_similarity(const GridBasis& basis, const std::vector<double>& samples,
                                         Index margin, const std::string& basis_tag);

/// Model realization of size K deformed by the model's multiplication recipe,
/// with the similarity projected onto a grid basis.
DghaRealization grid_deformation(const ModelSpec& m, const Grid& grid, Index K, Index margin);

}  // namespace gha
