#include "gha/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "gha/error.hpp"
#include "gha/special_functions.hpp"
#include "json.hpp"

namespace gha {

namespace {

using OrderedJson = nlohmann::ordered_json;

class SuiteBuilder {
 public:
  SuiteBuilder(Report& report, const std::string& group) : report_(report), group_(group) {}

  Check& add(std::string name, double value, double threshold, std::string identity,
             std::vector<std::string> operations, bool gated = true, Relation relation = Relation::AtMost) {
    Check c;
    c.name = std::move(name);
    c.group = group_;
    c.value = value;
    c.threshold = threshold;
    c.relation = relation;
    c.gated = gated;
    c.identity = std::move(identity);
    c.operations = std::move(operations);
    c.passed = std::isfinite(value) && (relation == Relation::AtMost ? value <= threshold : value >= threshold);
    report_.checks.push_back(std::move(c));
    return report_.checks.back();
  }

  void failure(const std::string& stage, const std::string& message, std::vector<std::string> operations) {
    auto& c = add(group_ + ".error." + stage, std::numeric_limits<double>::quiet_NaN(), 0.0,
                  "stage completes without error", std::move(operations));
    c.note = message;
  }

  template <class Fn>
  void guard(const std::string& stage, std::vector<std::string> operations, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      failure(stage, e.what(), std::move(operations));
    }
  }

 private:
  Report& report_;
  std::string group_;
};

double scale_of(double x) { return std::max(1.0, std::abs(x)); }

bool has_multiplication(const ModelSpec& m) {
  return m.deformation && m.deformation->kind == SimilarityRecipe::Kind::MultiplicationFunction;
}

bool has_diagonal(const ModelSpec& m) {
  return m.deformation && m.deformation->kind == SimilarityRecipe::Kind::DiagonalOfNumber;
}

bool is_tanh_oscillator(const ModelSpec& m) {
  return m.kind == ModelKind::HarmonicOscillator && has_multiplication(m) &&
         m.deformation->profile.kind == Profile::Kind::TanhShift;
}

std::optional<PrintedForm> printed_form_for(const ModelSpec& m) {
  if (!has_multiplication(m)) return std::nullopt;
  const Profile& p = m.deformation->profile;
  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller:
      if (p.kind == Profile::Kind::RationalPT) return PrintedForm::pt_ham(m.lambda);
      break;
    case ModelKind::HarmonicOscillator:
      if (p.kind == Profile::Kind::TanhShift) return PrintedForm::ho_hhod();
      break;
    case ModelKind::InfiniteWell:
      if (p.kind == Profile::Kind::InverseCosine) return PrintedForm::well_cosine(p.alpha, p.k0);
      if (p.kind == Profile::Kind::RationalPT) return PrintedForm::pt_ham(1.0);
      break;
    default:
      break;
  }
  return std::nullopt;
}

Grid coarse_grid(const Grid& g) {
  return Grid::make(g.x_min, g.x_max, std::max(16, (g.n_points + 1) / 2 - 1));
}

double observed_order(double coarse_error, double fine_error, double coarse_h, double fine_h) {
  if (!(coarse_error > 0.0) || !(fine_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(coarse_error / fine_error) / std::log(coarse_h / fine_h);
}

// ---------------------------------------------------------------------------
// Sections

void algebra_section(const RunConfig& cfg, Report& report) {
  SuiteBuilder b(report, "algebra");
  const ModelSpec& m = cfg.model;
  const Index N = cfg.N;
  const double tol = cfg.tolerances.algebra;
  b.guard("spectrum", {"iterate_spectrum", "analytic_spectrum"}, [&] {
    const auto f = characteristic_function(m);
    const auto sp = iterate_spectrum(f, ground_energy(m), static_cast<int>(N - 1));
    double worst = 0.0;
    for (Index n = 0; n < N; ++n) {
      const double exact = analytic_spectrum(m, static_cast<int>(n));
      worst = std::max(worst, std::abs(sp[n] - exact) / scale_of(exact));
    }
    b.add("spectrum.recursion", worst, 1e-12, "eps_{n+1} = f(eps_n) reproduces the closed-form spectrum",
          {"iterate_spectrum", "analytic_spectrum"});

    double ratio = 0.0;
    const int top = static_cast<int>(std::min<Index>(N - 1, 30));
    for (int n = 1; n <= top; ++n) {
      const double step = generalized_factorial(sp, n) / generalized_factorial(sp, n - 1);
      const double gap = sp[n] - sp.epsilon0;
      ratio = std::max(ratio, std::abs(step - gap) / scale_of(gap));
    }
    b.add("spectrum.factorial", ratio, 1e-12, "(eps_n - eps0)! / (eps_{n-1} - eps0)! = eps_n - eps0",
          {"generalized_factorial"});
  });

  b.guard("ladder", {"build_ladder", "gha_residuals", "susy_partner", "check_annihilation"}, [&] {
    const auto g = model_realization(m, N, cfg.margin);
    const Index M = g.c.interior_dim();
    const double top = g.f(g.spectrum[M - 1]);
    const auto res = gha_residuals(g);
    const char* identities[] = {"c H = f(H) c", "[c, c^dagger] = f(H) - H", "c^dagger c + eps0 = H"};
    const char* names[] = {"intertwine", "commutator", "factorization"};
    for (int i = 0; i < 3; ++i) {
      auto& c = b.add(std::string("gha.") + names[i], res.at(names[i]).frobenius / scale_of(top), tol,
                      identities[i], {"build_ladder", "gha_residuals"});
      c.note = "interior Frobenius norm relative to max(1, f(eps_M))";
    }
    const TruncatedOperator partner = susy_partner(g);
    const CMatrix& susy = partner.matrix();
    double worst = 0.0;
    for (Index j = 0; j < M; ++j) {
      for (Index i = 0; i < N; ++i) {
        const double expected = i == j ? g.f(g.spectrum[j]) : 0.0;
        worst = std::max(worst, std::abs(susy(i, j) - expected));
      }
    }
    b.add("gha.susy_partner", worst / scale_of(top), tol, "c c^dagger + eps0 = f(H) on the interior",
          {"susy_partner"});
    b.add("gha.annihilation", check_annihilation(g), tol, "c e0 = 0", {"check_annihilation"});
  });
}

void special_section(const RunConfig& cfg, Report& report) {
  const ModelSpec& m = cfg.model;
  const ModelKind kind = m.effective_kind();
  if (kind != ModelKind::PoschlTeller && kind != ModelKind::InfiniteWell) return;
  SuiteBuilder b(report, "special_functions");
  const double lambda = kind == ModelKind::InfiniteWell ? 1.0 : m.lambda;
  const int top = std::min(20, cfg.family_depth());

  b.guard("gegenbauer", {"gegenbauer"}, [&] {
    double worst = 0.0;
    for (int n = 0; n <= top; ++n) {
      for (int i = 1; i < 100; ++i) {
        const double theta = std::numbers::pi * i / 100.0;
        const double exact = std::sin((n + 1) * theta) / std::sin(theta);
        worst = std::max(worst, std::abs(gegenbauer(n, 1.0, std::cos(theta)) - exact) / scale_of(exact));
      }
    }
    b.add("gegenbauer.chebyshev_u", worst, 1e-10, "C_n^1(cos t) = sin((n+1) t) / sin t", {"gegenbauer"});
  });
  b.guard("log_gamma", {"log_gamma"}, [&] {
    double worst = 0.0;
    double log_factorial = 0.0;
    for (int n = 1; n <= 30; ++n) {
      if (n > 1) log_factorial += std::log(n - 1.0);
      worst = std::max(worst, std::abs(log_gamma(n) - log_factorial) / scale_of(log_factorial));
    }
    b.add("log_gamma.factorial", worst, 1e-12, "ln Gamma(n) = ln (n-1)!", {"log_gamma"});
  });
  b.guard("recurrence", {"recurrence_residual_multiplication", "recurrence_residual_derivative"}, [&] {
    const auto grid = interior_grid(201);
    double mult = 0.0, deriv = 0.0;
    for (int n = 0; n <= top; ++n) {
      mult = std::max(mult, recurrence_residual_multiplication(n, lambda, grid));
      deriv = std::max(deriv, recurrence_residual_derivative(n, lambda, grid));
    }
    b.add("recurrence.multiplication", mult, 1e-8, "u E_n is a combination of E_{n-1} and E_{n+1}",
          {"recurrence_residual_multiplication", "normalized_eigenfunction"});
    b.add("recurrence.derivative", deriv, 1e-8, "(1-u^2) dE_n/du is a combination of E_{n-1} and E_{n+1}",
          {"recurrence_residual_derivative", "normalized_eigenfunction"});
  });
  b.guard("orthonormality", {"orthonormality_matrix"}, [&] {
    const auto M = orthonormality_matrix(lambda, top);
    const double dev = (M - Eigen::MatrixXd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
    b.add("orthonormality", dev, cfg.tolerances.quadrature, "<E_n, E_m> = delta_nm under du / sqrt(1 - u^2)",
          {"orthonormality_matrix", "normalized_eigenfunction"});
  });
  if (kind == ModelKind::InfiniteWell) {
    b.guard("reduction", {"normalized_eigenfunction"}, [&] {
      double worst = 0.0;
      for (int n = 0; n <= top; ++n) {
        for (int i = 1; i < 200; ++i) {
          const double x = std::numbers::pi * i / 200.0;
          const double exact = std::sqrt(2.0 / std::numbers::pi) * std::sin((n + 1) * x);
          worst = std::max(worst, std::abs(normalized_eigenfunction(n, 1.0, std::cos(x)) - exact));
        }
      }
      b.add("eigenfunction.lambda1_reduction", worst, 1e-10, "E_n^1(cos x) = sqrt(2/pi) sin((n+1) x)",
            {"normalized_eigenfunction"});
    });
  }
}

void models_section(const RunConfig& cfg, Report& report) {
  SuiteBuilder b(report, "models");
  const ModelSpec& m = cfg.model;
  const double tol = cfg.tolerances.algebra;
  const Index N = cfg.N;
  const Index M = N - cfg.margin;

  switch (m.effective_kind()) {
    case ModelKind::PoschlTeller:
    case ModelKind::InfiniteWell: {
      const bool well = m.effective_kind() == ModelKind::InfiniteWell;
      const double lambda = well ? 1.0 : m.lambda;
      const std::vector<std::string> ops{well ? "well_ladder_matrices" : "pt_ladder_matrices", "pt_algebra_report"};
      b.guard("ladder", ops, [&] {
        const LadderSet set = well ? well_ladder_matrices(N, cfg.margin) : pt_ladder_matrices(lambda, N, cfg.margin);
        const auto rep = pt_algebra_report(lambda, N, cfg.margin);
        const double top = std::pow(M + lambda, 2);
        for (const auto& e : rep.entries) {
          auto& c = b.add("ladder." + e.name, e.frobenius / scale_of(top), tol,
                          "ladder identity '" + e.name + "' on the interior", ops);
          c.note = "relative to max(1, eps_M)";
        }
        double lowering = 0.0;
        for (Index n = 1; n < M; ++n) {
          const double expected = std::sqrt(analytic_spectrum(m, static_cast<int>(n)) - ground_energy(m));
          lowering = std::max(lowering, std::abs(set.C.matrix()(n - 1, n).real() - expected) / expected);
        }
        b.add("ladder.c_lowering", lowering, 1e-12, "C lowering weight = sqrt(eps_n - eps0)", ops);
        if (!well) {
          int violations = 0;
          const double lo = std::sqrt(2.0 * (lambda - 1.0) / (2.0 * lambda - 1.0));
          double prev = -1.0;
          for (int t = 0; t <= 100; ++t) {
            const double g = pt_g(lambda, t);
            if (!(g > prev) || g < lo - 1e-15 || !(g < 1.0)) ++violations;
            prev = g;
          }
          b.add("ladder.g_bounds", violations, 0.0, "G increasing within [G(0), 1)", ops);
        }
      });
      break;
    }
    case ModelKind::HarmonicOscillator:
      b.guard("ground_state", {"position_eigenfunction"}, [&] {
        const double v = position_eigenfunction(m, 0, 0.0);
        b.add("position.ground_state", std::abs(v - std::pow(std::numbers::pi, -0.25)), 1e-15,
              "e0(0) = pi^(-1/4)", {"position_eigenfunction"});
      });
      break;
    case ModelKind::Quon:
      b.guard("quon", {"quon_realization"}, [&] {
        const auto d = quon_realization(m.q, N, cfg.margin,
                                        has_diagonal(m) ? m.deformation : std::optional<SimilarityRecipe>{});
        b.add("quon.commutator", quon_commutator_residual(d, m.q), tol, "a b - q b a = I on the interior",
              {"quon_realization"});
        const auto undeformed_quon = quon_realization(m.q, N, cfg.margin);
        double worst = 0.0;
        for (Index n = 0; n < M; ++n) {
          worst = std::max(worst, std::abs(undeformed_quon.h.matrix()(n, n).real() -
                                           analytic_spectrum(m, static_cast<int>(n))));
        }
        b.add("quon.spectrum", worst, 1e-12, "h = b a = diag([n]_q)", {"quon_realization", "analytic_spectrum"});
      });
      break;
    case ModelKind::PseudoBosonPower:
      b.guard("pseudo_boson", {"pseudo_boson_power"}, [&] {
        const auto base = pseudo_boson_base(N, cfg.margin,
                                            has_diagonal(m) ? m.deformation : std::optional<SimilarityRecipe>{});
        const auto d = pseudo_boson_power(m.k, base);
        const auto shifts = pseudo_boson_shift_residuals(base, m.k);
        const double scale = scale_of(std::pow(static_cast<double>(M), m.k + 1));
        b.add("pseudo_boson.a_shift", shifts.at("a_shift").frobenius / scale, tol, "A N0^k = (N0 + 1)^k A",
              {"pseudo_boson_power"});
        b.add("pseudo_boson.b_shift", shifts.at("b_shift").frobenius / scale, tol, "N0^k B = B (N0 + 1)^k",
              {"pseudo_boson_power"});
        Eigen::ComplexEigenSolver<CMatrix> es(d.h.matrix());
        std::vector<double> ev;
        for (Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
        std::sort(ev.begin(), ev.end());
        double worst = 0.0;
        for (Index n = 0; n < M; ++n) {
          const double exact = analytic_spectrum(m, static_cast<int>(n));
          worst = std::max(worst, std::abs(ev[static_cast<std::size_t>(n)] - exact) / scale_of(exact));
        }
        b.add("pseudo_boson.spectrum", worst, tol, "h = N0^(k+1) has eigenvalues n^(k+1)",
              {"pseudo_boson_power", "analytic_spectrum"});
      });
      report.notes.push_back(
          "pseudo-boson shift rules are checked in the consistent form A N0^k = (N0 + 1)^k A and "
          "h = N0^(k+1); the printed versions exchange A for B and k for b");
      break;
  }

  if (is_tanh_oscillator(m)) {
    b.guard("potential", {"effective_potential"}, [&] {
      b.add("potential.origin", std::abs(effective_potential(m, 0.0) + 2.0), 0.0, "V_eff(0) = -2",
            {"effective_potential"});
      const auto minimum = effective_potential_argmin(m);
      report.potential_minimum = minimum;
      auto& c = b.add("potential.argmin_x", minimum.x, 0.0, "grid-scan minimizer of V_eff on [-4, 4]",
                      {"effective_potential"}, false);
      c.note = "informational; V_eff(argmin) = " + format_real(minimum.value);
      for (const auto& o : cfg.outputs) {
        if (o == "potential") report.potential = potential_rows(m);
      }
    });
  }
}

struct Deformed {
  DghaRealization d;
  bool exact_basis = true;
};

Deformed build_deformed(const RunConfig& cfg) {
  const ModelSpec& m = cfg.model;
  const Index N = cfg.N;
  const std::optional<SimilarityRecipe> diagonal = has_diagonal(m) ? m.deformation : std::nullopt;
  switch (m.effective_kind()) {
    case ModelKind::Quon: return {quon_realization(m.q, N, cfg.margin, diagonal), true};
    case ModelKind::PseudoBosonPower: return {pseudo_boson_power(m.k, pseudo_boson_base(N, cfg.margin, diagonal)), true};
    default: break;
  }
  if (has_multiplication(m)) return {grid_deformation(m, cfg.resolved_grid(), N, cfg.margin), false};
  const auto g = model_realization(m, N, cfg.margin);
  if (diagonal) {
    const auto pair = number_similarity(diagonal->profile, N, cfg.margin, g.c.basis_tag());
    return {deform(g, pair.S, pair.S_inv), true};
  }
  return {undeformed(g), true};
}

// Rounding noise in the upper modes is amplified by each raising step when the
// similarity is dense, so grid-basis families stay shallow.
constexpr int kGridFamilyDepth = 16;

void deformation_section(const RunConfig& cfg, Report& report) {
  SuiteBuilder b(report, "deformation");
  const ModelSpec& m = cfg.model;
  const auto& tol = cfg.tolerances;

  std::optional<Deformed> built;
  std::optional<BiorthogonalFamily> family;
  int depth = cfg.family_depth();
  b.guard("build", {"deform", "build_families"}, [&] {
    built = build_deformed(cfg);
    if (!built->exact_basis) depth = std::min(depth, kGridFamilyDepth);
    family = build_families(built->d, depth);
  });
  if (!family) return;

  const DghaRealization& d = built->d;
  const BiorthogonalFamily& fam = *family;
  const bool exact = built->exact_basis;
  // pseudo-boson power families grow factorially: no Riesz basis to rebuild from
  const bool bounded = m.effective_kind() != ModelKind::PseudoBosonPower;
  const double algebra_tol = exact ? tol.algebra : tol.grid_algebra;
  const double dual_tol = exact ? tol.biorthogonality : tol.grid_algebra;
  const std::string basis_note = exact ? "exact basis" : "grid basis, family depth " + std::to_string(depth);
  std::vector<std::string> base_ops{"build_families"};
  if (m.deformation) base_ops.push_back("deform");
  const auto ops = [&](std::initializer_list<const char*> extra) {
    std::vector<std::string> out = base_ops;
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  };
  const double eps_scale = scale_of(d.spectrum[depth]);

  b.guard("dgha", ops({"dgha_residuals"}), [&] {
    const CMatrix& W = d.interior;
    const CMatrix& a = d.a.matrix();
    const CMatrix& bm = d.b.matrix();
    const CMatrix& h = d.h.matrix();
    const auto res = dgha_residuals(d, fam);
    const auto matrix_check = [&](const char* name, double scale, const char* identity, const char* scale_name) {
      b.add(std::string("dgha.") + name, res.at(name).frobenius / scale, algebra_tol, identity, ops({"dgha_residuals"}))
          .note = basis_note + "; relative to " + scale_name;
    };
    matrix_check("r21a", scale_of((h * bm * W).norm()), "h b = b f(h)", "||h b W||");
    matrix_check("r21b", scale_of((a * h * W).norm()), "a h = f(h) a", "||a h W||");
    matrix_check("r25", scale_of((a * bm * W).norm()), "[a, b] = f(h) - h", "||a b W||");
    const std::pair<const char*, const char*> vector_checks[] = {
        {"r26a", "a phi_n = sqrt(eps_n - eps0) phi_{n-1}"},
        {"r26b", "b^dagger psi_n = sqrt(eps_n - eps0) psi_{n-1}"},
        {"r27_ba", "b a phi_n = (eps_n - eps0) phi_n"},
        {"r27_ab", "a b phi_n = (eps_{n+1} - eps0) phi_n"},
        {"r27_adbd", "a^dagger b^dagger psi_n = (eps_n - eps0) psi_n"},
        {"r27_bdad", "b^dagger a^dagger psi_n = (eps_{n+1} - eps0) psi_n"},
    };
    for (const auto& [name, identity] : vector_checks) {
      b.add(std::string("dgha.") + name, res.at(name).frobenius, algebra_tol, identity, ops({"dgha_residuals"}))
          .note = basis_note;
    }
    b.add("dgha.annihilate_phi0", res.at("annihilate_phi0").frobenius, algebra_tol, "a phi0 = 0",
          ops({"dgha_residuals"}));
    b.add("dgha.annihilate_psi0", res.at("annihilate_psi0").frobenius, algebra_tol, "b^dagger psi0 = 0",
          ops({"dgha_residuals"}));
  });

  b.guard("families", ops({"eigencheck"}), [&] {
    const auto ec = eigencheck(d, fam);
    b.add("families.eigencheck", ec.max() / eps_scale, algebra_tol,
          "h phi_n = eps_n phi_n and h^dagger psi_n = eps_n psi_n", ops({"eigencheck"}));
    const double gram = (fam.gram - CMatrix::Identity(fam.size(), fam.size())).cwiseAbs().maxCoeff();
    b.add("families.gram", gram, dual_tol, "<psi_n, phi_m> = delta_nm", ops({}));
  });

  b.guard("quasi_basis", ops({"quasi_basis_check"}), [&] {
    const auto qb = quasi_basis_check(fam, 100, cfg.seed);
    auto& qc = b.add("frames.quasi_basis", qb.max(), tol.algebra,
                     "sum <f, psi_n><phi_n, g> = <f, g> over 100 seeded pairs", ops({"quasi_basis_check"}),
                     exact && bounded);
    if (!exact) qc.note = "informational: a dense similarity moves the family off the coordinate interior";
    if (!bounded) qc.note = "informational: unbounded families";
  });

  if (bounded) {
    b.guard("frames", ops({"frame_diagnostics"}), [&] {
      const auto fd = frame_diagnostics(fam);
      if (has_diagonal(m)) {
        const auto [lo, hi] = m.deformation->profile.bounds(1.0);
        b.add("frames.s_phi_condition", fd.s_phi_condition, (hi / lo) * (hi / lo) + 1e-6,
              "cond(S_phi) <= (sigma_M / sigma_m)^2", ops({"frame_diagnostics"}));
      } else {
        b.add("frames.s_phi_condition", fd.s_phi_condition, 1e6, "cond(S_phi) under the Riesz heuristic cap",
              ops({"frame_diagnostics"}), false);
      }
      auto& c = b.add("frames.inverse", fd.frame_inverse_residual, dual_tol, "S_phi S_psi = I on span{phi_n}",
                      ops({"frame_diagnostics"}));
      c.note = basis_note;
    });

    b.guard("reconstruct", ops({"reconstruct_gha"}), [&] {
      const auto rec = reconstruct_gha(d, fam);
      const double lowering_scale = scale_of(std::sqrt(eps_scale));
      b.add("reconstruct.self_adjoint", rec.residuals.at("self_adjoint").max_abs / lowering_scale, dual_tol,
            "reconstructed c^dagger is the adjoint of c", ops({"reconstruct_gha"}));
      b.add("reconstruct.h_diagonal", rec.residuals.at("h_diagonal").max_abs / eps_scale, dual_tol,
            "reconstructed H is diagonal with eps_n", ops({"reconstruct_gha"}));
      b.add("reconstruct.orthonormality", rec.residuals.at("orthonormality").max_abs, dual_tol,
            "reconstructed e_n are orthonormal", ops({"reconstruct_gha"}));
      b.add("reconstruct.factorization", rec.residuals.at("factorization").max_abs / eps_scale, dual_tol,
            "reconstructed c^dagger c + eps0 = H", ops({"reconstruct_gha"}));
      if (exact) {
        const auto reference = model_realization(m, cfg.N, cfg.margin);
        const Index k = fam.size() - 1;
        const CMatrix c_e = rec.basis.adjoint() * rec.c * rec.basis;
        const double trip =
            (c_e.topLeftCorner(k, k) - reference.c.matrix().topLeftCorner(k, k)).cwiseAbs().maxCoeff();
        b.add("reconstruct.round_trip", trip / lowering_scale, tol.biorthogonality,
              "reconstruction returns the undeformed lowering matrix", ops({"reconstruct_gha"}));
      }
    });
  } else {
    report.notes.push_back(
        "pseudo-boson power families grow like ((n)!)^(k/2); frame and reconstruction checks need a "
        "bounded similarity and are skipped");
  }

  b.guard("nlpb", ops({"nlpb_check"}), [&] {
    const auto nl = nlpb_check(d, fam);
    b.add("nlpb.p1", nl.p1, algebra_tol, "a phi0 = 0", ops({"nlpb_check"}));
    b.add("nlpb.p2", nl.p2, algebra_tol, "b^dagger psi0 = 0", ops({"nlpb_check"}));
    b.add("nlpb.p3", std::max(nl.p3_phi, nl.p3_psi), algebra_tol, "lowering relations with eps0 shifted to 0",
          ops({"nlpb_check"}));
    const double max_gap = nl.gaps.empty() ? 1.0 : *std::max_element(nl.gaps.begin(), nl.gaps.end());
    b.add("nlpb.positivity_identity", nl.positivity_residual / scale_of(max_gap), algebra_tol,
          "<phi_n, [a, b] phi_n> = (eps_{n+1} - eps_n) ||phi_n||^2", ops({"nlpb_check"}));
    b.add("nlpb.min_positivity", nl.min_positivity, 0.0, "<phi_n, [a, b] phi_n> > 0", ops({"nlpb_check"}), true,
          Relation::AtLeast);
  });

  if (!m.has_position_realization()) {
    b.guard("spectrum", {"analytic_spectrum"}, [&] {
      Eigen::ComplexEigenSolver<CMatrix> es(d.h.matrix());
      std::vector<double> ev;
      for (Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
      std::sort(ev.begin(), ev.end());
      const int rows = std::min(10, depth + 1);
      for (int n = 0; n < rows; ++n) {
        const double exact_value = analytic_spectrum(m, n);
        const double computed = ev[static_cast<std::size_t>(n)];
        report.spectrum.push_back({n, exact_value, computed, std::abs(computed - exact_value)});
      }
    });
  }
}

void discretization_section(const RunConfig& cfg, Report& report) {
  const ModelSpec& m = cfg.model;
  if (!m.has_position_realization()) return;
  SuiteBuilder b(report, "discretization");
  const auto& tol = cfg.tolerances;

  b.guard("fd", {"build_hamiltonian", "eigensolve"}, [&] {
    const Grid grid = cfg.resolved_grid();
    const Index k = std::min<Index>(10, grid.n_points);
    const RMatrix H = build_hamiltonian(m, grid);
    const EigenReport base = eigensolve(H, k);
    const int checked = static_cast<int>(std::min<Index>(6, k));
    double worst = 0.0;
    for (int n = 0; n < checked; ++n) {
      const double exact = analytic_spectrum(m, n);
      worst = std::max(worst, std::abs(base.eigenvalues(n).real() - exact) / scale_of(exact));
    }
    b.add("fd.spectrum", worst, tol.eigen, "lowest finite-difference eigenvalues match the closed form",
          {"build_hamiltonian", "eigensolve", "analytic_spectrum"});

    const Grid coarse = coarse_grid(grid);
    const EigenReport coarse_report = eigensolve(build_hamiltonian(m, coarse), 1);
    const double e0 = analytic_spectrum(m, 0);
    const double order = observed_order(std::abs(coarse_report.eigenvalues(0).real() - e0),
                                        std::abs(base.eigenvalues(0).real() - e0), coarse.spacing(), grid.spacing());
    b.add("fd.convergence_order", order, 1.8, "ground-state error shrinks as h^2",
          {"build_hamiltonian", "eigensolve"}, true, Relation::AtLeast);
    b.add("fd.eigenfunction", compare_eigenfunctions(base, m, grid, std::nullopt, 0), tol.eigen,
          "ground eigenvector matches e0", {"compare_eigenfunctions", "position_eigenfunction"});

    const int rows = std::min(static_cast<int>(k), cfg.family_depth() + 1);
    for (int n = 0; n < rows; ++n) {
      const double exact = analytic_spectrum(m, n);
      const double computed = base.eigenvalues(n).real();
      report.spectrum.push_back({n, exact, computed, std::abs(computed - exact)});
    }

    const EigenReport* listed = &base;
    std::optional<EigenReport> deformed;
    if (has_multiplication(m)) {
      const auto samples = m.deformation->profile.sample(grid.nodes());
      const RMatrix h = conjugate_by_multiplication(H, samples);
      deformed = eigensolve(h, k);
      listed = &*deformed;
      double spread = 0.0;
      for (Index i = 0; i < k; ++i) {
        spread = std::max(spread, std::abs(deformed->eigenvalues(i) - base.eigenvalues(i)) /
                                      scale_of(std::abs(base.eigenvalues(i))));
      }
      const std::vector<std::string> ops{"conjugate_by_multiplication", "eigensolve"};
      b.add("similarity.spectrum", spread, tol.similarity, "diag(S) H diag(S)^-1 keeps the discrete spectrum", ops)
          .note = "relative to max(1, |lambda|) over the lowest " + std::to_string(k) + " pairs";
      b.add("similarity.imaginary", deformed->max_imaginary, tol.biorthogonality, "conjugated spectrum is real", ops);
      b.add("similarity.biorthogonality", deformed->biorth_error, tol.biorthogonality,
            "<w_j, v_k> = delta_jk for the lowest pairs", ops);
      b.add("similarity.right_eigenfunction",
            compare_eigenfunctions(*deformed, m, grid, samples, 0, EigenSide::Right), tol.eigen,
            "right ground vector is S e0", {"compare_eigenfunctions"});
      b.add("similarity.left_eigenfunction",
            compare_eigenfunctions(*deformed, m, grid, samples, 0, EigenSide::Left), tol.eigen,
            "left ground vector is S^-1 e0", {"compare_eigenfunctions"});
    }
    for (Index i = 0; i < listed->eigenvalues.size(); ++i) {
      report.eigenvalues.push_back({static_cast<int>(i), listed->eigenvalues(i).real(), listed->eigenvalues(i).imag(),
                                    listed->residual_per_pair[static_cast<std::size_t>(i)]});
    }
  });

  const auto form = printed_form_for(m);
  if (!form) return;
  b.guard("printed", {"printed_form_residual"}, [&] {
    const Grid grid = cfg.resolved_grid();
    const Grid coarse = coarse_grid(grid);
    const auto fine = printed_form_residual(*form, grid);
    const auto rough = printed_form_residual(*form, coarse);
    const std::string prefix = "printed." + form->name();
    const bool gated = form->gated();
    const std::vector<std::string> ops{"printed_form_residual"};
    auto& r = b.add(prefix + ".residual", fine.residual, tol.eigen,
                    "printed operator agrees with S H S^-1 on smooth probes", ops, gated);
    b.add(prefix + ".order", observed_order(rough.residual, fine.residual, coarse.spacing(), grid.spacing()), 1.8,
          "printed-form residual shrinks as h^2", ops, gated, Relation::AtLeast);
    b.add(prefix + ".drift_identity", fine.drift_deviation, 1e-10, "printed drift = 2 S'/S", ops, gated);
    b.add(prefix + ".zeroth_identity", fine.extra_deviation, 1e-10,
          "printed zeroth-order term = S''/S - 2 (S'/S)^2", ops, gated);
    if (!gated) {
      r.note = "informational; oracle drift at the first node " + format_real(fine.oracle_drift_first_node) +
               " against printed " + format_real(fine.drift_first_node);
      report.notes.push_back(
          "printed oscillator form uses kinetic -d^2 and drift 2(1 - tanh x); conjugating c^dagger c "
          "gives -d^2/2 and drift S'/S, so the printed form is reported without gating");
    }
  });

  if (m.effective_kind() == ModelKind::InfiniteWell && has_multiplication(m) &&
      m.deformation->profile.kind == Profile::Kind::InverseCosine) {
    b.guard("expansion", {"position_eigenfunction"}, [&] {
      const Profile& p = m.deformation->profile;
      const Grid grid = cfg.resolved_grid();
      const auto nodes = grid.nodes();
      double worst = 0.0;
      for (int n = 0; n < 8; ++n) {
        std::vector<double> coefficient(static_cast<std::size_t>(n + p.k0 + 4), 0.0);
        for (const auto& [idx, c] : cosine_multiplier_expansion(p.alpha, p.k0, n)) {
          coefficient[static_cast<std::size_t>(idx)] += c;
        }
        for (int j = 0; j < static_cast<int>(coefficient.size()); ++j) {
          double projection = 0.0;
          for (double x : nodes) {
            projection += position_eigenfunction(m, j, x) * (p.alpha + std::cos(p.k0 * x)) *
                          position_eigenfunction(m, n, x);
          }
          projection *= grid.spacing();
          worst = std::max(worst, std::abs(projection - coefficient[static_cast<std::size_t>(j)]));
        }
      }
      b.add("well_cosine.expansion", worst, tol.quadrature,
            "(alpha + cos k0 x) e_n = alpha e_n + (e_{n+k0} + e_{n-k0}) / 2", {"position_eigenfunction"});
    });
    report.notes.push_back(
        "inverse-cosine deformation: the left ground vector is (alpha + cos k0 x) e0, i.e. alpha e0 + "
        "(e_{k0} - e_{k0-2}) / 2 with e_{-1} = 0; for k0 = 1 this is alpha e0 + e1 / 2");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* relation_symbol(Relation r) { return r == Relation::AtMost ? "<=" : ">="; }

OrderedJson json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.gated; });
}

std::size_t Report::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.gated && !c.passed; }));
}

std::set<std::string> Report::operations() const {
  std::set<std::string> ops;
  for (const auto& c : checks) {
    if (std::isfinite(c.value)) ops.insert(c.operations.begin(), c.operations.end());
  }
  return ops;
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Report run_suite(const RunConfig& cfg, unsigned sections) {
  Report report;
  report.config_json = cfg.to_json();
  if (sections & section::kAlgebra) algebra_section(cfg, report);
  if (sections & section::kSpecial) special_section(cfg, report);
  if (sections & section::kModels) models_section(cfg, report);
  if (sections & section::kDeformation) deformation_section(cfg, report);
  if (sections & section::kDiscretization) discretization_section(cfg, report);
  return report;
}

const std::vector<std::string>& audited_operations() {
  static const std::vector<std::string> ops{
      "iterate_spectrum", "generalized_factorial", "build_ladder", "gha_residuals", "susy_partner",
      "check_annihilation",
      "gegenbauer", "log_gamma", "normalized_eigenfunction", "recurrence_residual_multiplication",
      "recurrence_residual_derivative", "orthonormality_matrix",
      "analytic_spectrum", "position_eigenfunction", "pt_ladder_matrices", "pt_algebra_report",
      "well_ladder_matrices", "quon_realization", "pseudo_boson_power", "effective_potential",
      "deform", "build_families", "dgha_residuals", "eigencheck", "quasi_basis_check", "frame_diagnostics",
      "reconstruct_gha", "nlpb_check",
      "build_hamiltonian", "conjugate_by_multiplication", "printed_form_residual", "eigensolve",
      "compare_eigenfunctions"};
  return ops;
}

std::vector<std::pair<std::string, RunConfig>> selftest_configs(int grid_points) {
  const auto make = [grid_points](ModelSpec m) {
    RunConfig c;
    c.model = std::move(m);
    c.grid.n_points = grid_points;
    c.outputs = {"spectrum", "eigenvalues", "potential"};
    return c;
  };
  // [n]_q saturates at 1 / (1 - q); a short truncation keeps the spectrum
  // strictly increasing in double precision
  RunConfig quon = make(ModelSpec::quon(0.5).with(SimilarityRecipe::diagonal_of_number(Profile::rational_pt())));
  quon.N = 32;
  quon.margin = default_margin(quon.N);
  return {
      {"well", make(ModelSpec::infinite_well())},
      {"well_diagonal", make(ModelSpec::infinite_well().with(SimilarityRecipe::diagonal_of_number(Profile::rational_pt())))},
      {"well_inverse_cosine",
       make(ModelSpec::infinite_well().with(SimilarityRecipe::multiplication(Profile::inverse_cosine(2.0, 1))))},
      {"pt_rational", make(ModelSpec::poschl_teller(2.0).with(SimilarityRecipe::multiplication(Profile::rational_pt())))},
      {"ho_tanh", make(ModelSpec::harmonic_oscillator().with(SimilarityRecipe::multiplication(Profile::tanh_shift())))},
      {"quon_diagonal", quon},
      {"pseudo_boson_k1", make(ModelSpec::pseudo_boson_power(1))},
  };
}

Report run_selftest(int grid_points) {
  Report merged;
  OrderedJson configs = OrderedJson::object();
  std::set<std::string> reached;
  for (const auto& [label, cfg] : selftest_configs(grid_points)) {
    Report r = run_suite(cfg);
    configs[label] = OrderedJson::parse(r.config_json);
    const auto ops = r.operations();
    reached.insert(ops.begin(), ops.end());
    for (auto& c : r.checks) {
      c.name = label + "/" + c.name;
      merged.checks.push_back(std::move(c));
    }
    for (auto& n : r.notes) {
      if (std::find(merged.notes.begin(), merged.notes.end(), n) == merged.notes.end()) merged.notes.push_back(n);
    }
  }
  merged.config_json = configs.dump(2);

  std::string missing;
  int count = 0;
  for (const auto& op : audited_operations()) {
    if (!reached.count(op)) {
      missing += (missing.empty() ? "" : ", ") + op;
      ++count;
    }
  }
  Check c;
  c.name = "coverage.operations";
  c.group = "report";
  c.value = count;
  c.threshold = 0.0;
  c.passed = count == 0;
  c.identity = "every audited operation is reached by a built-in configuration";
  c.note = count == 0 ? std::to_string(audited_operations().size()) + " operations reached" : "missing: " + missing;
  merged.checks.push_back(std::move(c));
  return merged;
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "table") return Format::Table;
  raise(ErrorCode::ValidationError, "unknown format '" + name + "' (json, csv, table)");
}

std::string format_shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_real(double x) {
  std::string s = format_shortest(x);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::Json: {
      OrderedJson j;
      j["schema"] = report.schema;
      j["config"] = OrderedJson::parse(report.config_json);
      j["summary"] = {{"checks", report.checks.size()}, {"failed", report.failed_count()}, {"passed", report.passed()}};
      OrderedJson checks = OrderedJson::array();
      for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"group", c.group},
                          {"value", json_number(c.value)},
                          {"relation", relation_symbol(c.relation)},
                          {"threshold", json_number(c.threshold)},
                          {"passed", c.passed},
                          {"gated", c.gated},
                          {"identity", c.identity},
                          {"operations", c.operations},
                          {"note", c.note}});
      }
      j["checks"] = checks;
      j["notes"] = report.notes;
      if (report.potential_minimum) {
        j["potential_minimum"] = {{"x", report.potential_minimum->x}, {"value", report.potential_minimum->value}};
      }
      return j.dump(2) + "\n";
    }
    case Format::Csv: {
      std::ostringstream os;
      os << "name,group,value,relation,threshold,passed,gated,identity\n";
      for (const auto& c : report.checks) {
        os << csv_field(c.name) << ',' << c.group << ',' << format_shortest(c.value) << ','
           << relation_symbol(c.relation) << ',' << format_shortest(c.threshold) << ','
           << (c.passed ? "true" : "false") << ',' << (c.gated ? "true" : "false") << ',' << csv_field(c.identity)
           << '\n';
      }
      return os.str();
    }
    case Format::Table: {
      std::size_t width = 0;
      for (const auto& c : report.checks) width = std::max(width, c.name.size());
      std::ostringstream os;
      os << "schema " << report.schema << "\n";
      for (const auto& c : report.checks) {
        const char* tag = c.passed ? "PASS" : (c.gated ? "FAIL" : "INFO");
        os << '[' << tag << "] " << c.name << std::string(width - c.name.size() + 2, ' ') << format_shortest(c.value)
           << ' ' << relation_symbol(c.relation) << ' ' << format_shortest(c.threshold) << "  " << c.identity;
        if (!c.note.empty()) os << "  (" << c.note << ')';
        os << '\n';
      }
      for (const auto& n : report.notes) os << "note: " << n << '\n';
      os << (report.passed() ? "PASSED" : "FAILED") << ": " << report.checks.size() << " checks, "
         << report.failed_count() << " failed\n";
      return os.str();
    }
  }
  return {};
}

std::string render_spectrum_csv(const Report& report) {
  std::ostringstream os;
  os << "n,analytic,computed,error\n";
  for (const auto& r : report.spectrum) {
    os << r.n << ',' << format_shortest(r.analytic) << ',' << format_shortest(r.computed) << ','
       << format_shortest(r.error) << '\n';
  }
  return os.str();
}

std::string render_eigenvalues_csv(const Report& report) {
  std::ostringstream os;
  os << "index,re,im,residual\n";
  for (const auto& r : report.eigenvalues) {
    os << r.index << ',' << format_real(r.re) << ',' << format_real(r.im) << ',' << format_real(r.residual) << '\n';
  }
  return os.str();
}

std::string render_potential_csv(const Report& report) {
  std::ostringstream os;
  os << "x,V_eff\n";
  for (const auto& r : report.potential) os << format_real(r.x) << ',' << format_real(r.value) << '\n';
  return os.str();
}

std::vector<PotentialRow> potential_rows(const ModelSpec& m) {
  std::vector<PotentialRow> rows;
  rows.reserve(801);
  for (int i = -400; i <= 400; ++i) {
    const double x = i / 100.0;
    rows.push_back({x, effective_potential(m, x)});
  }
  return rows;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) raise(ErrorCode::IoError, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) raise(ErrorCode::IoError, "write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    raise(ErrorCode::IoError, "cannot rename onto '" + path.string() + "'");
  }
}

std::vector<std::filesystem::path> emit(const Report& report, Format format, const std::filesystem::path& dir,
                                        const std::vector<std::string>& outputs) {
  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string& name, const std::string& content) {
    const auto path = dir / name;
    write_atomic(path, content);
    written.push_back(path);
  };
  switch (format) {
    case Format::Json: put("report.json", render(report, format)); break;
    case Format::Csv: put("checks.csv", render(report, format)); break;
    case Format::Table: put("report.txt", render(report, format)); break;
  }
  const auto wants = [&](const char* name) { return std::find(outputs.begin(), outputs.end(), name) != outputs.end(); };
  if (wants("spectrum") && !report.spectrum.empty()) put("spectrum.csv", render_spectrum_csv(report));
  if (wants("eigenvalues") && !report.eigenvalues.empty()) put("eigenvalues.csv", render_eigenvalues_csv(report));
  if (wants("potential") && !report.potential.empty()) put("potential.csv", render_potential_csv(report));
  return written;
}

}  // namespace gha
