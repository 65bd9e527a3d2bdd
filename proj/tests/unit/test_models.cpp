#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gha/error.hpp"
#include "gha/models.hpp"

namespace gha {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

TEST(AnalyticSpectrum, Examples) {
  EXPECT_DOUBLE_EQ(analytic_spectrum(ModelSpec::poschl_teller(2.0), 3), 25.0);
  EXPECT_DOUBLE_EQ(analytic_spectrum(ModelSpec::infinite_well(), 0), 1.0);
  EXPECT_NEAR(analytic_spectrum(ModelSpec::quon(0.5), 3), 1.75, 1e-15);
  EXPECT_DOUBLE_EQ(analytic_spectrum(ModelSpec::harmonic_oscillator(), 7), 7.0);
  EXPECT_DOUBLE_EQ(analytic_spectrum(ModelSpec::pseudo_boson_power(2), 3), 27.0);
}

TEST(AnalyticSpectrum, AgreesWithRecursion) {
  for (const ModelSpec& m : {ModelSpec::poschl_teller(1.5), ModelSpec::infinite_well(), ModelSpec::quon(0.7),
                             ModelSpec::harmonic_oscillator(), ModelSpec::pseudo_boson_power(1)}) {
    const auto s = iterate_spectrum(characteristic_function(m), ground_energy(m), 20);
    for (int n = 0; n <= 20; ++n) {
      EXPECT_NEAR(s[n], analytic_spectrum(m, n), 1e-12 * std::max(1.0, std::abs(s[n]))) << m.name();
    }
  }
}

TEST(ModelSpec, Validation) {
  EXPECT_THROW(ModelSpec::poschl_teller(0.5).validate(), Error);
  EXPECT_THROW(ModelSpec::quon(1.2).validate(), Error);
  EXPECT_THROW(ModelSpec::quon(0.0).validate(), Error);
  EXPECT_THROW(ModelSpec::pseudo_boson_power(0).validate(), Error);
  EXPECT_NO_THROW(ModelSpec::quon(1.0).validate());
  // a multiplication recipe needs a position realization
  EXPECT_THROW(ModelSpec::quon(0.5).with(SimilarityRecipe::multiplication(Profile::tanh_shift())).validate(), Error);
}

TEST(ModelSpec, LambdaOneRoutesToWell) {
  EXPECT_EQ(ModelSpec::poschl_teller(1.0).effective_kind(), ModelKind::InfiniteWell);
  EXPECT_EQ(ModelSpec::poschl_teller(1.5).effective_kind(), ModelKind::PoschlTeller);
}

TEST(PositionEigenfunction, Examples) {
  EXPECT_NEAR(position_eigenfunction(ModelSpec::infinite_well(), 1, kPi / 2), 0.0, 1e-15);
  EXPECT_NEAR(position_eigenfunction(ModelSpec::poschl_teller(1.0), 2, kPi / 4),
              std::sqrt(2.0 / kPi) * std::sin(3 * kPi / 4), 1e-14);
  EXPECT_NEAR(position_eigenfunction(ModelSpec::harmonic_oscillator(), 0, 0.0), std::pow(kPi, -0.25), 1e-15);
}

TEST(PositionEigenfunction, OutsideDomain) {
  EXPECT_THROW(position_eigenfunction(ModelSpec::infinite_well(), 0, 4.0), Error);
  EXPECT_THROW(position_eigenfunction(ModelSpec::quon(0.5), 0, 0.0), Error);
}

TEST(HermiteFunction, NormalizedByQuadrature) {
  // trapezoid on [-12, 12]: spectrally accurate for Gaussian-decaying integrands
  const int points = 4001;
  const double h = 24.0 / (points - 1);
  for (int n = 0; n <= 12; ++n) {
    for (int m = 0; m <= 12; ++m) {
      double sum = 0.0;
      for (int i = 0; i < points; ++i) {
        const double x = -12.0 + i * h;
        sum += hermite_function(n, x) * hermite_function(m, x);
      }
      EXPECT_NEAR(sum * h, n == m ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(HermiteFunction, ClosedFormFirstExcited) {
  for (double x : {-1.3, 0.2, 2.1}) {
    EXPECT_NEAR(hermite_function(1, x), std::sqrt(2.0) * x * std::pow(kPi, -0.25) * std::exp(-x * x / 2), 1e-15);
  }
}

TEST(LadderMatrices, ClosedFormEntries) {
  const auto two = pt_ladder_matrices(2.0, 8);
  EXPECT_NEAR(two.B.matrix()(0, 1).real(), std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(pt_g(2.0, 0.0), std::sqrt(2.0 / 3.0), 1e-15);
  const auto three_halves = pt_ladder_matrices(1.5, 8);
  EXPECT_NEAR(three_halves.C.matrix()(1, 2).real(), std::sqrt(10.0), 1e-13);
}

TEST(LadderMatrices, WellSpecialization) {
  EXPECT_NEAR(pt_g(1.0, 1.0), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(pt_t(1.0, 0.0), 0.5);
  const auto well = well_ladder_matrices(8);
  EXPECT_NEAR(well.C.matrix()(0, 1).real(), std::sqrt(3.0), 1e-14);
}

TEST(LadderMatrices, DegenerateLambdaRejected) {
  EXPECT_THROW(pt_ladder_matrices(1.0, 8), Error);
  EXPECT_THROW(pt_ladder_matrices(0.7, 8), Error);
}

TEST(GFunction, IncreasingAndBounded) {
  for (double lambda : {1.0, 1.5, 2.0, 3.0, 7.0}) {
    double prev = -1.0;
    const double lo = std::sqrt(2.0 * (lambda - 1.0) / (2.0 * lambda - 1.0));
    for (int t = (lambda == 1.0 ? 1 : 0); t <= 500; ++t) {
      const double g = pt_g(lambda, t);
      EXPECT_GT(g, prev);
      EXPECT_GE(g, lo - 1e-15);
      EXPECT_LT(g, 1.0);
      prev = g;
    }
  }
}

TEST(GFunction, TRatioIdentity) {
  // G(n)^2 = T(n - 1) / T(n)
  for (double lambda : {1.5, 2.0, 3.0}) {
    for (int n = 1; n <= 30; ++n) {
      EXPECT_NEAR(pt_g(lambda, n) * pt_g(lambda, n), pt_t(lambda, n - 1) / pt_t(lambda, n), 1e-14);
    }
  }
}

class PtAlgebra : public ::testing::TestWithParam<double> {};

TEST_P(PtAlgebra, AllIdentitiesOnInterior) {
  const auto r = pt_algebra_report(GetParam(), 64, 8);
  for (const auto& e : r.entries) EXPECT_LT(e.frobenius, 1e-10) << e.name;
}

INSTANTIATE_TEST_SUITE_P(Lambdas, PtAlgebra, ::testing::Values(1.0, 1.5, 2.0, 3.0));

TEST(PtAlgebra, SmallExample) {
  for (const auto& e : pt_algebra_report(2.0, 32, 4).entries) EXPECT_LT(e.frobenius, 1e-10) << e.name;
}

TEST(PtAlgebra, MissingDressingIsDetected) {
  auto set = pt_ladder_matrices(2.0, 32, 4);
  set.G = TruncatedOperator::identity(32, set.G.basis_tag(), 4);
  const auto r = ladder_algebra_report(set);
  EXPECT_GT(r.at("gt_identity").frobenius, 1e-3);
  EXPECT_GT(r.at("bdb").frobenius, 1e-3);
}

TEST(ModelRealization, InteriorAlgebraExact) {
  for (const ModelSpec& m : {ModelSpec::harmonic_oscillator(), ModelSpec::infinite_well(),
                             ModelSpec::poschl_teller(1.5), ModelSpec::quon(0.7)}) {
    const auto g = model_realization(m, 48, 6);
    EXPECT_LT(gha_residuals(g).max_frobenius(), 1e-10 * std::max(1.0, g.spectrum[47])) << m.name();
  }
}

TEST(Quon, SpectrumAndCommutator) {
  const auto d = quon_realization(0.5, 8, 2);
  const double expected[] = {0.0, 1.0, 1.5, 1.75};
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(d.h.matrix()(n, n).real(), expected[n], 1e-15);
  EXPECT_LT(quon_commutator_residual(d, 0.5), 1e-12);
}

TEST(Quon, QEqualsOneIsCanonical) {
  const auto d = quon_realization(1.0, 8, 2);
  const CMatrix comm = d.a.matrix() * d.b.matrix() - d.b.matrix() * d.a.matrix();
  EXPECT_LT(max_abs((comm - CMatrix::Identity(8, 8)).leftCols(6)), 1e-14);
}

TEST(Quon, DiagonalRecipeKeepsCommutator) {
  const auto d = quon_realization(0.3, 24, 4, SimilarityRecipe::diagonal_of_number(Profile::rational_pt()));
  EXPECT_LT(quon_commutator_residual(d, 0.3), 1e-12);
  EXPECT_GT(max_abs(d.b.matrix() - d.a.matrix().adjoint()), 1e-3);
}

TEST(PseudoBoson, PowerOneSpectrumIsSquares) {
  const auto d = pseudo_boson_power(1, pseudo_boson_base(12, 2));
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(d.h.matrix()(n, n).real(), n * n, 1e-12);
  const CMatrix comm = d.a.matrix() * d.b.matrix() - d.b.matrix() * d.a.matrix();
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(comm(n, n).real(), 2.0 * n + 1.0, 1e-12);
}

TEST(PseudoBoson, PowerTwoEntries) {
  const auto d = pseudo_boson_power(2, pseudo_boson_base(12, 2));
  EXPECT_NEAR(d.h.matrix()(2, 2).real(), 8.0, 1e-12);
  EXPECT_NEAR(d.f(d.h.matrix()(2, 2).real()), 27.0, 1e-11);
}

TEST(PseudoBoson, ShiftRules) {
  const auto base = pseudo_boson_base(24, 4, SimilarityRecipe::diagonal_of_number(Profile::tanh_shift()));
  for (int k = 1; k <= 3; ++k) {
    const auto r = pseudo_boson_shift_residuals(base, k);
    EXPECT_LT(r.at("a_shift").frobenius, 1e-9 * std::pow(20.0, k + 1));
    EXPECT_LT(r.at("b_shift").frobenius, 1e-9 * std::pow(20.0, k + 1));
  }
}

TEST(PseudoBoson, RejectsNonCanonicalBase) {
  auto base = pseudo_boson_base(12, 2);
  base.b = TruncatedOperator(2.0 * base.b.matrix(), base.b.basis_tag(), base.b.margin());
  try {
    pseudo_boson_power(1, base);
    FAIL() << "expected NonPseudoBosonic";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPseudoBosonic);
  }
}

TEST(NumberSimilarity, DiagonalSamples) {
  const auto pair = number_similarity(Profile::rational_pt(), 6, 1);
  for (int n = 0; n < 6; ++n) {
    const double t = n + 1.0;
    EXPECT_NEAR(pair.S.matrix()(n, n).real(), (1 + 2 * t) / (1 + t), 1e-15);
    EXPECT_NEAR((pair.S.matrix() * pair.S_inv.matrix())(n, n).real(), 1.0, 1e-15);
  }
}

TEST(NumberSimilarity, SampledProfileRejected) {
  const auto vanish = Profile::custom_samples({});
  EXPECT_THROW(number_similarity(vanish, 6, 1), Error);
}

TEST(Profile, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const Profile& p : {Profile::rational_pt(), Profile::tanh_shift(), Profile::inverse_cosine(2.0, 3)}) {
    for (double x : {0.3, 1.1, 2.4}) {
      const double d1 = (p.value(x + h) - p.value(x - h)) / (2 * h);
      const double d2 = (p.value(x + h) - 2 * p.value(x) + p.value(x - h)) / (h * h);
      EXPECT_NEAR(p.derivative(x), d1, 1e-8) << p.name();
      EXPECT_NEAR(p.second_derivative(x), d2, 1e-4) << p.name();
    }
  }
}

TEST(Profile, Bounds) {
  const auto [lo, hi] = Profile::rational_pt().bounds(1.0);
  EXPECT_NEAR(lo, 1.5, 1e-15);
  EXPECT_NEAR(hi, 2.0, 1e-15);
  const auto [clo, chi] = Profile::inverse_cosine(2.0, 1).bounds(0.0);
  EXPECT_NEAR(clo, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(chi, 1.0, 1e-15);
  EXPECT_THROW(Profile::inverse_cosine(1.0, 1).validate(), Error);
}

TEST(EffectivePotential, Origin) {
  const auto m = ModelSpec::harmonic_oscillator().with(SimilarityRecipe::multiplication(Profile::tanh_shift()));
  EXPECT_EQ(effective_potential(m, 0.0), -2.0);
}

TEST(EffectivePotential, LargeXApproachesOscillator) {
  const auto m = ModelSpec::harmonic_oscillator().with(SimilarityRecipe::multiplication(Profile::tanh_shift()));
  EXPECT_LT(std::abs(effective_potential(m, 12.0) - 72.0), 1e-9);
}

TEST(EffectivePotential, MinimumIsStationary) {
  const auto m = ModelSpec::harmonic_oscillator().with(SimilarityRecipe::multiplication(Profile::tanh_shift()));
  const auto min = effective_potential_argmin(m);
  // V' = x + 2 sech^2 x vanishes at the minimizer; the scan step bounds the miss
  const double sech = 1.0 / std::cosh(min.x);
  EXPECT_LT(min.x, 0.0);
  EXPECT_NEAR(min.x + 2.0 * sech * sech, 0.0, 5e-3);
  EXPECT_LE(min.value, effective_potential(m, 0.0));
}

TEST(EffectivePotential, OtherModelsUnsupported) {
  EXPECT_THROW(effective_potential(ModelSpec::infinite_well(), 0.0), Error);
}

// Independent oracle for the cosine expansion: projection by quadrature.
double well_projection(int m, int n, double alpha, int k0) {
  const int points = 4000;
  const double h = kPi / points;
  double sum = 0.0;
  for (int i = 1; i < points; ++i) {
    const double x = i * h;
    sum += std::sin((m + 1) * x) * (alpha + std::cos(k0 * x)) * std::sin((n + 1) * x);
  }
  return sum * h * 2.0 / kPi;
}

TEST(CosineExpansion, MatchesQuadrature) {
  for (int k0 : {1, 2, 3}) {
    for (int n = 0; n <= 6; ++n) {
      std::vector<double> coeff(n + k0 + 2, 0.0);
      for (const auto& [idx, c] : cosine_multiplier_expansion(2.0, k0, n)) coeff[idx] += c;
      for (int m = 0; m < static_cast<int>(coeff.size()); ++m) {
        EXPECT_NEAR(coeff[m], well_projection(m, n, 2.0, k0), 1e-10) << "k0=" << k0 << " n=" << n << " m=" << m;
      }
    }
  }
}

TEST(CosineExpansion, GroundStateCorrection) {
  // (alpha + cos x) e_0 = alpha e_0 + e_1 / 2; the printed form (alpha - 1/2) e_0 + e_2 / 2 disagrees
  const auto terms = cosine_multiplier_expansion(2.0, 1, 0);
  std::vector<double> coeff(3, 0.0);
  for (const auto& [idx, c] : terms) coeff[idx] += c;
  EXPECT_DOUBLE_EQ(coeff[0], 2.0);
  EXPECT_DOUBLE_EQ(coeff[1], 0.5);
  EXPECT_DOUBLE_EQ(coeff[2], 0.0);
}

}  // namespace
}  // namespace gha
