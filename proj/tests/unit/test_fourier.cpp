#include <cmath>

#include <gtest/gtest.h>

#include "symaudit/fourier_symbol.hpp"
#include "symaudit/majorant.hpp"
#include "symaudit/selftest.hpp"

using namespace symaudit;

namespace {

const FourierSymbol prodcos = fourier_symbol_of_product_cosine(BrownianNeg{});

FourierSymbol scaled_symbol(const FourierSymbol& fs, double c) {
  FourierSymbol out = fs;
  out.coefficients = [inner = fs.coefficients, c](double u) {
    FourierCoefficients co = inner(u);
    co.a0 *= c;
    for (auto& t : co.terms) {
      t.a *= c;
      t.b *= c;
    }
    return co;
  };
  return out;
}

// a_0 = -u^2, a_1 = 2u^2: the oscillating part outweighs the mean
FourierSymbol undominated() {
  FourierSymbol fs;
  fs.label = "undominated";
  fs.coefficients = [](double u) { return FourierCoefficients{-u * u, {{1, 2.0 * u * u, 0.0}}, 0.0}; };
  return fs;
}

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

}  // namespace

TEST(ProductCosine, Coefficients) {
  const FourierCoefficients c = prodcos.coefficients(2.0);
  EXPECT_EQ(c.a0, complex(-2.0, 0.0));
  ASSERT_EQ(c.terms.size(), 2u);
  for (const auto& t : c.terms) {
    EXPECT_EQ(std::abs(t.n), 1);
    EXPECT_EQ(t.a, complex(1.0, 0.0));
    EXPECT_EQ(t.b, complex(0.0, 0.0));
  }
  const FourierCoefficients z = prodcos.coefficients(0.0);
  EXPECT_EQ(std::abs(z.a0), 0.0);
}

TEST(ProductCosine, Reconstruction) {
  const SymbolSpec spec = ProductCosine{BrownianNeg{}};
  for (double x : {-2.0, 0.0, 0.7, 3.0})
    for (double u : {0.0, 0.5, 4.0, 30.0})
      EXPECT_NEAR(std::abs(prodcos.reconstruct(x, u) - eval_symbol(spec, x, u)), 0.0, 1e-14 * (1 + u * u));
}

TEST(Localize, ConstantSymbolHasOnlyTheMean) {
  const SymbolSpec spec = ConstantSymbol{BrownianNeg{}};
  const FourierSymbol fs = localize_fourierize(spec, 0.3, 2, LocalizeOptions{16, 256});
  EXPECT_DOUBLE_EQ(fs.k, 4.0 * pi);
  for (double u : {0.5, 3.0}) {
    const FourierCoefficients c = fs.coefficients(u);
    EXPECT_NEAR(std::abs(c.a0 - complex(-0.5 * u * u)), 0.0, 1e-13 * u * u);
    for (const auto& t : c.terms) EXPECT_LE(std::abs(t.a) + std::abs(t.b), 1e-13 * u * u);
  }
}

TEST(Localize, ReproducesSymbolOnThePlateau) {
  const SymbolSpec spec = ProductCosine{BrownianNeg{}};
  const double x0 = 0.4;
  const FourierSymbol fs = localize_fourierize(spec, x0, 1);
  for (double u : {1.0, 5.0})
    for (double x : linspace(x0 - 0.25, x0 + 0.25, 11))
      EXPECT_NEAR(std::abs(fs.reconstruct(x, u) - eval_symbol(spec, x, u)) / (1 + u * u), 0.0, 1e-5) << x;
}

TEST(Localize, RejectsBadArguments) {
  EXPECT_THROW(localize_fourierize(Ex31{}, 0.0, 0), DomainError);
  EXPECT_THROW(localize_fourierize(Ex31{}, 0.0, 1, LocalizeOptions{64, 100}), DomainError);
  EXPECT_THROW(localize_fourierize(Ex32{}, 0.1, 1), DomainError);  // window reaches x < 0
}

TEST(Localize, UnderresolvedQuadratureIsReported) {
  const FourierSymbol fs = localize_fourierize(ProductCosine{BrownianNeg{}}, 0.0, 1, LocalizeOptions{2, 64});
  EXPECT_THROW(fs.coefficients(1.0), QuadratureUnderresolved);
}

TEST(Dominance, Cases) {
  const auto grid = linspace(-20.0, 20.0, 81);
  const FourierSymbol constant = localize_fourierize(ConstantSymbol{BrownianNeg{}}, 0.0, 1, LocalizeOptions{8, 64});
  const DominanceReport c = check_dominance(constant, grid);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.min_margin, 0.0, 1e-12);  // at u = 0

  const DominanceReport p = check_dominance(prodcos, grid);
  EXPECT_TRUE(p.pass);
  EXPECT_EQ(p.min_margin, 0.0);  // equality at every u

  const DominanceReport f = check_dominance(undominated(), grid);
  EXPECT_FALSE(f.pass);
  EXPECT_DOUBLE_EQ(f.min_margin, -400.0);
  EXPECT_DOUBLE_EQ(std::abs(f.u_at_min), 20.0);
  EXPECT_FALSE(check_dominance(prodcos, std::vector<double>{}).pass);
}

TEST(KConstant, Cases) {
  const auto grid = linspace(-20.0, 20.0, 401);
  const FourierSymbol constant = localize_fourierize(ConstantSymbol{BrownianNeg{}}, 0.0, 1, LocalizeOptions{8, 64});
  EXPECT_NEAR(compute_K(constant, grid).K, 0.0, 1e-10);
  const KReport k = compute_K(prodcos, grid);
  // sum n^2 |a_n| = u^2/2, so the sup over the grid is 200/401
  EXPECT_NEAR(k.K, 200.0 / 401.0, 1e-15);
  EXPECT_GE(k.K, 0.49);
  EXPECT_EQ(std::abs(k.u_star), 20.0);
  EXPECT_EQ(k.max_index, 1);
  EXPECT_NEAR(compute_K(scaled_symbol(prodcos, 2.0), grid).K, 2.0 * k.K, 1e-15);
}

TEST(Reflection, LeavesAuditsUnchanged) {
  const FourierSymbol loc = localize_fourierize(ProductCosine{BrownianNeg{}}, 0.2, 1);
  const FourierSymbol ref = reflect_indices(loc);
  const auto grid = linspace(-5.0, 5.0, 11);
  for (double u : grid)
    for (double x : {-0.1, 0.2, 0.45})
      EXPECT_NEAR(std::abs(loc.reconstruct(x, u) - ref.reconstruct(x, u)), 0.0, 1e-12 * (1 + u * u));
  EXPECT_DOUBLE_EQ(compute_K(loc, grid).K, compute_K(ref, grid).K);
  EXPECT_DOUBLE_EQ(check_dominance(loc, grid).min_margin, check_dominance(ref, grid).min_margin);
}

TEST(TermMeasure, TrivialCases) {
  const TermMeasure zero = build_term_measure(complex{}, TrigKind::cos, 1.0, 0.5, 1e-15);
  ASSERT_EQ(zero.measure.atoms().size(), 1u);
  EXPECT_EQ(zero.measure.atoms()[0].first, 0);
  EXPECT_EQ(zero.measure.atoms()[0].second, complex(1.0, 0.0));
  const TermMeasure t0 = build_term_measure(complex{0.7, 0.2}, TrigKind::sin, 2.0, 0.0, 1e-15);
  ASSERT_EQ(t0.measure.atoms().size(), 1u);
  EXPECT_EQ(t0.measure.atoms()[0].second, complex(1.0, 0.0));
  EXPECT_THROW(build_term_measure(1.0, TrigKind::cos, 1.0, 1.5, 1e-15), DomainError);
  EXPECT_THROW(build_term_measure(1.0, TrigKind::cos, 0.0, 0.5, 1e-15), DomainError);
}

TEST(TermMeasure, CentralWeight) {
  const TermMeasure P = build_term_measure(1.0, TrigKind::cos, 1.0, 1.0, 1e-15);
  complex w0{};
  for (const auto& [j, w] : P.measure.atoms())
    if (j == 0) w0 = w;
  double series = 0.0;
  for (int m = 0; m <= 40; m += 2) series += std::pow(0.5, m) / std::tgamma(m + 1.0) * binomial(m, m / 2);
  series *= std::exp(-1.0);
  EXPECT_NEAR(w0.real(), series, 1e-14);
  EXPECT_NEAR(w0.real(), std::exp(-1.0) * std::cyl_bessel_i(0.0, 1.0), 1e-14);
  EXPECT_NEAR(w0.real(), 0.46575961, 1e-8);
}

TEST(TermMeasure, PropertiesAndSweep) {
  const auto xgrid = linspace(-10.0, 10.0, 101);
  for (TrigKind kind : {TrigKind::cos, TrigKind::sin}) {
    const complex coef{0.6, -1.1};
    const TermMeasure P = build_term_measure(coef, kind, 0.7, 0.8, 1e-15);
    const TermReport r = verify_term_measure(P.measure, {std::abs(coef), coef, kind, 0.7, 0.8}, xgrid);
    EXPECT_TRUE(r.hypothesis);
    EXPECT_TRUE(r.all_ok()) << to_string(kind);
  }
  const TermSweepReport s = term_measure_sweep(40, 7);
  EXPECT_TRUE(s.pass());
  EXPECT_EQ(s.failures, 0u);
}

TEST(TermMeasure, ViolatedHypothesisIsFlagged) {
  // a < |b|: e^{-ta} exp(t b mu) has total variation e^{t(|b| - a)} > 1
  const auto xgrid = linspace(-10.0, 10.0, 101);
  const complex a{0.5, 0.0}, b{2.0, 0.0};
  const TermMeasure P = build_term_measure(a, b, TrigKind::cos, LatticeUnit{1.0, "1"}, 1, 1.0, 1e-15);
  const TermReport r = verify_term_measure(P.measure, {a, b, TrigKind::cos, 1.0, 1.0}, xgrid);
  EXPECT_FALSE(r.hypothesis);
  EXPECT_TRUE(r.fourier_ok);
  EXPECT_FALSE(r.tv_ok);
  EXPECT_NEAR(r.tv, std::exp(1.5), 1e-12);
}

TEST(Majorant, ProductCosineAgainstFourierInversion) {
  const double u = 1.0, t = 0.5;
  const auto xgrid = linspace(-pi, pi, 33);
  const MajorantReport m = assemble_majorant(prodcos, u, t, 1, xgrid);
  EXPECT_NEAR(std::abs(m.a0_tilde), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(m.k_sigma, 0.5);
  EXPECT_EQ(m.factors, 3u);
  EXPECT_TRUE(m.condition1);
  EXPECT_TRUE(m.condition2);
  EXPECT_NEAR(m.tv, 1.0, 1e-12);
  // P^(x) = e^{-1/4 (1 - cos x)}; atoms by periodic trapezoid inversion
  const int Q = 64;
  for (int j = -4; j <= 4; ++j) {
    complex p{};
    for (int q = 0; q < Q; ++q) {
      const double x = 2.0 * pi * q / Q;
      p += std::exp(-0.25 * (1.0 - std::cos(x))) * std::polar(1.0, -j * x);
    }
    p /= static_cast<double>(Q);
    complex w{};
    for (const auto& [i, v] : m.measure.atoms())
      if (i == j) w = v;
    EXPECT_NEAR(std::abs(w - p), 0.0, 1e-13) << j;
  }
}

TEST(Majorant, WeightedMassBound) {
  const auto xgrid = linspace(-pi, pi, 33);
  for (double u : {0.5, 1.0, 5.0})
    for (double t : {0.1, 1.0}) {
      const MajorantReport m = assemble_majorant(prodcos, u, t, 1, xgrid);
      EXPECT_TRUE(m.condition2) << u << " " << t;
      EXPECT_LE(m.weighted_mass, 1.0 + 0.5 * t + 1e-6);
      EXPECT_LE(m.condition1_residual, 1e-10);
    }
}

TEST(Majorant, TrivialCases) {
  const auto xgrid = linspace(-pi, pi, 9);
  const MajorantReport zero_t = assemble_majorant(prodcos, 3.0, 0.0, 1, xgrid);
  ASSERT_EQ(zero_t.measure.atoms().size(), 1u);
  EXPECT_NEAR(std::abs(zero_t.measure.atoms()[0].second - 1.0), 0.0, 1e-15);
  const FourierSymbol constant = localize_fourierize(ConstantSymbol{BrownianNeg{}}, 0.0, 1, LocalizeOptions{8, 64});
  const MajorantReport c = assemble_majorant(constant, 2.0, 0.5, 0, xgrid);
  ASSERT_EQ(c.measure.atoms().size(), 1u);
  EXPECT_NEAR(c.measure.atoms()[0].second.real(), std::exp(-1.0), 1e-13);
  EXPECT_THROW(assemble_majorant(undominated(), 1.0, 0.5, 1, xgrid), ViolatedDominance);
  EXPECT_THROW(assemble_majorant(prodcos, 1.0, 2.0, 1, xgrid), DomainError);
}
