#include <cmath>

#include <gtest/gtest.h>

#include "symaudit/symbol.hpp"

using namespace symaudit;

namespace {

const LatticeUnit one{1.0, "1"};
const LatticeUnit root2{std::sqrt(2.0), "sqrt2"};

std::vector<SymbolSpec> all_specs() {
  LevyTriplet t{0.3, 0.5, {{0.5, 1.0}, {-2.0, 0.25}}};
  return {Ex31{},
          Ex31Approx{one, 3},
          Ex32{},
          Ex32Approx{root2, 2},
          ProductCosine{BrownianNeg{}},
          ProductCosine{TripletExponent{t}},
          ConstantSymbol{TripletExponent{t}},
          TripletField{[t](double x) {
            LevyTriplet s = t;
            s.drift = std::sin(x);
            return s;
          }}};
}

// e^{iuy} - 1 - iu chi(y) in the naive form
complex naive_lk(const LevyTriplet& t, double u) {
  complex q{-0.5 * u * u * t.diffusion, u * t.drift};
  for (const auto& a : t.jumps)
    q += a.rate * (std::exp(complex{0, u * a.location}) - 1.0 - complex{0, u * truncation(a.location)});
  return q;
}

}  // namespace

TEST(Symbol, Truncation) {
  EXPECT_EQ(truncation(0.5), 0.5);
  EXPECT_EQ(truncation(-1.0), -1.0);
  EXPECT_EQ(truncation(1.5), 0.0);
}

TEST(Symbol, LevyKhintchineMatchesNaiveForm) {
  const LevyTriplet t{0.7, 1.3, {{0.25, 2.0}, {-3.0, 0.5}, {1.0, 1.0}}};
  for (double u : {-7.0, -1.0, 0.3, 2.0, 11.0}) EXPECT_NEAR(std::abs(levy_khintchine(t, u) - naive_lk(t, u)), 0.0, 1e-12);
}

TEST(Symbol, ValidateRejectsBadTriplets) {
  EXPECT_THROW(validate(LevyTriplet{0, -1, {}}), DomainError);
  EXPECT_THROW(validate(LevyTriplet{0, 0, {{0.0, 1.0}}}), DomainError);
  EXPECT_THROW(validate(LevyTriplet{0, 0, {{1.0, -1.0}}}), DomainError);
}

TEST(Symbol, Ex31Values) {
  for (double u : {0.1, 1.0, 30.0}) EXPECT_NEAR(eval_symbol(Ex31{}, 0.0, u).real(), -0.5 * u * u, 1e-12 * u * u);
  EXPECT_NEAR(eval_symbol(Ex31{}, 1.0, pi).real(), -2.0, 1e-15);
  // continuity through the small-argument branch
  const double u = 3.0;
  for (double x : {1e-3, 1e-5, 3e-5, 1e-7}) {
    const double direct = (std::cos(x * u) - 1.0) / (x * x);
    const double series = -0.5 * u * u + std::pow(u, 4) * x * x / 24.0;
    EXPECT_NEAR(eval_symbol(Ex31{}, x, u).real(), x > 1e-4 ? direct : series, 1e-9);
  }
}

TEST(Symbol, Ex32Values) {
  EXPECT_EQ(eval_symbol(Ex32{}, 0.0, 2.0), complex(0.0, 2.0));
  const double x = 0.8, u = 1.7;
  EXPECT_NEAR(std::abs(eval_symbol(Ex32{}, x, u) - (std::exp(complex{0, u * x}) - 1.0) / x), 0.0, 1e-15);
  EXPECT_THROW(eval_symbol(Ex32{}, -1.0, 1.0), DomainError);
}

TEST(Symbol, ApproximationsAgreeOutsideTheirCutoffs) {
  const Ex31Approx a31{one, 4};
  const Ex32Approx a32{one, 4};
  for (double x : {0.0625, 0.3, 2.0, 15.0})
    for (double u : {-3.0, 0.5, 9.0}) {
      EXPECT_NEAR(std::abs(eval_symbol(a31, x, u) - eval_symbol(Ex31{}, x, u)), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(eval_symbol(a32, x, u) - eval_symbol(Ex32{}, x, u)), 0.0, 1e-13);
    }
  // inner region of Ex31Approx: 4^n (cos(u k 2^-n) - 1)/k^2
  const double u = 7.0;
  EXPECT_NEAR(eval_symbol(a31, 0.01, u).real(), 256.0 * (std::cos(u / 16.0) - 1.0), 1e-12);
  // clamp of Ex32Approx
  EXPECT_NEAR(std::abs(eval_symbol(a32, 100.0, u) - eval_symbol(Ex32{}, 16.0, u)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_symbol(a32, 0.0, u) - eval_symbol(Ex32{}, 1.0 / 16.0, u)), 0.0, 1e-15);
}

TEST(Symbol, ValueAtZeroFrequencyIsZero) {
  for (const auto& s : all_specs())
    for (double x : {0.0, 0.4, 3.0}) EXPECT_NEAR(std::abs(eval_symbol(s, x, 0.0)), 0.0, 1e-15) << variant_name(s);
}

TEST(Symbol, TripletReproducesSymbol) {
  for (const auto& s : all_specs())
    for (double x : {0.0, 0.01, 0.4, 3.0, 40.0})
      for (double u : {-9.0, -0.5, 0.2, 4.0}) {
        const auto t = triplet_of(s, x).triplet;
        EXPECT_NEAR(std::abs(levy_khintchine(t, u) - eval_symbol(s, x, u)), 0.0, 1e-10 * (1 + u * u))
            << variant_name(s) << " x=" << x << " u=" << u;
      }
}

TEST(Symbol, TripletExamples) {
  const auto t0 = triplet_of(Ex31Approx{one, 0}, 0.0).triplet;
  ASSERT_EQ(t0.jumps.size(), 2u);
  EXPECT_DOUBLE_EQ(t0.total_rate(), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(t0.jumps[0].location), 1.0);
  for (double x : {0.0, 0.3, 7.0}) {
    const auto p = triplet_of(Ex32Approx{one, 0}, x).triplet;
    ASSERT_EQ(p.jumps.size(), 1u);
    EXPECT_DOUBLE_EQ(p.jumps[0].location, 1.0);
    EXPECT_DOUBLE_EQ(p.jumps[0].rate, 1.0);
  }
  const TripletAt e = triplet_of(Ex31{}, 0.0);
  EXPECT_TRUE(e.has_diffusion);
  EXPECT_EQ(e.triplet.diffusion, 1.0);
  EXPECT_TRUE(e.triplet.jumps.empty());
}

TEST(Symbol, GeneratorExamples) {
  const TestFunction sq = TestFunction::monomial(2), id = TestFunction::monomial(1);
  for (const SymbolSpec s : {SymbolSpec{Ex31Approx{one, 10}}, SymbolSpec{Ex31Approx{root2, 3}}})
    for (double x : {0.0, 1.0 / 4096, 0.5, 1.0, 8.0}) {
      EXPECT_NEAR(apply_generator(s, sq, x), 1.0, 1e-9) << x;
      EXPECT_NEAR(approx_generator_closed_form(s, sq.f, x), 1.0, 1e-9) << x;
    }
  for (double x : {0.0, 0.5, 3.0, 100.0}) {
    const SymbolSpec s = Ex32Approx{one, 2};
    EXPECT_NEAR(apply_generator(s, id, x), 1.0, 1e-12);
    EXPECT_NEAR(approx_generator_closed_form(s, id.f, x), 1.0, 1e-12);
  }
  for (const auto& s : all_specs()) EXPECT_EQ(apply_generator(s, TestFunction::constant(3.0), 0.7), 0.0);
  EXPECT_THROW(approx_generator_closed_form(Ex31{}, sq.f, 1.0), UnsupportedSpec);
}

TEST(Symbol, FiniteDifferenceTestFunctionsAreFlagged) {
  const TestFunction fd = TestFunction::from_values([](double x) { return std::sin(x); });
  EXPECT_TRUE(fd.finite_difference);
  EXPECT_NEAR(fd.df(0.3), std::cos(0.3), 1e-8);
  EXPECT_NEAR(fd.d2f(0.3), -std::sin(0.3), 1e-4);
  EXPECT_FALSE(TestFunction::monomial(3).finite_difference);
}

TEST(Symbol, BoundednessAudit) {
  const auto grid = linspace(-5.0, 5.0, 101);
  EXPECT_NEAR(boundedness_audit(Ex31{}, grid).sup, 1.0, 1e-12);
  const auto r = boundedness_audit(Ex32Approx{one, 2}, linspace(0.0, 100.0, 401));
  EXPECT_LE(r.sup, 5.0);
  EXPECT_NEAR(r.sup, 4.0, 1e-12);  // at h = 4 the drift vanishes, int y^2 F = h
  for (const auto& p : boundedness_audit(ConstantSymbol{BrownianNeg{}}, grid).points) EXPECT_EQ(p.g, 1.0);
}

TEST(Symbol, HoelderModulus) {
  const auto ugrid = linspace(-1000.0, 1000.0, 2001);
  const std::vector<std::pair<double, double>> pairs{{0.0, pi}, {pi, 0.0}, {0.7, 0.7}};
  const auto rows = hoelder_modulus(ProductCosine{BrownianNeg{}}, pairs, ugrid);
  EXPECT_NEAR(rows[0].modulus, 1.0, 1e-5);
  EXPECT_LE(rows[0].modulus, 1.0);
  EXPECT_EQ(rows[0].modulus, rows[1].modulus);
  EXPECT_EQ(rows[2].modulus, 0.0);
  const auto with_bound =
      hoelder_modulus(ProductCosine{BrownianNeg{}}, pairs, ugrid, HoelderBounds{1.0, 1.0});
  EXPECT_DOUBLE_EQ(*with_bound[0].mean_value_bound, 2.0);
}

TEST(Symbol, VariantNames) {
  EXPECT_EQ(variant_name(Ex31{}), "ex31");
  EXPECT_EQ(variant_name(Ex32Approx{one, 1}), "ex32approx");
  EXPECT_EQ(variant_name(ProductCosine{BrownianNeg{}}), "prodcos");
}
