#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "symaudit/measure.hpp"
#include "symaudit/selftest.hpp"

using namespace symaudit;

namespace {

bool same_atoms(const Measure& a, const Measure& b) {
  return std::ranges::equal(a.atoms(), b.atoms());
}

}  // namespace

namespace {

const LatticeUnit one{1.0, "1"};

Measure two_point(double a, double b, std::int64_t s = 1) { return Measure(one, {{s, a}, {-s, b}}); }

// naive double loop, independent of the dense/map switch in convolve()
std::map<std::int64_t, complex> brute_convolve(const Measure& a, const Measure& b) {
  std::map<std::int64_t, complex> out;
  for (const auto& [i, w] : a.atoms())
    for (const auto& [j, v] : b.atoms()) out[i + j] += w * v;
  return out;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(Measure, ConstructorSortsMergesAndPrunes) {
  Measure mu(one, {{3, 1.0}, {-1, 2.0}, {3, 0.5}, {7, 1e-301}, {0, 0.0}});
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.atoms()[0].first, -1);
  EXPECT_EQ(mu.atoms()[1].first, 3);
  EXPECT_DOUBLE_EQ(mu.weight(3).real(), 1.5);
  EXPECT_EQ(mu.weight(7), complex{});
}

TEST(Measure, TotalMass) {
  EXPECT_EQ(total_mass(Measure(one)), complex{});
  EXPECT_EQ(total_mass(Measure::dirac(one, 3, {1, 1})), complex(1, 1));
  EXPECT_DOUBLE_EQ(total_mass(two_point(0.5, 0.5)).real(), 1.0);
}

TEST(Measure, TotalVariationAndNorm) {
  const Measure tv = total_variation(Measure::dirac(one, 2, {1, 1}));
  EXPECT_NEAR(tv.weight(2).real(), 1.41421356, 1e-8);
  EXPECT_TRUE(total_variation(Measure(one)).empty());
  EXPECT_DOUBLE_EQ(tv_norm(Measure::dirac(one, 0)), 1.0);
  EXPECT_DOUBLE_EQ(tv_norm(Measure(one, {{4, complex(0, 1)}, {9, complex(0, -1)}})), 2.0);
}

TEST(Measure, OrthogonalAdditivity) {
  const Measure mu(one, {{0, {1, 2}}, {1, -0.5}}), nu(one, {{5, {0, 3}}, {8, {-1, 1}}});
  EXPECT_NEAR(tv_norm(add(mu, nu)), tv_norm(mu) + tv_norm(nu), 1e-15);
}

TEST(Measure, LinearOperations) {
  const Measure mu(one, {{0, {1, 2}}, {1, -0.5}});
  EXPECT_TRUE(same_atoms(add(mu, Measure(one)), mu));
  EXPECT_TRUE(scale(0.0, mu).empty());
  EXPECT_EQ(add(Measure::dirac(one, 1), Measure::dirac(one, 1)).weight(1), complex(2.0));
  EXPECT_TRUE(subtract(mu, mu).empty());
}

TEST(Measure, UnitMismatch) {
  const Measure a = Measure::dirac(one, 1);
  EXPECT_THROW(add(a, Measure::dirac({std::sqrt(2.0), "sqrt2"}, 1)), UnitMismatch);
  EXPECT_THROW(convolve(a, Measure::dirac({1.0, "other"}, 1)), UnitMismatch);
  EXPECT_THROW(add(a, Measure::dirac({2.0, "1"}, 1)), UnitMismatch);
}

TEST(Measure, DiracTranslation) {
  const Measure c = convolve(Measure::dirac(one, 1), Measure::dirac(one, 2));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.weight(3), complex(1.0));
  const Measure mu(one, {{-2, {1, 1}}, {4, 0.25}});
  EXPECT_TRUE(same_atoms(convolve(mu, Measure::dirac(one, 0)), mu));
}

TEST(Measure, ConvolutionMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    CounterStream rng(11, s);
    // alternate small spans (dense path) and a huge span (sparse path)
    const int span = s % 2 ? 10 : 1000000;
    const Measure a = random_measure(rng, one, 12, span), b = random_measure(rng, one, 12, span);
    const Measure c = convolve(a, b);
    const auto want = brute_convolve(a, b);
    std::size_t nonzero = 0;
    for (const auto& [j, w] : want) {
      EXPECT_NEAR(std::abs(c.weight(j) - w), 0.0, 1e-14);
      nonzero += std::abs(w) > kPruneThreshold;
    }
    EXPECT_EQ(c.size(), nonzero);
  }
}

TEST(Measure, RandomLawsHold) {
  const SweepReport r = measure_algebra_sweep(100, 7);
  for (const auto& p : r.properties) EXPECT_TRUE(p.pass()) << p.name << " worst " << p.worst;
}

TEST(Measure, FourierTransform) {
  for (double u : {-3.0, 0.0, 0.7, 12.0}) {
    EXPECT_NEAR(std::abs(fourier(Measure::dirac(one, 0), u) - 1.0), 0.0, 1e-15);
    const Measure cs(LatticeUnit{0.3, "0.3"}, {{1, 0.5}, {-1, 0.5}});
    EXPECT_NEAR(std::abs(fourier(cs, u) - std::cos(0.3 * u)), 0.0, 1e-15);
  }
  const Measure mu(one, {{-2, {1, 1}}, {4, 0.25}});
  EXPECT_NEAR(std::abs(fourier(mu, 0.0) - total_mass(mu)), 0.0, 1e-15);
}

TEST(Measure, Moments) {
  const LatticeUnit s{1.7, "1.7"};
  const Measure cs(s, {{1, 0.5}, {-1, 0.5}});
  EXPECT_EQ(moment(Measure::dirac(one, 0), 1), complex{});
  EXPECT_NEAR(std::abs(moment(cs, 1)), 0.0, 1e-15);
  EXPECT_NEAR(moment(cs, 2).real(), 1.7 * 1.7, 1e-14);
}

TEST(MeasureExp, ZeroAndScalar) {
  const Measure e0 = exp_measure(Measure(one), 1e-15).measure;
  ASSERT_EQ(e0.size(), 1u);
  EXPECT_EQ(e0.weight(0), complex(1.0));
  const complex z{0.3, -1.2};
  const Measure ez = exp_measure(Measure::dirac(one, 0, z), 1e-15).measure;
  EXPECT_NEAR(std::abs(ez.weight(0) - std::exp(z)), 0.0, 1e-14);
}

TEST(MeasureExp, TotalMassAndSecondMoment) {
  const Measure e = exp_measure(two_point(0.5, 0.5), 1e-15).measure;
  EXPECT_NEAR(total_mass(e).real(), 2.718281828, 1e-9);
  // integral v dmu = 0, integral v^2 dmu = 1
  EXPECT_NEAR(moment(e, 2).real(), std::exp(1.0), 1e-12);
  // term by term: mu^{*m} is a probability with second moment m
  double series = 0.0;
  for (int m = 0; m <= 30; ++m) series += m / factorial(m);
  EXPECT_NEAR(moment(e, 2).real(), series, 1e-12);
}

TEST(MeasureExp, CoshWeightsAreModifiedBessel) {
  // exp(x (d_1 + d_-1)/2) has weight I_j(x) at index j
  for (double x : {0.3, 1.0, 2.5}) {
    const Measure e = exp_measure(two_point(0.5 * x, 0.5 * x), 1e-16).measure;
    for (int j = -6; j <= 6; ++j)
      EXPECT_NEAR(e.weight(j).real(), std::cyl_bessel_i(std::abs(j), x), 1e-14) << "x=" << x << " j=" << j;
  }
}

TEST(MeasureExp, SineWeightsAreRotatedModifiedBessel) {
  // exp(b (d_1 - d_-1)/(2i)) has transform e^{b sin x} and weight (-i)^j I_|j|(b)
  const double b = 1.3;
  const complex w = b / complex{0, 2};
  const Measure e = exp_measure(Measure(one, {{1, w}, {-1, -w}}), 1e-16).measure;
  for (int j = -6; j <= 6; ++j) {
    const complex phase = std::pow(complex{0, -1}, j);
    const double expect_mag = std::cyl_bessel_i(std::abs(j), b);
    EXPECT_NEAR(std::abs(e.weight(j)), expect_mag, 1e-14);
    EXPECT_NEAR(std::abs(e.weight(j) - phase * expect_mag), 0.0, 1e-14) << j;
  }
  for (double x : {-2.0, 0.4, 3.0}) EXPECT_NEAR(std::abs(fourier(e, x) - std::exp(b * std::sin(x))), 0.0, 1e-13);
}

TEST(MeasureExp, EvenOddSplit) {
  const Measure mu(one, {{1, complex(0.4, 0.2)}, {-1, complex(-0.4, -0.2)}});
  const ExpSeries s = exp_series(mu, 1e-15);
  for (const auto& [j, w] : s.even.atoms()) EXPECT_EQ(j % 2, 0);
  for (const auto& [j, w] : s.odd.atoms()) EXPECT_NE(j % 2, 0);
  EXPECT_LT(tv_norm(subtract(add(s.even, s.odd), exp_measure(mu, 1e-15).measure)), 1e-15);
  // |exp| = |cosh| + |sinh| on disjoint supports
  EXPECT_NEAR(tv_norm(exp_measure(mu, 1e-15).measure), tv_norm(s.even) + tv_norm(s.odd), 1e-14);
}

TEST(MeasureExp, PrintedThirdIdentityNeedsCentredMeasure) {
  // (m2 + m1^2) e^{m0} holds in general; with 2|m1|^2 it holds only when m1 = 0
  const Measure mu(one, {{1, 0.4}, {2, 0.3}});
  const Measure e = exp_measure(mu, 1e-16).measure;
  const complex m0 = total_mass(mu), m1 = moment(mu, 1), m2 = moment(mu, 2);
  EXPECT_NEAR(std::abs(moment(e, 2) - (m2 + m1 * m1) * std::exp(m0)), 0.0, 1e-12);
  EXPECT_GT(std::abs(moment(e, 2) - (m2 + 2.0 * std::norm(m1)) * std::exp(m0)), 0.1);
}

TEST(MeasureExp, BudgetExceeded) {
  const Measure big = Measure::dirac(one, 1, 400.0);
  EXPECT_THROW(exp_measure(big, 1e-15), BudgetExceeded);
}

TEST(MeasureExp, SeriesOrderTailBound) {
  const SeriesOrder o = exp_series_order(3.0, 1e-12);
  EXPECT_LE(o.tail_bound, 1e-12);
  // the bound dominates the true tail sum_{m > M} r^m/m!
  double tail = 0.0;
  for (int m = o.terms + 1; m < o.terms + 60; ++m) tail += std::pow(3.0, m) / factorial(m);
  EXPECT_LE(tail, o.tail_bound * (1 + 1e-12));
}

TEST(MeasureSymmetry, Classes) {
  EXPECT_EQ(symmetry_class(two_point(0.5, 0.5)), Symmetry::symmetric);
  const complex w = 1.0 / complex{0, 2};
  EXPECT_EQ(symmetry_class(Measure(one, {{1, w}, {-1, -w}})), Symmetry::antisymmetric);
  EXPECT_EQ(symmetry_class(Measure(one, {{1, 1.0}, {-1, 0.2}})), Symmetry::neither);
}

TEST(MeasureSymmetry, AbsExpOfAntisymmetricIsSymmetric) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    CounterStream rng(5, s);
    const complex z = std::polar(3.0 * rng.uniform_open_left(), 6.28 * rng.uniform_open_left());
    const auto a = static_cast<std::int64_t>(1 + s % 4);
    const Measure e = exp_measure(Measure(one, {{a, z}, {-a, -z}}), 1e-16).measure;
    EXPECT_EQ(symmetry_class(total_variation(e)), Symmetry::symmetric) << z;
    const Measure ep = exp_measure(Measure(one, {{a, z}, {-a, z}}), 1e-16).measure;
    EXPECT_EQ(symmetry_class(ep), Symmetry::symmetric);
  }
}

TEST(MeasureFold, EmptyAndDiracs) {
  const ConvolutionFold e = convolve_sequence({}, 1e-12, one);
  EXPECT_EQ(e.measure.weight(0), complex(1.0));
  std::vector<Measure> ds{Measure::dirac(one, 1), Measure::dirac(one, 2), Measure::dirac(one, 3)};
  const ConvolutionFold f = convolve_sequence(ds, 1e-12);
  EXPECT_EQ(f.measure.size(), 1u);
  EXPECT_EQ(f.measure.weight(6), complex(1.0));
  EXPECT_EQ(f.uncentred.size(), 3u);
  EXPECT_DOUBLE_EQ(f.second_moment_sum, 1.0 + 4.0 + 9.0);
}

TEST(MeasureFold, NormBoundedByProduct) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    CounterStream rng(9, s);
    std::vector<Measure> ms;
    for (int i = 0; i < 5; ++i) ms.push_back(random_measure(rng, one, 5, 6));
    const ConvolutionFold f = convolve_sequence(ms, 1e-12);
    EXPECT_LE(tv_norm(f.measure), f.tv_product * (1 + 1e-12));
  }
}

TEST(MeasureDomination, Atomwise) {
  const Measure a(one, {{0, complex(0.3, 0.4)}}), b(one, {{0, 0.5}, {1, 1.0}});
  EXPECT_TRUE(atomwise_dominated(a, b, 1e-15));
  EXPECT_FALSE(atomwise_dominated(b, a, 1e-15));
}
