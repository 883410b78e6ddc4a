#include "hetassoc/error.hpp"
#include "hetassoc/kde.hpp"
#include "hetassoc/rng.hpp"
#include "hetassoc/stats.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/trapezoidal.hpp>
#include <cmath>
#include <limits>
#include <numbers>

using namespace hetassoc;

namespace {

const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double sigma = 1.0)
{
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v)
    x = sigma * rng.normal();
  return v;
}

} // namespace

TEST(Kernel, MomentsByQuadrature)
{
  for (const auto& k : {KernelSpec::gaussian(), KernelSpec::epanechnikov()}) {
    const double r = std::min(k.support_radius, 12.0);
    auto integrate = [&](auto f) { return boost::math::quadrature::trapezoidal(f, -r, r, 1e-12); };
    EXPECT_NEAR(integrate([&](double v) { return k(v); }), 1.0, 1e-6) << k.name();
    EXPECT_NEAR(integrate([&](double v) { return v * k(v); }), 0.0, 1e-8) << k.name();
    EXPECT_NEAR(integrate([&](double v) { return v * v * k(v); }), k.second_moment, 1e-6) << k.name();
    EXPECT_NEAR(integrate([&](double v) { return k(v) * k(v); }), k.squared_norm, 1e-6) << k.name();
    for (double v = -3.0; v <= 3.0; v += 0.37) {
      EXPECT_GE(k(v), 0.0);
      EXPECT_DOUBLE_EQ(k(v), k(-v));
    }
  }
}

TEST(Kernel, Names)
{
  EXPECT_EQ(KernelSpec::from_name("gaussian").family, KernelFamily::gaussian);
  EXPECT_EQ(KernelSpec::from_name("epanechnikov").family, KernelFamily::epanechnikov);
  EXPECT_THROW((void)KernelSpec::from_name("box"), Error);
}

TEST(Bandwidth, RuleOfThumbValues)
{
  // a sample whose sd is below IQR/1.349 uses sd as the scale
  auto s = normal_sample(1000, 3);
  const double sd = stats::stddev(s);
  const double iqr = stats::interquartile_range(s) / 1.349;
  EXPECT_NEAR(select_bandwidth(s), 1.06 * std::min(sd, iqr) * std::pow(1000.0, -1.0 / 3.0), 1e-15);
  // exact scale 1 and 0.125 via a standardized sample
  const double m = stats::mean(s);
  for (double& x : s)
    x = (x - m) / sd;
  if (stats::interquartile_range(s) / 1.349 >= 1.0) {
    EXPECT_NEAR(select_bandwidth(s), 0.1060, 5e-5);
    for (double& x : s)
      x *= 0.125;
    EXPECT_NEAR(select_bandwidth(s), 0.01325, 5e-6);
  }
}

TEST(Bandwidth, Errors)
{
  const std::vector<double> constant(20, 4.0);
  try {
    (void)select_bandwidth(constant);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_data);
  }
  EXPECT_THROW((void)select_bandwidth(std::vector<double>{1, 2, 3}), Error);
  EXPECT_THROW((void)select_bandwidth(normal_sample(10, 1), 0.0), Error);
}

TEST(Density, SinglePointValues)
{
  const std::vector<double> zero{0.0};
  const DensityModel m1(zero, KernelSpec::gaussian(), 1.0);
  EXPECT_NEAR(m1.evaluate(0.0), phi0, 1e-15);
  const DensityModel m2(zero, zero, KernelSpec::gaussian(), 1.0, 1.0);
  EXPECT_NEAR(m2.evaluate(0.0, 0.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
}

TEST(Density, MatchesDirectSum)
{
  const auto a = normal_sample(300, 5);
  const auto b = normal_sample(300, 6);
  const auto K = KernelSpec::gaussian();
  const DensityModel m1(a, K, 0.3);
  const DensityModel m2(a, b, K, 0.3, 0.4);
  for (double x : {-2.0, -0.3, 0.0, 1.1}) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      s1 += K((a[k] - x) / 0.3);
      s2 += K((a[k] - x) / 0.3) * K((b[k] - 0.5 * x) / 0.4);
    }
    EXPECT_NEAR(m1.evaluate(x), s1 / (300 * 0.3), 1e-12);
    EXPECT_NEAR(m2.evaluate(x, 0.5 * x), s2 / (300 * 0.3 * 0.4), 1e-12);
  }
}

TEST(Density, StandardNormalAtZero)
{
  // averaged over repetitions; one replicate has sd near 0.03 at this n
  const int reps = 50;
  double marginal = 0.0;
  double joint = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto s = normal_sample(1000, derive_seed(8, r));
    const auto t = normal_sample(1000, derive_seed(9, r));
    marginal += DensityModel(s, KernelSpec::gaussian(), select_bandwidth(s)).evaluate(0.0) / reps;
    joint += DensityModel(s, t, KernelSpec::gaussian(), select_bandwidth(s), select_bandwidth(t))
               .evaluate(0.0, 0.0) /
             reps;
  }
  EXPECT_NEAR(marginal, phi0, 0.05);
  EXPECT_NEAR(joint, 1.0 / (2.0 * std::numbers::pi), 0.05);
}

TEST(Density, TailDecay)
{
  const auto s = normal_sample(500, 10);
  const double h = select_bandwidth(s);
  const DensityModel m(s, KernelSpec::gaussian(), h);
  EXPECT_LT(m.evaluate(m.range(0)[1] + 10.0 * h), 1e-8);
  const DensityModel e(s, KernelSpec::epanechnikov(), h);
  EXPECT_EQ(e.evaluate(e.range(0)[1] + 2.0 * h), 0.0);
}

TEST(Density, SelfJointGrowsOnDiagonalAsBandwidthShrinks)
{
  const auto s = normal_sample(400, 11);
  double previous = 0.0;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const DensityModel m(s, s, KernelSpec::gaussian(), h, h);
    const double v = m.evaluate(0.0, 0.0);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

TEST(Density, NormalizationAndNonNegativity)
{
  const auto s = normal_sample(800, 12);
  const auto t = normal_sample(800, 13, 0.3);
  for (const auto& K : {KernelSpec::gaussian(), KernelSpec::epanechnikov()}) {
    const double hs = select_bandwidth(s) * K.canonical_scale();
    const double ht = select_bandwidth(t) * K.canonical_scale();
    const DensityModel m1(s, K, hs);
    const DensityModel m2(s, t, K, hs, ht);
    EXPECT_NEAR(integrate_density(m1), 1.0, 1e-3) << K.name();
    EXPECT_NEAR(integrate_density(m2), 1.0, 1e-3) << K.name();
    const auto [lo, hi] = m1.range(0);
    for (int k = 0; k < 200; ++k) {
      const double x = lo - 1.0 + (hi - lo + 2.0) * k / 199.0;
      ASSERT_GE(m1.evaluate(x), 0.0);
      ASSERT_GE(m2.evaluate(x, 0.3 * x), 0.0);
    }
  }
}

TEST(Density, NormalizationWithHeavyTails)
{
  // reciprocals of normals spread over a huge range relative to the bandwidth
  auto s = normal_sample(1000, 21);
  std::vector<double> inv;
  for (double& v : s) {
    if (std::abs(v) < 1e-3)
      v = 1e-3;
    inv.push_back(12.0 / v);
  }
  for (const auto& K : {KernelSpec::gaussian(), KernelSpec::epanechnikov()}) {
    const double hs = select_bandwidth(s) * K.canonical_scale();
    const double hi = select_bandwidth(inv) * K.canonical_scale();
    EXPECT_NEAR(integrate_density(DensityModel(inv, K, hi)), 1.0, 1e-3) << K.name();
    EXPECT_NEAR(integrate_density(DensityModel(s, inv, K, hs, hi)), 1.0, 1e-3) << K.name();
  }
  EXPECT_THROW((void)integrate_density(DensityModel(s, KernelSpec::gaussian(), 0.3), 0.0), Error);
}

TEST(Density, AlignmentError)
{
  const auto s = normal_sample(10, 1);
  const auto t = normal_sample(11, 2);
  try {
    const DensityModel m(s, t, KernelSpec::gaussian(), 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::alignment);
  }
}

TEST(Density, BiasShrinksWithBandwidth)
{
  double bias_wide = 0.0;
  double bias_narrow = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto s = normal_sample(2000, derive_seed(21, r));
    bias_wide += DensityModel(s, KernelSpec::gaussian(), 0.5).evaluate(0.0) - phi0;
    bias_narrow += DensityModel(s, KernelSpec::gaussian(), 0.1).evaluate(0.0) - phi0;
  }
  EXPECT_LT(std::abs(bias_narrow / reps), std::abs(bias_wide / reps));
}

TEST(Density, VarianceFallsWithSampleSize)
{
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {250, 1000, 4000}) {
    std::vector<double> v;
    for (int r = 0; r < 200; ++r) {
      const auto s = normal_sample(n, derive_seed(31 + n, r));
      v.push_back(DensityModel(s, KernelSpec::gaussian(), select_bandwidth(s)).evaluate(0.0));
    }
    const double var = stats::variance(v);
    EXPECT_LT(var, previous) << n;
    previous = var;
  }
}
