#include "hetassoc/error.hpp"
#include "hetassoc/panel.hpp"
#include "hetassoc/simgen.hpp"
#include "hetassoc/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace hetassoc;

namespace {

std::vector<double> col(const PanelSeries& panel, std::size_t j)
{
  const auto c = panel.column(j);
  return {c.begin(), c.end()};
}

} // namespace

TEST(MDependent, IidCaseHasNoLagOneCorrelation)
{
  const auto x = gen_m_dependent_gaussian(0, 2000, 1);
  EXPECT_LE(std::abs(stats::autocorrelation(x, 1)), 3.0 / std::sqrt(2000.0));
}

TEST(MDependent, CorrelationVanishesBeyondOrder)
{
  const auto x = gen_m_dependent_gaussian(5, 2000, 2);
  for (std::size_t lag = 6; lag <= 10; ++lag)
    EXPECT_LE(std::abs(stats::autocorrelation(x, lag)), 3.0 / std::sqrt(2000.0)) << lag;
  EXPECT_NEAR(stats::autocorrelation(x, 1), 5.0 / 6.0, 0.05);
}

TEST(MDependent, UnitVarianceAndNormalMarginal)
{
  const auto x = gen_m_dependent_gaussian(5, 20000, 3);
  EXPECT_NEAR(stats::mean(x), 0.0, 0.05);
  EXPECT_NEAR(stats::variance(x), 1.0, 0.05);
}

TEST(MDependent, SizeError)
{
  try {
    (void)gen_m_dependent_gaussian(5, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::size);
  }
}

TEST(MDependent, Deterministic)
{
  const auto a = gen_m_dependent_gaussian(3, 500, 99);
  const auto b = gen_m_dependent_gaussian(3, 500, 99);
  const auto c = gen_m_dependent_gaussian(3, 500, 100);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(MDependent, MarginalPassesKolmogorovSmirnov)
{
  // the KS critical value assumes independent draws; every (m+1)-th value of
  // an m-dependent series is an independent sample of the same marginal
  auto cdf = [](double z) { return stats::normal_cdf(z); };
  for (std::size_t m : {0u, 2u, 5u}) {
    int passes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto x = gen_m_dependent_gaussian(m, 2000, derive_seed(40 + m, seed));
      std::vector<double> thinned;
      for (std::size_t t = 0; t < x.size(); t += m + 1)
        thinned.push_back(x[t]);
      if (stats::ks_pvalue(stats::ks_statistic(thinned, cdf), thinned.size()) > 0.01)
        ++passes;
    }
    EXPECT_GE(passes, 95) << "m = " << m;
  }
}

TEST(MDependent, RejectionHookRedrawsMarkedValues)
{
  Rng rng(5);
  const auto x = gen_m_dependent_gaussian(2, 3000, rng, [](double v) { return v < -1.0; });
  EXPECT_GE(*std::min_element(x.begin(), x.end()), -1.0);
}

TEST(Experiment1, PriceStructure)
{
  const auto panel = gen_experiment1(2000, 11);
  EXPECT_EQ(panel.label(0), "P1");
  EXPECT_EQ(panel.label(1), "P2");
  const auto p1 = col(panel, 0);
  const auto p2 = col(panel, 1);
  const double ratio = stats::variance(p2) / stats::variance(p1);
  EXPECT_GE(ratio, 14.0);
  EXPECT_LE(ratio, 18.0);
  EXPECT_NEAR(stats::mean(p1), 3.25, 0.05);
  EXPECT_GT(*std::min_element(p2.begin(), p2.end()), 0.0);
  for (std::size_t t = 0; t < p1.size(); ++t)
    ASSERT_EQ(p1[t], 3.0 + p2[t] / 4.0);
}

TEST(Experiment1, TruncatedNormalMap)
{
  EXPECT_NEAR(price_from_standard_normal(0.0), 1.0 + 0.5 * stats::normal_quantile(1.0 - 0.5 * stats::normal_cdf(2.0)), 1e-12);
  double previous = 0.0;
  for (double g = -8.0; g <= 8.0; g += 0.25) {
    const double p = price_from_standard_normal(g);
    ASSERT_GT(p, previous);
    previous = p;
  }
}

TEST(Experiment2, TransformColumns)
{
  const auto sq = gen_experiment2(2000, 12, Transform::square);
  const auto s = col(sq, 1);
  EXPECT_GE(*std::min_element(s.begin(), s.end()), 0.0);
  EXPECT_EQ(sq.label(1), "X4");

  const auto ex = gen_experiment2(2000, 13, Transform::exp);
  for (std::size_t t = 0; t < ex.time_points(); ++t)
    ASSERT_EQ(ex.at(t, 1), std::exp(ex.at(t, 0)));

  const auto inv = gen_experiment2(2000, 14, Transform::inv);
  double biggest = 0.0;
  for (std::size_t t = 0; t < inv.time_points(); ++t) {
    ASSERT_GE(std::abs(inv.at(t, 0)), pole_dead_zone);
    biggest = std::max(biggest, std::abs(inv.at(t, 1)));
  }
  EXPECT_GT(biggest, 100.0);
}

TEST(Experiment2, UnknownTransform)
{
  try {
    (void)transform_from_name("log");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::configuration);
  }
  for (auto t : {Transform::inv, Transform::exp, Transform::square, Transform::inv_square, Transform::xexp})
    EXPECT_EQ(transform_from_name(to_string(t)), t);
}

TEST(GaussianPanel, CommonFactorCorrelation)
{
  const auto panel = gen_gaussian_panel(5, 20000, 15, 3, 0.8);
  const auto a = col(panel, 0);
  const auto b = col(panel, 2);
  const double ma = stats::mean(a);
  const double mb = stats::mean(b);
  double cov = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    cov += (a[t] - ma) * (b[t] - mb);
  cov /= static_cast<double>(a.size() - 1);
  EXPECT_NEAR(cov / std::sqrt(stats::variance(a) * stats::variance(b)), 0.8, 0.03);
  EXPECT_THROW((void)gen_gaussian_panel(5, 100, 1, 2, 1.0), Error);
}

TEST(Generate, SpecDispatchIsBitReproducible)
{
  ProcessSpec spec;
  spec.T = 300;
  spec.seed = 77;
  for (auto base : {ProcessBase::gaussian_ma, ProcessBase::price_equilibrium, ProcessBase::transform_suite}) {
    spec.base = base;
    std::ostringstream a;
    std::ostringstream b;
    write_panel(a, generate(spec));
    write_panel(b, generate(spec));
    EXPECT_EQ(a.str(), b.str()) << to_string(base);
    EXPECT_EQ(process_base_from_name(to_string(base)), base);
  }
  spec.base = ProcessBase::transform_suite;
  spec.params["transform"] = 2;
  EXPECT_EQ(generate(spec).label(1), "X4");
}
