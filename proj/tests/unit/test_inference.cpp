#include "hetassoc/error.hpp"
#include "hetassoc/inference.hpp"
#include "hetassoc/rng.hpp"
#include "hetassoc/simgen.hpp"
#include "hetassoc/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace hetassoc;

namespace {

double r_of(const EntropyTriple& h)
{
  return 1.0 + (h[1] - h[2]) / h[0];
}

double d_of(const EntropyTriple& h)
{
  return (h[1] - h[2]) / h[0] - (h[0] - h[2]) / h[1];
}

template<class F>
Gradient central_difference(F f, EntropyTriple h, double step = 1e-6)
{
  Gradient g{};
  for (std::size_t k = 0; k < 3; ++k) {
    auto up = h;
    auto down = h;
    up[k] += step;
    down[k] -= step;
    g[k] = (f(up) - f(down)) / (2.0 * step);
  }
  return g;
}

// max-norm error relative to the max-norm of the analytic gradient
double relative_error(const Gradient& analytic, const Gradient& numeric)
{
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    err = std::max(err, std::abs(analytic[k] - numeric[k]));
    scale = std::max(scale, std::abs(analytic[k]));
  }
  return err / scale;
}

void expect_gradient(const Gradient& g, const Gradient& expected)
{
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(g[k], expected[k], 1e-15) << k;
}

} // namespace

TEST(Gradient, RatioValues)
{
  expect_gradient(gradient_r({1.0, 1.0, 1.5}), {0.5, 1.0, -1.0});
  expect_gradient(gradient_r({2.0, 1.0, 1.0}), {0.0, 0.5, -0.5});
  for (const EntropyTriple h : {EntropyTriple{1.0, 1.0, 1.5}, EntropyTriple{2.0, 1.0, 1.0}})
    EXPECT_LT(relative_error(gradient_r(h), central_difference(r_of, h)), 1e-6);
  const auto far = gradient_r({1e12, 1.0, 1.5});
  for (double c : far)
    EXPECT_LT(std::abs(c), 1e-11);
  try {
    (void)gradient_r({0.0, 1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::division);
  }
}

TEST(Gradient, GapValues)
{
  expect_gradient(gradient_d({1.0, 1.0, 1.5}), {-0.5, 0.5, 0.0});
  expect_gradient(gradient_d({1.0, 2.0, 2.0}), {-0.5, 0.75, -0.5});
  EXPECT_EQ(gradient_d({1.7, 1.7, 2.9})[2], 0.0);
  EXPECT_THROW((void)gradient_d({1.0, 0.0, 1.0}), Error);
}

TEST(Gradient, MatchesFiniteDifferencesOnRandomTriples)
{
  Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const EntropyTriple h{0.2 + 4.8 * rng.uniform(), 0.2 + 4.8 * rng.uniform(), 0.2 + 4.8 * rng.uniform()};
    ASSERT_LT(relative_error(gradient_r(h), central_difference(r_of, h)), 1e-6);
    ASSERT_LT(relative_error(gradient_d(h), central_difference(d_of, h)), 1e-6);
  }
}

TEST(DeltaVariance, QuadraticForms)
{
  EXPECT_DOUBLE_EQ(delta_variance({1, 0, 0}, Eigen::Matrix3d::Identity()), 1.0);
  EXPECT_DOUBLE_EQ(delta_variance({1, 1, 1}, Eigen::Matrix3d::Ones()), 9.0);
  const Eigen::Matrix3d diag = Eigen::Vector3d(0.5, 0.5, 1.0).asDiagonal();
  EXPECT_DOUBLE_EQ(delta_variance(gradient_r({1.0, 1.0, 1.5}), diag), 1.625);
}

TEST(DeltaVariance, NegativeTables)
{
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(2, 2) = -0.5;
  try {
    (void)delta_variance({0, 0, 1}, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::numeric);
  }
  // roundoff-sized negatives clip to a zero variance
  Eigen::Matrix3d tiny = Eigen::Matrix3d::Zero();
  tiny(0, 0) = -1e-14;
  EXPECT_EQ(delta_variance({1, 0, 0}, tiny), 0.0);
}

TEST(ImportanceTest, RegionAndBoundary)
{
  EXPECT_EQ(importance_test(1.0, 0.05, 0.8, 0.05).decision, Decision::fail_to_reject);

  const auto t = importance_test(0.60, 0.1, 0.8, 0.05);
  EXPECT_NEAR(t.critical_value, 0.63551, 1e-5);
  EXPECT_EQ(t.decision, Decision::reject);
  EXPECT_NEAR(t.p_value, stats::normal_cdf(-2.0), 1e-12);

  const auto at = importance_test(t.critical_value, 0.1, 0.8, 0.05);
  EXPECT_EQ(at.decision, Decision::reject);

  try {
    (void)importance_test(0.5, 0.0, 0.8, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_variance);
  }
  EXPECT_THROW((void)importance_test(0.5, 0.1, 1.0, 0.05), Error);
  EXPECT_THROW((void)importance_test(0.5, 0.1, 0.8, 0.0), Error);
}

TEST(AsymmetryTest, NullPointAndRejection)
{
  const auto zero = asymmetry_test(0.0, 0.1, 0.05, TestKind::asymmetry_chisq);
  EXPECT_EQ(zero.statistic, 0.0);
  EXPECT_NEAR(zero.critical_value, 3.8415, 1e-4);
  EXPECT_EQ(zero.decision, Decision::fail_to_reject);

  const auto normal = asymmetry_test(0.25, 0.1, 0.05, TestKind::asymmetry_normal);
  const auto chisq = asymmetry_test(0.25, 0.1, 0.05, TestKind::asymmetry_chisq);
  EXPECT_NEAR(normal.statistic, 2.5, 1e-12);
  EXPECT_NEAR(chisq.statistic, 6.25, 1e-12);
  EXPECT_NEAR(normal.p_value, 0.01242, 1e-5);
  EXPECT_NEAR(chisq.p_value, stats::chi_squared_upper_tail(6.25, 1.0), 1e-9);
  EXPECT_EQ(normal.decision, Decision::reject);
  EXPECT_EQ(chisq.decision, Decision::reject);
  EXPECT_THROW((void)asymmetry_test(0.25, 0.1, 0.05, TestKind::importance), Error);
}

TEST(AsymmetryTest, FormsAgreeOnRandomConfigurations)
{
  Rng rng(77);
  for (int k = 0; k < 1000; ++k) {
    const double d = 4.0 * rng.normal() * 0.05;
    const double se = 0.01 + 0.1 * rng.uniform();
    const double alpha = 0.001 + 0.5 * rng.uniform();
    const auto a = asymmetry_test(d, se, alpha, TestKind::asymmetry_normal);
    const auto b = asymmetry_test(d, se, alpha, TestKind::asymmetry_chisq);
    ASSERT_EQ(a.decision, b.decision);
    ASSERT_EQ(a.decision == Decision::reject, std::abs(a.statistic) > a.critical_value);
    ASSERT_NEAR(b.p_value, stats::chi_squared_upper_tail(b.statistic, 1.0), 1e-9);
  }
}

TEST(AsymmetryTest, SizeOnExchangeablePair)
{
  // strong dependence: for weakly dependent pairs d = (H_j - H_i) I / (H_i H_j)
  // has a nearly vanishing gradient and the plug-in test is conservative
  int rejections = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto panel = gen_gaussian_panel(0, 2000, derive_seed(500, r), 2, 0.8);
    const auto res = estimate_pair(panel, "X1", "X2");
    if (asymmetry_test(res, 0.05, panel.time_points()).decision == Decision::reject)
      ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  EXPECT_GE(rate, 0.02);
  EXPECT_LE(rate, 0.10);
}

TEST(StandardError, UsesHalfSampleSize)
{
  const auto panel = gen_gaussian_panel(0, 1000, 9, 2, 0.5);
  const auto res = estimate_pair(panel, "X1", "X2");
  const double s = delta_variance(gradient_r(res.entropies), res.moments.covariance);
  EXPECT_DOUBLE_EQ(standard_error_r(res, 1000), std::sqrt(s / 500.0));
  const auto t = importance_test(res, 0.9, 0.05, 1000);
  EXPECT_DOUBLE_EQ(t.standard_error, standard_error_r(res, 1000));
  EXPECT_EQ(t.decision, Decision::reject);
}

TEST(TestKinds, Names)
{
  EXPECT_EQ(test_kind_from_name("importance"), TestKind::importance);
  EXPECT_EQ(test_kind_from_name("asymmetry"), TestKind::asymmetry_normal);
  EXPECT_EQ(test_kind_from_name("asymmetry-chisq"), TestKind::asymmetry_chisq);
  EXPECT_THROW((void)test_kind_from_name("exceedance"), Error);
  EXPECT_EQ(to_string(Decision::reject), "reject");
}
