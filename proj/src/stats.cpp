#include "hetassoc/stats.hpp"

#include "hetassoc/error.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

namespace hetassoc::stats {

double mean(std::span<const double> x)
{
  if (x.empty())
    throw Error(ErrorCode::insufficient_data, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
  if (x.size() < 2)
    throw Error(ErrorCode::insufficient_data, "variance needs at least two values");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x)
    ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x)
{
  return std::sqrt(variance(x));
}

double quantile(std::span<const double> x, double p)
{
  if (x.empty())
    throw Error(ErrorCode::insufficient_data, "quantile of empty sample");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double interquartile_range(std::span<const double> x)
{
  return quantile(x, 0.75) - quantile(x, 0.25);
}

double autocorrelation(std::span<const double> x, std::size_t lag)
{
  if (lag >= x.size())
    throw Error(ErrorCode::insufficient_data, "autocorrelation lag exceeds sample length");
  const double mu = mean(x);
  double c0 = 0.0;
  double cl = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    c0 += (x[t] - mu) * (x[t] - mu);
    if (t + lag < x.size())
      cl += (x[t] - mu) * (x[t + lag] - mu);
  }
  if (c0 == 0.0)
    throw Error(ErrorCode::degenerate_data, "autocorrelation of a constant series");
  return cl / c0;
}

namespace {
const boost::math::normal standard_normal{0.0, 1.0};
}

double normal_cdf(double z)
{
  return boost::math::cdf(standard_normal, z);
}

double normal_upper_tail(double z)
{
  return boost::math::cdf(boost::math::complement(standard_normal, z));
}

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::domain, "normal quantile needs p in (0,1)");
  return boost::math::quantile(standard_normal, p);
}

double normal_upper_quantile(double q)
{
  if (!(q > 0.0 && q < 1.0))
    throw Error(ErrorCode::domain, "normal quantile needs q in (0,1)");
  return boost::math::quantile(boost::math::complement(standard_normal, q));
}

double chi_squared_quantile(double p, double dof)
{
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::domain, "chi-squared quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::chi_squared(dof), p);
}

double chi_squared_upper_tail(double x, double dof)
{
  if (x <= 0.0)
    return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf)
{
  if (sample.empty())
    throw Error(ErrorCode::insufficient_data, "KS statistic of empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(sorted[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

double ks_pvalue(double distance, std::size_t n)
{
  const double rn = std::sqrt(static_cast<double>(n));
  const double t = (rn + 0.12 + 0.11 / rn) * distance;
  if (t < 0.2)
    return 1.0;
  // Q_KS(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2)
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ols_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::insufficient_data, "slope needs two or more paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0)
    throw Error(ErrorCode::division, "slope with constant regressor");
  return sxy / sxx;
}

} // namespace hetassoc::stats
