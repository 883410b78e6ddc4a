#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hetassoc::stats {

[[nodiscard]] double mean(std::span<const double> x);

//! Unbiased sample variance (divisor n - 1).
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double stddev(std::span<const double> x);

//! Linear-interpolation quantile (R type 7) for p in [0, 1].
[[nodiscard]] double quantile(std::span<const double> x, double p);
[[nodiscard]] double interquartile_range(std::span<const double> x);

//! Sample autocorrelation at one lag, using the full-sample mean and the
//! lag-0 autocovariance with divisor n.
[[nodiscard]] double autocorrelation(std::span<const double> x, std::size_t lag);

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_upper_tail(double z);
[[nodiscard]] double normal_quantile(double p);
[[nodiscard]] double normal_upper_quantile(double q);
[[nodiscard]] double chi_squared_quantile(double p, double dof);
[[nodiscard]] double chi_squared_upper_tail(double x, double dof);

//! One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
[[nodiscard]] double ks_statistic(std::span<const double> sample,
                                  const std::function<double(double)>& cdf);

//! Asymptotic p-value P(sqrt(n) D > t) from the Kolmogorov distribution,
//! with the usual small-sample correction t = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
[[nodiscard]] double ks_pvalue(double distance, std::size_t n);

//! Least-squares slope of y on x.
[[nodiscard]] double ols_slope(std::span<const double> x, std::span<const double> y);

} // namespace hetassoc::stats
