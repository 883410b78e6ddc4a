#pragma once

#include "hetassoc/kde.hpp"
#include "hetassoc/panel.hpp"

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace hetassoc {

//! How the log-density truncation threshold a is chosen. Only one rule
//! exists today: a = 1 / n_fit.
enum class TruncationRule
{
  inverse_fit_size
};

[[nodiscard]] TruncationRule truncation_rule_from_name(std::string_view name);
[[nodiscard]] std::string_view to_string(TruncationRule rule);

//! Fraction of truncated eval points above which an estimate is flagged.
inline constexpr double truncation_warning_fraction = 0.05;

/**
 * Splitting-data entropy estimate (nats). value = -mean(log_density) over
 * the eval points whose fitted density exceeds the threshold; the retained
 * points keep their positions in the eval set so that several estimates
 * over the same time grid can be aligned.
 */
struct EntropyEstimate
{
  double value = 0.0;
  std::vector<double> log_density;
  std::vector<std::size_t> retained_index;
  std::size_t truncated_count = 0;
  std::size_t eval_count = 0;
  std::size_t fit_count = 0;
  std::array<double, 2> bandwidths{0.0, 0.0};
  std::size_t dimension = 1;
  double threshold = 0.0;

  double truncated_fraction() const
  {
    return eval_count == 0 ? 0.0
                           : static_cast<double>(truncated_count) / static_cast<double>(eval_count);
  }
  bool truncation_warning() const { return truncated_fraction() > truncation_warning_fraction; }
  bool nonpositive() const { return value <= 0.0; }
};

[[nodiscard]] double truncation_threshold(std::size_t fit_count,
                                          TruncationRule rule = TruncationRule::inverse_fit_size);

[[nodiscard]] EntropyEstimate estimate_marginal_entropy(
  const SplitPair& split,
  const KernelSpec& kernel,
  double h,
  TruncationRule rule = TruncationRule::inverse_fit_size);

//! Joint entropy of (i, j) from the product-kernel density. Throws
//! degenerate_joint when both splits hold identical data.
[[nodiscard]] EntropyEstimate estimate_joint_entropy(
  const SplitPair& split_i,
  const SplitPair& split_j,
  const KernelSpec& kernel,
  double h_i,
  double h_j,
  TruncationRule rule = TruncationRule::inverse_fit_size);

//! H_i + H_j - H_ij.
[[nodiscard]] double estimate_mutual_information(const EntropyEstimate& h_i,
                                                 const EntropyEstimate& h_j,
                                                 const EntropyEstimate& h_ij);

//! Plug-in covariance of (log f_i, log f_j, log f_ij) over the eval points
//! retained by all three estimates (order i, j, ij).
struct MomentTable
{
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  //! means of the log densities over the jointly retained points
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  std::size_t sample_count = 0;
  std::size_t max_lag = 0;
  //! True when negative eigenvalues of a long-run table were clipped.
  bool clipped = false;
};

inline constexpr std::size_t min_moment_points = 10;

/**
 * Sample moment table of the log densities. With max_lag = 0 this is the
 * plain sample covariance. With max_lag = L > 0 the lag-1..L cross
 * covariances of the eval sequence are added (Gamma_0 + sum (Gamma_l +
 * Gamma_l^T)), which is the long-run covariance of an L-dependent sequence;
 * the result is projected onto the positive semidefinite cone.
 *
 * Throws insufficient_data with fewer than 10 jointly retained points.
 */
[[nodiscard]] MomentTable log_moment_table(const EntropyEstimate& h_i,
                                           const EntropyEstimate& h_j,
                                           const EntropyEstimate& h_ij,
                                           std::size_t max_lag = 0);

} // namespace hetassoc
