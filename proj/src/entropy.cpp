#include "hetassoc/entropy.hpp"

#include "hetassoc/error.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace hetassoc {

TruncationRule truncation_rule_from_name(std::string_view name)
{
  if (name == "inverse_fit_size")
    return TruncationRule::inverse_fit_size;
  throw Error(ErrorCode::configuration, "unknown truncation rule '" + std::string(name) + "'");
}

std::string_view to_string(TruncationRule rule)
{
  switch (rule) {
    case TruncationRule::inverse_fit_size: return "inverse_fit_size";
  }
  return "unknown";
}

double truncation_threshold(std::size_t fit_count, TruncationRule rule)
{
  switch (rule) {
    case TruncationRule::inverse_fit_size:
      return 1.0 / static_cast<double>(std::max<std::size_t>(fit_count, 1));
  }
  return 0.0;
}

namespace {

template<class Eval>
EntropyEstimate plug_in(std::size_t eval_count, double threshold, Eval&& density_at)
{
  EntropyEstimate est;
  est.eval_count = eval_count;
  est.threshold = threshold;
  est.log_density.reserve(eval_count);
  est.retained_index.reserve(eval_count);
  double sum = 0.0;
  for (std::size_t t = 0; t < eval_count; ++t) {
    const double f = density_at(t);
    if (f > threshold) {
      const double lf = std::log(f);
      est.log_density.push_back(lf);
      est.retained_index.push_back(t);
      sum += lf;
    } else {
      ++est.truncated_count;
    }
  }
  if (est.log_density.empty())
    throw Error(ErrorCode::estimation_failure, "every eval point fell below the truncation threshold");
  est.value = -sum / static_cast<double>(est.log_density.size());
  return est;
}

} // namespace

EntropyEstimate estimate_marginal_entropy(const SplitPair& split,
                                          const KernelSpec& kernel,
                                          double h,
                                          TruncationRule rule)
{
  if (split.eval.empty())
    throw Error(ErrorCode::insufficient_data, "entropy estimate needs eval points");
  const auto model = fit_marginal(split, kernel, h);
  auto est = plug_in(split.eval.size(), truncation_threshold(split.fit.size(), rule),
                     [&](std::size_t t) { return model.evaluate(split.eval[t]); });
  est.fit_count = split.fit.size();
  est.bandwidths = {h, 0.0};
  est.dimension = 1;
  return est;
}

EntropyEstimate estimate_joint_entropy(const SplitPair& split_i,
                                       const SplitPair& split_j,
                                       const KernelSpec& kernel,
                                       double h_i,
                                       double h_j,
                                       TruncationRule rule)
{
  if (split_i.eval.size() != split_j.eval.size() || split_i.fit.size() != split_j.fit.size())
    throw Error(ErrorCode::alignment, "joint entropy: splits come from different time grids");
  if (split_i.fit == split_j.fit && split_i.eval == split_j.eval)
    throw Error(ErrorCode::degenerate_joint,
                "joint entropy of a series with itself: the joint law is singular");
  if (split_i.eval.empty())
    throw Error(ErrorCode::insufficient_data, "entropy estimate needs eval points");
  const auto model = fit_joint(split_i, split_j, kernel, h_i, h_j);
  auto est = plug_in(split_i.eval.size(), truncation_threshold(split_i.fit.size(), rule),
                     [&](std::size_t t) { return model.evaluate(split_i.eval[t], split_j.eval[t]); });
  est.fit_count = split_i.fit.size();
  est.bandwidths = {h_i, h_j};
  est.dimension = 2;
  return est;
}

double estimate_mutual_information(const EntropyEstimate& h_i,
                                   const EntropyEstimate& h_j,
                                   const EntropyEstimate& h_ij)
{
  return h_i.value + h_j.value - h_ij.value;
}

MomentTable log_moment_table(const EntropyEstimate& h_i,
                             const EntropyEstimate& h_j,
                             const EntropyEstimate& h_ij,
                             std::size_t max_lag)
{
  const std::size_t n_eval = h_ij.eval_count;
  if (h_i.eval_count != n_eval || h_j.eval_count != n_eval)
    throw Error(ErrorCode::alignment, "moment table: estimates use different eval sets");

  // per eval index: position in each estimate's retained sequence, or npos
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::array<const EntropyEstimate*, 3> parts{&h_i, &h_j, &h_ij};
  std::array<std::vector<std::size_t>, 3> where;
  for (std::size_t p = 0; p < 3; ++p) {
    where[p].assign(n_eval, npos);
    const auto& idx = parts[p]->retained_index;
    for (std::size_t k = 0; k < idx.size(); ++k)
      where[p][idx[k]] = k;
  }

  std::vector<bool> kept(n_eval, false);
  std::vector<Eigen::Vector3d> value(n_eval, Eigen::Vector3d::Zero());
  std::size_t count = 0;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (std::size_t t = 0; t < n_eval; ++t) {
    if (where[0][t] == npos || where[1][t] == npos || where[2][t] == npos)
      continue;
    kept[t] = true;
    for (std::size_t p = 0; p < 3; ++p)
      value[t][p] = parts[p]->log_density[where[p][t]];
    sum += value[t];
    ++count;
  }
  if (count < min_moment_points) {
    throw Error(ErrorCode::insufficient_data,
                "moment table: only " + std::to_string(count) + " jointly retained eval points");
  }

  const Eigen::Vector3d mu = sum / static_cast<double>(count);
  Eigen::Matrix3d gamma0 = Eigen::Matrix3d::Zero();
  for (std::size_t t = 0; t < n_eval; ++t) {
    if (kept[t]) {
      const Eigen::Vector3d c = value[t] - mu;
      gamma0 += c * c.transpose();
    }
  }

  MomentTable table;
  table.mean = mu;
  table.sample_count = count;
  table.max_lag = max_lag;
  table.covariance = gamma0 / static_cast<double>(count - 1);
  if (max_lag == 0)
    return table;

  Eigen::Matrix3d lagged = Eigen::Matrix3d::Zero();
  for (std::size_t lag = 1; lag <= max_lag && lag < n_eval; ++lag) {
    Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();
    for (std::size_t t = 0; t + lag < n_eval; ++t) {
      if (kept[t] && kept[t + lag])
        gamma += (value[t] - mu) * (value[t + lag] - mu).transpose();
    }
    gamma /= static_cast<double>(count);
    lagged += gamma + gamma.transpose();
  }
  Eigen::Matrix3d lr = table.covariance + lagged;
  lr = 0.5 * (lr + lr.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(lr);
  Eigen::Vector3d lambda = eig.eigenvalues();
  if (lambda.minCoeff() < 0.0) {
    table.clipped = true;
    lambda = lambda.cwiseMax(0.0);
    lr = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  }
  table.covariance = lr;
  return table;
}

} // namespace hetassoc
