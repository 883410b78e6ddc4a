#include "hetassoc/association.hpp"

#include "hetassoc/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace hetassoc {

VarianceMode variance_mode_from_name(std::string_view name)
{
  if (name == "iid")
    return VarianceMode::iid;
  if (name == "long_run")
    return VarianceMode::long_run;
  throw Error(ErrorCode::configuration, "unknown variance mode '" + std::string(name) + "'");
}

std::string_view to_string(VarianceMode mode)
{
  return mode == VarianceMode::iid ? "iid" : "long_run";
}

MarginalFit fit_marginal_entropy(const PanelSeries& panel,
                                 std::size_t column,
                                 const AssociationConfig& config)
{
  MarginalFit fit;
  fit.index = column;
  fit.label = panel.label(column);
  fit.split = panel.split(column);
  fit.bandwidth = select_bandwidth(fit.split.fit, config.bandwidth_constant) *
                  config.kernel.canonical_scale();
  fit.entropy = estimate_marginal_entropy(fit.split, config.kernel, fit.bandwidth, config.truncation);
  return fit;
}

namespace {

double clamp_unit(double r)
{
  return std::min(std::max(r, 0.0), 1.0);
}

void check_positive_entropy(const MarginalFit& fit, double floor)
{
  if (!(fit.entropy.value > floor)) {
    throw Error(ErrorCode::assumption_violation,
                "entropy positivity assumption violated: estimated entropy of '" + fit.label + "' is " +
                  std::to_string(fit.entropy.value) + " (must exceed " + std::to_string(floor) +
                  "); the ratio r is undefined");
  }
}

} // namespace

AssociationResult estimate_pair(const MarginalFit& fit_i,
                                const MarginalFit& fit_j,
                                std::size_t dependence_order,
                                const AssociationConfig& config)
{
  if (fit_i.index == fit_j.index)
    throw Error(ErrorCode::validation, "association of '" + fit_i.label + "' with itself");
  check_positive_entropy(fit_i, config.entropy_floor);
  check_positive_entropy(fit_j, config.entropy_floor);

  const auto joint = estimate_joint_entropy(fit_i.split, fit_j.split, config.kernel, fit_i.bandwidth,
                                            fit_j.bandwidth, config.truncation);
  const std::size_t lag = config.variance == VarianceMode::long_run ? dependence_order / 2 : 0;

  AssociationResult out;
  out.index_i = fit_i.index;
  out.index_j = fit_j.index;
  out.label_i = fit_i.label;
  out.label_j = fit_j.label;

  out.moments = log_moment_table(fit_i.entropy, fit_j.entropy, joint, lag);
  const double hi = -out.moments.mean[0];
  const double hj = -out.moments.mean[1];
  const double hij = -out.moments.mean[2];
  if (!(hi > config.entropy_floor) || !(hj > config.entropy_floor)) {
    throw Error(ErrorCode::assumption_violation,
                "entropy positivity assumption violated on the jointly retained points of '" + fit_i.label +
                  "' and '" + fit_j.label + "'");
  }
  out.entropies = {hi, hj, hij};
  out.marginal_entropies = {fit_i.entropy.value, fit_j.entropy.value};
  out.mutual_information = hi + hj - hij;
  out.r_ij = 1.0 + (hj - hij) / hi;
  out.r_ji = 1.0 + (hi - hij) / hj;
  out.d_ij = out.r_ij - out.r_ji;
  out.r_ij_clamped = clamp_unit(out.r_ij);
  out.r_ji_clamped = clamp_unit(out.r_ji);
  out.clamped = {out.r_ij_clamped != out.r_ij, out.r_ji_clamped != out.r_ji};

  out.bandwidths = {fit_i.bandwidth, fit_j.bandwidth};
  out.eval_count = joint.eval_count;
  out.truncated = {fit_i.entropy.truncated_count, fit_j.entropy.truncated_count,
                   joint.truncated_count};
  out.truncation_warning =
    fit_i.entropy.truncation_warning() || fit_j.entropy.truncation_warning() || joint.truncation_warning();
  return out;
}

AssociationResult estimate_pair(const PanelSeries& panel,
                                std::string_view label_i,
                                std::string_view label_j,
                                const AssociationConfig& config)
{
  const auto i = panel.index_of(label_i);
  const auto j = panel.index_of(label_j);
  if (i == j)
    throw Error(ErrorCode::validation, "association of '" + std::string(label_i) + "' with itself");
  const auto fit_i = fit_marginal_entropy(panel, i, config);
  const auto fit_j = fit_marginal_entropy(panel, j, config);
  return estimate_pair(fit_i, fit_j, panel.dependence_order(), config);
}

AssociationResult AssociationResult::transposed() const
{
  AssociationResult t = *this;
  std::swap(t.index_i, t.index_j);
  std::swap(t.label_i, t.label_j);
  std::swap(t.r_ij, t.r_ji);
  std::swap(t.r_ij_clamped, t.r_ji_clamped);
  std::swap(t.clamped[0], t.clamped[1]);
  t.d_ij = t.r_ij - t.r_ji;
  std::swap(t.entropies[0], t.entropies[1]);
  std::swap(t.marginal_entropies[0], t.marginal_entropies[1]);
  std::swap(t.moments.mean[0], t.moments.mean[1]);
  std::swap(t.bandwidths[0], t.bandwidths[1]);
  std::swap(t.truncated[0], t.truncated[1]);
  Eigen::Matrix3d p;
  p << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  t.moments.covariance = p * moments.covariance * p;
  return t;
}

AssociationMatrix::AssociationMatrix(std::vector<std::string> labels,
                                     std::vector<std::optional<AssociationResult>> pairs,
                                     std::vector<std::optional<CellError>> errors,
                                     std::size_t joint_fits)
  : labels_(std::move(labels))
  , pairs_(std::move(pairs))
  , errors_(std::move(errors))
  , joint_fits_(joint_fits)
{
  const auto n = labels_.size();
  const auto expected = n * (n - 1) / 2;
  if (pairs_.size() != expected || errors_.size() != expected)
    throw Error(ErrorCode::validation, "association matrix: pair slot count mismatch");
}

std::size_t AssociationMatrix::pair_slot(std::size_t i, std::size_t j) const
{
  // i < j; slots for row i start after the rows above it
  const auto n = labels_.size();
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::size_t AssociationMatrix::failed_pair_count() const
{
  return static_cast<std::size_t>(
    std::count_if(errors_.begin(), errors_.end(), [](const auto& e) { return e.has_value(); }));
}

MatrixCell AssociationMatrix::cell(std::size_t i, std::size_t j) const
{
  if (i >= size() || j >= size())
    throw Error(ErrorCode::validation, "association matrix index out of range");
  MatrixCell out;
  if (i == j)
    return out;
  const auto slot = pair_slot(std::min(i, j), std::max(i, j));
  if (errors_[slot]) {
    out.status = MatrixCell::Status::failed;
    out.r = std::nan("");
    out.error = errors_[slot];
    return out;
  }
  out.status = MatrixCell::Status::estimated;
  out.result = i < j ? *pairs_[slot] : pairs_[slot]->transposed();
  out.r = out.result->r_ij;
  return out;
}

AssociationMatrix estimate_matrix(const PanelSeries& panel, const AssociationConfig& config)
{
  const auto n = panel.individuals();
  if (n < 2)
    throw Error(ErrorCode::validation, "association matrix needs at least two individuals");

  std::vector<std::optional<MarginalFit>> marginals(n);
  std::vector<std::optional<CellError>> marginal_errors(n);
  parallel_for(n, config.workers, [&](std::size_t k) {
    try {
      marginals[k] = fit_marginal_entropy(panel, k, config);
      if (!(marginals[k]->entropy.value > config.entropy_floor)) {
        marginal_errors[k] = CellError{
          ErrorCode::assumption_violation,
          "entropy positivity assumption violated: estimated entropy of '" + panel.label(k) + "' is " +
            std::to_string(marginals[k]->entropy.value)};
      }
    } catch (const Error& e) {
      marginal_errors[k] = CellError{ErrorCode::assumption_violation,
                                     "column '" + panel.label(k) + "' unusable (" +
                                       std::string(to_string(e.code())) + "): " + e.what()};
    }
  });

  struct Job
  {
    std::size_t i, j;
  };
  std::vector<Job> jobs;
  jobs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      jobs.push_back({i, j});

  std::vector<std::optional<AssociationResult>> pairs(jobs.size());
  std::vector<std::optional<CellError>> errors(jobs.size());
  std::vector<char> fitted(jobs.size(), 0);
  parallel_for(jobs.size(), config.workers, [&](std::size_t k) {
    const auto [i, j] = jobs[k];
    if (marginal_errors[i] || marginal_errors[j]) {
      errors[k] = marginal_errors[i] ? marginal_errors[i] : marginal_errors[j];
      return;
    }
    try {
      fitted[k] = 1;
      pairs[k] = estimate_pair(*marginals[i], *marginals[j], panel.dependence_order(), config);
    } catch (const Error& e) {
      errors[k] = CellError{e.code(), e.what()};
    }
  });

  const auto joint_fits = static_cast<std::size_t>(std::count(fitted.begin(), fitted.end(), 1));
  return AssociationMatrix(panel.labels(), std::move(pairs), std::move(errors), joint_fits);
}

} // namespace hetassoc
