#pragma once

#include "hetassoc/entropy.hpp"
#include "hetassoc/error.hpp"
#include "hetassoc/kde.hpp"
#include "hetassoc/panel.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetassoc {

//! Which moment table feeds the delta method.
enum class VarianceMode
{
  iid,      //!< plain sample covariance of the log densities
  long_run  //!< adds lag covariances up to floor(m/2) on the eval sequence
};

[[nodiscard]] VarianceMode variance_mode_from_name(std::string_view name);
[[nodiscard]] std::string_view to_string(VarianceMode mode);

struct AssociationConfig
{
  KernelSpec kernel = KernelSpec::gaussian();
  double bandwidth_constant = 1.06;
  TruncationRule truncation = TruncationRule::inverse_fit_size;
  //! Entropies at or below this floor violate the positivity assumption.
  double entropy_floor = 1e-6;
  VarianceMode variance = VarianceMode::long_run;
  std::size_t workers = 1;
};

//! Per-variable state shared by every pair involving that variable.
struct MarginalFit
{
  std::size_t index = 0;
  std::string label;
  SplitPair split;
  double bandwidth = 0.0;
  EntropyEstimate entropy;
};

[[nodiscard]] MarginalFit fit_marginal_entropy(const PanelSeries& panel,
                                               std::size_t column,
                                               const AssociationConfig& config);

/**
 * Directed association between i and j. r_ij measures how important j is
 * to i (mutual information relative to H_i). Raw values are kept as
 * estimated; the clamped companions are min(max(r, 0), 1).
 */
struct AssociationResult
{
  std::size_t index_i = 0;
  std::size_t index_j = 0;
  std::string label_i;
  std::string label_j;

  double r_ij = 0.0;
  double r_ji = 0.0;
  double r_ij_clamped = 0.0;
  double r_ji_clamped = 0.0;
  std::array<bool, 2> clamped{false, false};
  double mutual_information = 0.0;
  double d_ij = 0.0;

  //! (H_i, H_j, H_ij) averaged over the eval points retained by all three
  //! estimates, so that truncation cannot break the cancellation in H_j - H_ij
  std::array<double, 3> entropies{0.0, 0.0, 0.0};
  //! stand-alone marginal estimates, each over its own retained points
  std::array<double, 2> marginal_entropies{0.0, 0.0};
  //! covariance ordered like `entropies`
  MomentTable moments;
  std::array<double, 2> bandwidths{0.0, 0.0};
  std::size_t eval_count = 0;
  //! truncated eval points for (i, j, ij)
  std::array<std::size_t, 3> truncated{0, 0, 0};
  bool truncation_warning = false;

  //! Same pair seen from j: roles of i and j swapped, d negated exactly.
  [[nodiscard]] AssociationResult transposed() const;
};

//! Builds a result from already fitted marginals; shares their bandwidths.
[[nodiscard]] AssociationResult estimate_pair(const MarginalFit& fit_i,
                                              const MarginalFit& fit_j,
                                              std::size_t dependence_order,
                                              const AssociationConfig& config);

//! Throws validation error for i == j or unknown labels, assumption_violation
//! when H_i or H_j is at or below the entropy floor, and propagates
//! degenerate_joint.
[[nodiscard]] AssociationResult estimate_pair(const PanelSeries& panel,
                                              std::string_view label_i,
                                              std::string_view label_j,
                                              const AssociationConfig& config = {});

struct CellError
{
  ErrorCode code = ErrorCode::estimation_failure;
  std::string message;
};

struct MatrixCell
{
  enum class Status
  {
    diagonal,
    estimated,
    failed
  };

  Status status = Status::diagonal;
  //! r for the cell; 1 on the diagonal by convention
  double r = 1.0;
  std::optional<AssociationResult> result;
  std::optional<CellError> error;

  bool conventional() const { return status == Status::diagonal; }
};

//! Full N x N directed association matrix. Each unordered pair is estimated
//! once; cell(i, j) and cell(j, i) are two views of the same estimate.
class AssociationMatrix
{
public:
  AssociationMatrix(std::vector<std::string> labels,
                    std::vector<std::optional<AssociationResult>> pairs,
                    std::vector<std::optional<CellError>> errors,
                    std::size_t joint_fits);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t joint_fit_count() const { return joint_fits_; }
  std::size_t failed_pair_count() const;

  //! Direct estimate for the ordered cell (row i, column j): r = r_ij.
  [[nodiscard]] MatrixCell cell(std::size_t i, std::size_t j) const;

private:
  std::size_t pair_slot(std::size_t i, std::size_t j) const;

  std::vector<std::string> labels_;
  // upper triangle, row-major, i < j
  std::vector<std::optional<AssociationResult>> pairs_;
  std::vector<std::optional<CellError>> errors_;
  std::size_t joint_fits_ = 0;
};

//! Estimates every pair. Marginals are fitted once up front; unordered pairs
//! are spread over config.workers threads. Failures are recorded per cell.
[[nodiscard]] AssociationMatrix estimate_matrix(const PanelSeries& panel,
                                                const AssociationConfig& config = {});

} // namespace hetassoc
