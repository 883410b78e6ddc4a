#pragma once

#include "hetassoc/panel.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetassoc {

enum class KernelFamily
{
  gaussian,
  epanechnikov
};

//! Symmetric univariate kernel K with its moment constants.
struct KernelSpec
{
  KernelFamily family = KernelFamily::gaussian;
  double second_moment = 1.0; //!< kappa_2 = int v^2 K(v) dv
  double squared_norm = 0.0;  //!< int K(v)^2 dv
  double support_radius = 0.0; //!< K(v) treated as 0 for |v| > radius

  static KernelSpec gaussian();
  static KernelSpec epanechnikov();
  static KernelSpec from_name(std::string_view name);

  std::string_view name() const;
  double operator()(double v) const;

  //! Factor turning a standard-deviation-scale bandwidth into this
  //! kernel's own scale, 1 / sqrt(kappa_2).
  double canonical_scale() const;
};

/**
 * Rule-of-thumb bandwidth h = c * s * n^(-1/3), with
 * s = min(sample sd, IQR / 1.349) (falls back to sd when the IQR is 0).
 * The n^(-1/3) rate keeps n h^2 -> infinity and sqrt(n) h^2 -> 0.
 *
 * Throws size error for n < 4 and degenerate_data for zero dispersion.
 */
[[nodiscard]] double select_bandwidth(std::span<const double> fit_sample, double constant = 1.06);

//! Product-kernel density estimate in one or two dimensions, fitted on a
//! fixed set of points. Immutable and safe to evaluate concurrently.
class DensityModel
{
public:
  //! Univariate fit.
  DensityModel(std::span<const double> points, const KernelSpec& kernel, double bandwidth);
  //! Bivariate product-kernel fit; both coordinate spans must have equal length.
  DensityModel(std::span<const double> first,
               std::span<const double> second,
               const KernelSpec& kernel,
               double first_bandwidth,
               double second_bandwidth);

  std::size_t dimension() const { return dimension_; }
  std::size_t fit_size() const { return first_.size(); }
  const KernelSpec& kernel() const { return kernel_; }
  std::array<double, 2> bandwidths() const { return bandwidths_; }
  //! Smallest and largest fit coordinate along an axis (0 or 1).
  std::array<double, 2> range(std::size_t axis) const;
  //! Fit coordinates along an axis, in the model's sorted order.
  std::span<const double> coordinates(std::size_t axis) const;

  double evaluate(double x) const;
  double evaluate(double x, double y) const;

private:
  std::pair<std::size_t, std::size_t> window(double x) const;

  std::size_t dimension_;
  KernelSpec kernel_;
  std::array<double, 2> bandwidths_{0.0, 0.0};
  // fit points sorted by the first coordinate; second_ follows the same order
  std::vector<double> first_;
  std::vector<double> second_;
};

[[nodiscard]] DensityModel fit_marginal(const SplitPair& split, const KernelSpec& kernel, double h);

[[nodiscard]] DensityModel fit_joint(const SplitPair& split_i,
                                     const SplitPair& split_j,
                                     const KernelSpec& kernel,
                                     double h_i,
                                     double h_j);

//! Midpoint-rule integral of a fitted density over the cells lying within
//! `margin` bandwidths of some fit point (capped at the kernel support).
//! Cells are 1/`resolution` of a bandwidth per axis; 0 picks a default
//! by kernel and dimension.
[[nodiscard]] double integrate_density(const DensityModel& model,
                                       double margin = 5.0,
                                       std::size_t resolution = 0);

} // namespace hetassoc
