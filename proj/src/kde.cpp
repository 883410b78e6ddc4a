#include "hetassoc/kde.hpp"

#include "hetassoc/error.hpp"
#include "hetassoc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hetassoc {

KernelSpec KernelSpec::gaussian()
{
  // exp(-v^2/2) < 3e-18 beyond |v| = 9, far below any truncation threshold
  return KernelSpec{KernelFamily::gaussian, 1.0, 0.5 / std::sqrt(std::numbers::pi), 9.0};
}

KernelSpec KernelSpec::epanechnikov()
{
  return KernelSpec{KernelFamily::epanechnikov, 0.2, 0.6, 1.0};
}

KernelSpec KernelSpec::from_name(std::string_view name)
{
  if (name == "gaussian")
    return gaussian();
  if (name == "epanechnikov")
    return epanechnikov();
  throw Error(ErrorCode::configuration, "unknown kernel '" + std::string(name) + "'");
}

std::string_view KernelSpec::name() const
{
  return family == KernelFamily::gaussian ? "gaussian" : "epanechnikov";
}

double KernelSpec::operator()(double v) const
{
  switch (family) {
    case KernelFamily::gaussian:
      return std::exp(-0.5 * v * v) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
    case KernelFamily::epanechnikov:
      return std::abs(v) <= 1.0 ? 0.75 * (1.0 - v * v) : 0.0;
  }
  return 0.0;
}

double KernelSpec::canonical_scale() const
{
  return 1.0 / std::sqrt(second_moment);
}

double select_bandwidth(std::span<const double> fit_sample, double constant)
{
  if (!(constant > 0.0))
    throw Error(ErrorCode::configuration, "bandwidth constant must be positive");
  if (fit_sample.size() < 4)
    throw Error(ErrorCode::size, "bandwidth selection needs at least 4 points");
  const double sd = stats::stddev(fit_sample);
  const double iqr = stats::interquartile_range(fit_sample) / 1.349;
  const double scale = iqr > 0.0 ? std::min(sd, iqr) : sd;
  if (!(scale > 0.0))
    throw Error(ErrorCode::degenerate_data, "zero dispersion: cannot select a bandwidth");
  return constant * scale * std::pow(static_cast<double>(fit_sample.size()), -1.0 / 3.0);
}

namespace {

void check_points(std::span<const double> points)
{
  if (points.empty())
    throw Error(ErrorCode::insufficient_data, "density fit needs at least one point");
  for (double v : points) {
    if (!std::isfinite(v))
      throw Error(ErrorCode::validation, "density fit point is not finite");
  }
}

void check_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::domain, "bandwidth must be positive and finite");
}

} // namespace

DensityModel::DensityModel(std::span<const double> points, const KernelSpec& kernel, double bandwidth)
  : dimension_(1)
  , kernel_(kernel)
  , bandwidths_{bandwidth, 0.0}
  , first_(points.begin(), points.end())
{
  check_points(points);
  check_bandwidth(bandwidth);
  std::sort(first_.begin(), first_.end());
}

DensityModel::DensityModel(std::span<const double> first,
                           std::span<const double> second,
                           const KernelSpec& kernel,
                           double first_bandwidth,
                           double second_bandwidth)
  : dimension_(2)
  , kernel_(kernel)
  , bandwidths_{first_bandwidth, second_bandwidth}
{
  if (first.size() != second.size())
    throw Error(ErrorCode::alignment, "joint fit coordinates have different lengths");
  check_points(first);
  check_points(second);
  check_bandwidth(first_bandwidth);
  check_bandwidth(second_bandwidth);

  std::vector<std::size_t> order(first.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
  first_.reserve(first.size());
  second_.reserve(second.size());
  for (auto k : order) {
    first_.push_back(first[k]);
    second_.push_back(second[k]);
  }
}

std::array<double, 2> DensityModel::range(std::size_t axis) const
{
  const auto& v = axis == 0 ? first_ : second_;
  if (v.empty())
    throw Error(ErrorCode::domain, "density model has no axis " + std::to_string(axis));
  if (axis == 0)
    return {v.front(), v.back()};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

std::span<const double> DensityModel::coordinates(std::size_t axis) const
{
  if (axis > 1 || (axis == 1 && dimension_ == 1))
    throw Error(ErrorCode::domain, "density model has no axis " + std::to_string(axis));
  return axis == 0 ? std::span<const double>(first_) : std::span<const double>(second_);
}

std::pair<std::size_t, std::size_t> DensityModel::window(double x) const
{
  const double reach = kernel_.support_radius * bandwidths_[0];
  const auto lo = std::lower_bound(first_.begin(), first_.end(), x - reach);
  const auto hi = std::upper_bound(lo, first_.end(), x + reach);
  return {static_cast<std::size_t>(lo - first_.begin()), static_cast<std::size_t>(hi - first_.begin())};
}

double DensityModel::evaluate(double x) const
{
  if (dimension_ != 1)
    throw Error(ErrorCode::domain, "univariate evaluation of a bivariate density");
  const double h = bandwidths_[0];
  const auto [lo, hi] = window(x);
  double sum = 0.0;
  for (std::size_t k = lo; k < hi; ++k)
    sum += kernel_((first_[k] - x) / h);
  return sum / (static_cast<double>(first_.size()) * h);
}

double DensityModel::evaluate(double x, double y) const
{
  if (dimension_ != 2)
    throw Error(ErrorCode::domain, "bivariate evaluation of a univariate density");
  const double hx = bandwidths_[0];
  const double hy = bandwidths_[1];
  const double reach_y = kernel_.support_radius;
  const auto [lo, hi] = window(x);
  double sum = 0.0;
  for (std::size_t k = lo; k < hi; ++k) {
    const double vy = (second_[k] - y) / hy;
    if (std::abs(vy) > reach_y)
      continue;
    sum += kernel_((first_[k] - x) / hx) * kernel_(vy);
  }
  return sum / (static_cast<double>(first_.size()) * hx * hy);
}

DensityModel fit_marginal(const SplitPair& split, const KernelSpec& kernel, double h)
{
  return DensityModel(split.fit, kernel, h);
}

DensityModel fit_joint(const SplitPair& split_i,
                       const SplitPair& split_j,
                       const KernelSpec& kernel,
                       double h_i,
                       double h_j)
{
  if (split_i.fit.size() != split_j.fit.size() || split_i.eval.size() != split_j.eval.size())
    throw Error(ErrorCode::alignment, "joint fit: splits come from different time grids");
  return DensityModel(split_i.fit, split_j.fit, kernel, h_i, h_j);
}

namespace {

using CellRange = std::pair<long long, long long>;

// inclusive cell-index range covering [z - reach, z + reach]
CellRange cells_around(double z, double reach, double origin, double step)
{
  return {static_cast<long long>(std::floor((z - reach - origin) / step)),
          static_cast<long long>(std::floor((z + reach - origin) / step))};
}

std::vector<CellRange> merged(std::vector<CellRange> ranges)
{
  std::sort(ranges.begin(), ranges.end());
  std::vector<CellRange> out;
  for (const auto& r : ranges) {
    if (!out.empty() && r.first <= out.back().second + 1)
      out.back().second = std::max(out.back().second, r.second);
    else
      out.push_back(r);
  }
  return out;
}

} // namespace

double integrate_density(const DensityModel& model, double margin, std::size_t resolution)
{
  if (!(margin > 0.0))
    throw Error(ErrorCode::domain, "integration margin must be positive");
  const auto& K = model.kernel();
  if (resolution == 0) {
    // the compact kernel has kinks at the support edge, so it needs finer cells
    const bool compact = K.family == KernelFamily::epanechnikov;
    resolution = model.dimension() == 1 ? (compact ? 64 : 8) : (compact ? 24 : 4);
  }
  const auto bw = model.bandwidths();
  const double radius = std::min(margin, K.support_radius);
  const auto xs = model.coordinates(0);

  const double sx = bw[0];
  const double dx = sx / static_cast<double>(resolution);
  const double reach_x = radius * sx + dx;
  const double ox = xs.front();

  std::vector<CellRange> xr(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k)
    xr[k] = cells_around(xs[k], reach_x, ox, dx);

  double total = 0.0;
  if (model.dimension() == 1) {
    for (const auto& [a, b] : merged(xr))
      for (long long c = a; c <= b; ++c)
        total += model.evaluate(ox + (static_cast<double>(c) + 0.5) * dx);
    return total * dx;
  }

  const auto ys = model.coordinates(1);
  const double sy = bw[1];
  const double dy = sy / static_cast<double>(resolution);
  const double reach_y = radius * sy + dy;
  const double oy = *std::min_element(ys.begin(), ys.end());
  std::vector<CellRange> yr(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k)
    yr[k] = cells_around(ys[k], reach_y, oy, dy);

  // sweep the x columns; points are sorted by x so the active set is a window
  std::size_t first = 0;
  std::size_t last = 0;
  for (const auto& [a, b] : merged(xr)) {
    for (long long c = a; c <= b; ++c) {
      while (last < xr.size() && xr[last].first <= c)
        ++last;
      while (first < last && xr[first].second < c)
        ++first;
      std::vector<CellRange> column;
      for (std::size_t k = first; k < last; ++k)
        if (xr[k].second >= c)
          column.push_back(yr[k]);
      const double x = ox + (static_cast<double>(c) + 0.5) * dx;
      for (const auto& [lo, hi] : merged(std::move(column)))
        for (long long e = lo; e <= hi; ++e)
          total += model.evaluate(x, oy + (static_cast<double>(e) + 0.5) * dy);
    }
  }
  return total * dx * dy;
}

} // namespace hetassoc
