#include "hetassoc/simgen.hpp"

#include "hetassoc/error.hpp"
#include "hetassoc/stats.hpp"

#include <array>
#include <cmath>

namespace hetassoc {

std::string_view to_string(ProcessBase base)
{
  switch (base) {
    case ProcessBase::gaussian_ma: return "gaussian_ma";
    case ProcessBase::price_equilibrium: return "price_equilibrium";
    case ProcessBase::transform_suite: return "transform_suite";
  }
  return "unknown";
}

ProcessBase process_base_from_name(std::string_view name)
{
  if (name == "gaussian_ma")
    return ProcessBase::gaussian_ma;
  if (name == "price_equilibrium")
    return ProcessBase::price_equilibrium;
  if (name == "transform_suite")
    return ProcessBase::transform_suite;
  throw Error(ErrorCode::configuration, "unknown process base '" + std::string(name) + "'");
}

namespace {

constexpr std::array<std::string_view, 5> transform_names{"inv", "exp", "square", "inv_square", "xexp"};
constexpr std::array<std::string_view, 5> transform_labels{"X2", "X3", "X4", "X5", "X6"};

} // namespace

std::string_view to_string(Transform transform)
{
  return transform_names.at(static_cast<std::size_t>(transform));
}

std::string_view transform_label(Transform transform)
{
  return transform_labels.at(static_cast<std::size_t>(transform));
}

Transform transform_from_name(std::string_view name)
{
  for (std::size_t k = 0; k < transform_names.size(); ++k) {
    if (transform_names[k] == name)
      return static_cast<Transform>(k);
  }
  throw Error(ErrorCode::configuration, "unknown transform '" + std::string(name) + "'");
}

double apply_transform(Transform transform, double x)
{
  switch (transform) {
    case Transform::inv: return 12.0 / x;
    case Transform::exp: return std::exp(x);
    case Transform::square: return x * x;
    case Transform::inv_square: return 12.0 / (x * x);
    case Transform::xexp: return x * std::exp(x);
  }
  return x;
}

bool transform_has_pole(Transform transform)
{
  return transform == Transform::inv || transform == Transform::inv_square;
}

std::vector<double> gen_m_dependent_gaussian(std::size_t m,
                                             std::size_t T,
                                             Rng& rng,
                                             const std::function<bool(double)>& reject)
{
  if (T <= m)
    throw Error(ErrorCode::size, "m-dependent series needs T > m");
  const double weight = 1.0 / std::sqrt(static_cast<double>(m + 1));

  // ring buffer of the last m + 1 innovations; the sum is recomputed from
  // the buffer on every step so no rounding drift accumulates
  std::vector<double> window(m + 1);
  for (std::size_t k = 0; k < m; ++k)
    window[k] = rng.normal();
  std::vector<double> out(T);
  std::size_t head = m;
  for (std::size_t t = 0; t < T; ++t) {
    double x = 0.0;
    for (int attempt = 0;; ++attempt) {
      window[head] = rng.normal();
      double sum = 0.0;
      for (double e : window)
        sum += e;
      x = weight * sum;
      if (!reject || !reject(x))
        break;
      if (attempt > 1000)
        throw Error(ErrorCode::numeric, "m-dependent generator: rejection did not terminate");
    }
    out[t] = x;
    head = (head + 1) % (m + 1);
  }
  return out;
}

std::vector<double> gen_m_dependent_gaussian(std::size_t m, std::size_t T, std::uint64_t seed)
{
  Rng rng(seed);
  return gen_m_dependent_gaussian(m, T, rng);
}

double price_from_standard_normal(double g)
{
  constexpr double mu = 1.0;
  constexpr double sigma = 0.5;
  const double alpha = -mu / sigma;
  const double kept_mass = stats::normal_upper_tail(alpha); // P(N > alpha)
  // evaluate in whichever tail keeps full precision
  if (g < 0.0) {
    const double p = stats::normal_cdf(alpha) + stats::normal_cdf(g) * kept_mass;
    return mu + sigma * stats::normal_quantile(p);
  }
  const double q = stats::normal_upper_tail(g) * kept_mass;
  return mu + sigma * stats::normal_upper_quantile(q);
}

PanelSeries gen_experiment1(std::size_t T, std::uint64_t seed, std::size_t m)
{
  Rng rng(seed);
  const auto driver = gen_m_dependent_gaussian(m, T, rng);
  std::vector<double> p1(T);
  std::vector<double> p2(T);
  for (std::size_t t = 0; t < T; ++t) {
    p2[t] = price_from_standard_normal(driver[t]);
    if (!(p2[t] > 0.0))
      throw Error(ErrorCode::numeric, "truncated price is not positive");
    p1[t] = 3.0 + 0.25 * p2[t];
  }
  return PanelSeries({"P1", "P2"}, {std::move(p1), std::move(p2)}, m);
}

PanelSeries gen_experiment2(std::size_t T, std::uint64_t seed, Transform transform, std::size_t m)
{
  Rng rng(seed);
  std::function<bool(double)> reject;
  if (transform_has_pole(transform))
    reject = [](double x) { return std::abs(x) < pole_dead_zone; };
  auto x = gen_m_dependent_gaussian(m, T, rng, reject);
  std::vector<double> y(T);
  for (std::size_t t = 0; t < T; ++t)
    y[t] = apply_transform(transform, x[t]);
  return PanelSeries({"X", std::string(transform_label(transform))}, {std::move(x), std::move(y)}, m);
}

PanelSeries gen_gaussian_panel(std::size_t m,
                               std::size_t T,
                               std::uint64_t seed,
                               std::size_t columns,
                               double rho)
{
  if (columns == 0)
    throw Error(ErrorCode::configuration, "gaussian panel needs at least one column");
  if (!(rho >= 0.0 && rho < 1.0))
    throw Error(ErrorCode::configuration, "common-factor correlation must lie in [0, 1)");
  Rng rng(seed);
  std::vector<double> common;
  if (rho > 0.0)
    common = gen_m_dependent_gaussian(m, T, rng);
  const double a = std::sqrt(rho);
  const double b = std::sqrt(1.0 - rho);

  std::vector<std::string> labels;
  std::vector<std::vector<double>> data;
  for (std::size_t k = 0; k < columns; ++k) {
    auto own = gen_m_dependent_gaussian(m, T, rng);
    if (rho > 0.0) {
      for (std::size_t t = 0; t < T; ++t)
        own[t] = a * common[t] + b * own[t];
    }
    labels.push_back("X" + std::to_string(k + 1));
    data.push_back(std::move(own));
  }
  return PanelSeries(std::move(labels), std::move(data), m);
}

namespace {

double param(const ProcessSpec& spec, const std::string& name, double fallback)
{
  const auto it = spec.params.find(name);
  return it == spec.params.end() ? fallback : it->second;
}

} // namespace

PanelSeries generate(const ProcessSpec& spec)
{
  switch (spec.base) {
    case ProcessBase::gaussian_ma: {
      const double columns = param(spec, "columns", 2.0);
      if (!(columns >= 1.0) || columns != std::floor(columns))
        throw Error(ErrorCode::configuration, "columns must be a positive integer");
      return gen_gaussian_panel(spec.m, spec.T, spec.seed, static_cast<std::size_t>(columns),
                                param(spec, "rho", 0.0));
    }
    case ProcessBase::price_equilibrium:
      return gen_experiment1(spec.T, spec.seed, spec.m);
    case ProcessBase::transform_suite: {
      const double index = param(spec, "transform", static_cast<double>(Transform::exp));
      if (!(index >= 0.0 && index < 5.0) || index != std::floor(index))
        throw Error(ErrorCode::configuration, "transform index must be 0..4");
      return gen_experiment2(spec.T, spec.seed, static_cast<Transform>(static_cast<int>(index)), spec.m);
    }
  }
  throw Error(ErrorCode::configuration, "unknown process base");
}

} // namespace hetassoc
