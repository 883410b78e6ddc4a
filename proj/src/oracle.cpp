#include "hetassoc/oracle.hpp"

#include "hetassoc/error.hpp"
#include "hetassoc/stats.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hetassoc {

namespace {

constexpr double log_two_pi = 1.8378770664093454836; // ln(2 pi)

double log_phi(double x)
{
  return -0.5 * log_two_pi - 0.5 * x * x;
}

std::string format_point(double x)
{
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace

std::string_view to_string(OracleMethod method)
{
  switch (method) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::monte_carlo: return "monte_carlo";
    case OracleMethod::smoothed_grid: return "smoothed_grid";
    case OracleMethod::taylor: return "taylor";
    case OracleMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

OracleResult gaussian_entropy(double sigma)
{
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::domain, "gaussian_entropy: sigma must be positive");
  return {0.5 * (log_two_pi + 1.0) + std::log(sigma), 0.0, OracleMethod::closed_form, 0};
}

OracleResult gaussian_mi(double rho)
{
  if (!(std::abs(rho) < 1.0))
    throw Error(ErrorCode::domain, "gaussian_mi: |rho| must be below 1");
  return {-0.5 * std::log1p(-rho * rho), 0.0, OracleMethod::closed_form, 0};
}

double truncated_normal_entropy(double mu, double sigma, double lower)
{
  if (!(sigma > 0.0))
    throw Error(ErrorCode::domain, "truncated normal: sigma must be positive");
  const double alpha = (lower - mu) / sigma;
  const double kept = stats::normal_upper_tail(alpha);
  const double pdf = std::exp(log_phi(alpha));
  return 0.5 * (log_two_pi + 1.0) + std::log(sigma * kept) + alpha * pdf / (2.0 * kept);
}

UnivariateLaw normal_law(double mu, double sigma)
{
  if (!(sigma > 0.0))
    throw Error(ErrorCode::domain, "normal law: sigma must be positive");
  UnivariateLaw law;
  law.name = "normal";
  law.log_density = [=](double x) { return log_phi((x - mu) / sigma) - std::log(sigma); };
  law.sample = [=](Rng& rng) { return mu + sigma * rng.normal(); };
  law.integrand = [=](double x) {
    const double l = log_phi((x - mu) / sigma) - std::log(sigma);
    return -std::exp(l) * l;
  };
  law.nodes = {mu - 8.0 * sigma, mu + 8.0 * sigma};
  law.closed_form = gaussian_entropy(sigma).value;
  return law;
}

UnivariateLaw truncated_normal_law(double mu, double sigma, double lower)
{
  if (!(sigma > 0.0))
    throw Error(ErrorCode::domain, "truncated normal law: sigma must be positive");
  const double alpha = (lower - mu) / sigma;
  const double kept = stats::normal_upper_tail(alpha);
  const double below = stats::normal_cdf(alpha);
  const double log_norm = std::log(sigma) + std::log(kept);
  UnivariateLaw law;
  law.name = "truncated_normal";
  law.log_density = [=](double x) {
    if (!(x > lower))
      return -std::numeric_limits<double>::infinity();
    return log_phi((x - mu) / sigma) - log_norm;
  };
  law.sample = [=](Rng& rng) {
    const double g = rng.normal();
    if (g < 0.0)
      return mu + sigma * stats::normal_quantile(below + stats::normal_cdf(g) * kept);
    return mu + sigma * stats::normal_upper_quantile(stats::normal_upper_tail(g) * kept);
  };
  law.integrand = [=](double x) {
    const double l = log_phi((x - mu) / sigma) - log_norm;
    return -std::exp(l) * l;
  };
  law.nodes = {lower, std::max(lower, mu) + 8.0 * sigma};
  law.closed_form = truncated_normal_entropy(mu, sigma, lower);
  return law;
}

UnivariateLaw uniform_law(double lower, double upper)
{
  if (!(upper > lower))
    throw Error(ErrorCode::domain, "uniform law: empty support");
  const double log_width = std::log(upper - lower);
  UnivariateLaw law;
  law.name = "uniform";
  law.log_density = [=](double x) {
    if (x < lower || x > upper)
      return -std::numeric_limits<double>::infinity();
    return -log_width;
  };
  law.sample = [=](Rng& rng) { return lower + (upper - lower) * rng.uniform(); };
  law.integrand = [=](double) { return log_width / (upper - lower); };
  law.nodes = {lower, upper};
  law.closed_form = log_width;
  return law;
}

namespace {

// log density of Y = X e^X; two preimages below zero, one above
double xexp_log_density(double y)
{
  const double branch = -std::exp(-1.0);
  if (y < branch)
    return -std::numeric_limits<double>::infinity();
  auto term = [](double x) { return log_phi(x) - x - std::log(std::abs(1.0 + x)); };
  if (y >= 0.0)
    return term(boost::math::lambert_w0(y));
  const double a = term(boost::math::lambert_w0(y));
  const double b = term(boost::math::lambert_wm1(y));
  const double top = std::max(a, b);
  if (!std::isfinite(top))
    return std::numeric_limits<double>::infinity();
  return top + std::log(std::exp(a - top) + std::exp(b - top));
}

} // namespace

UnivariateLaw transform_law(Transform transform)
{
  // entropies of the monotone and two-to-one maps follow from
  // E ln X^2 = psi(1/2) + ln 2 and the chi-squared(1) entropy
  constexpr double h_normal = 1.4189385332046727418;
  constexpr double e_log_x2 = -1.2703628454614781700;
  constexpr double h_chi2_1 = 0.7837571104739337;
  const double log12 = std::log(12.0);

  UnivariateLaw law;
  law.name = std::string(to_string(transform));
  law.sample = [transform](Rng& rng) {
    double x = rng.normal();
    while (transform_has_pole(transform) && std::abs(x) < pole_dead_zone)
      x = rng.normal();
    return apply_transform(transform, x);
  };
  // log f_Y(g(x)), written in x so extreme y never over- or underflows
  std::function<double(double)> log_f_of_x;
  switch (transform) {
    case Transform::inv:
      law.log_density = [=](double y) { return log_phi(12.0 / y) + log12 - 2.0 * std::log(std::abs(y)); };
      log_f_of_x = [=](double x) { return log_phi(x) + 2.0 * std::log(std::abs(x)) - log12; };
      law.nodes = {-10.0, 0.0, 10.0};
      law.smooth_integrand = false;
      law.closed_form = h_normal + log12 - e_log_x2;
      break;
    case Transform::exp:
      law.log_density = [](double y) {
        if (!(y > 0.0))
          return -std::numeric_limits<double>::infinity();
        const double x = std::log(y);
        return log_phi(x) - x;
      };
      log_f_of_x = [](double x) { return log_phi(x) - x; };
      law.nodes = {-10.0, 10.0};
      law.closed_form = h_normal;
      break;
    case Transform::square:
      law.log_density = [](double y) {
        if (!(y > 0.0))
          return -std::numeric_limits<double>::infinity();
        return log_phi(std::sqrt(y)) - 0.5 * std::log(y);
      };
      log_f_of_x = [](double x) { return log_phi(x) - std::log(std::abs(x)); };
      law.nodes = {-10.0, 0.0, 10.0};
      law.smooth_integrand = false;
      law.closed_form = h_chi2_1;
      break;
    case Transform::inv_square:
      law.log_density = [=](double y) {
        if (!(y > 0.0))
          return -std::numeric_limits<double>::infinity();
        const double w = 12.0 / y;
        return log_phi(std::sqrt(w)) - 0.5 * std::log(w) + log12 - 2.0 * std::log(y);
      };
      log_f_of_x = [=](double x) { return log_phi(x) + 3.0 * std::log(std::abs(x)) - log12; };
      law.nodes = {-10.0, 0.0, 10.0};
      law.smooth_integrand = false;
      law.closed_form = h_chi2_1 + log12 - 2.0 * e_log_x2;
      break;
    case Transform::xexp:
      law.log_density = xexp_log_density;
      log_f_of_x = [](double x) { return xexp_log_density(x * std::exp(x)); };
      law.nodes = {-10.0, -1.0, 10.0};
      law.smooth_integrand = false;
      break;
  }
  // the log density is infinite only at isolated nodes (poles, the branch
  // point of the Lambert map), which carry no mass
  law.integrand = [log_f_of_x](double x) {
    const double l = log_f_of_x(x);
    return std::isfinite(l) ? -std::exp(log_phi(x)) * l : 0.0;
  };
  return law;
}

UnivariateLaw law_from_name(std::string_view name)
{
  if (name == "normal" || name == "gaussian")
    return normal_law();
  if (name == "truncated_normal")
    return truncated_normal_law();
  if (name == "uniform")
    return uniform_law();
  try {
    return transform_law(transform_from_name(name));
  } catch (const Error&) {
    throw Error(ErrorCode::configuration, "unknown law '" + std::string(name) + "'");
  }
}

OracleResult mc_entropy(const std::function<double(double)>& log_density,
                        const std::function<double(Rng&)>& sampler,
                        std::size_t samples,
                        std::uint64_t seed)
{
  if (samples < 2)
    throw Error(ErrorCode::configuration, "mc_entropy needs at least two samples");
  Rng rng(seed);
  // Welford accumulation of -log f
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = sampler(rng);
    const double v = -log_density(x);
    if (!std::isfinite(v))
      throw Error(ErrorCode::oracle_failure,
                  "mc_entropy: non-finite log density at x = " + format_point(x));
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(samples - 1));
  return {mean, sd / std::sqrt(static_cast<double>(samples)), OracleMethod::monte_carlo, samples};
}

OracleResult mc_entropy(const UnivariateLaw& law, std::size_t samples, std::uint64_t seed)
{
  return mc_entropy(law.log_density, law.sample, samples, seed);
}

OracleResult quadrature_entropy(const UnivariateLaw& law)
{
  if (law.nodes.size() < 2)
    throw Error(ErrorCode::configuration, "quadrature needs at least one interval");
  std::size_t evaluations = 0;
  auto f = [&](double x) {
    ++evaluations;
    return law.integrand(x);
  };
  double total = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k + 1 < law.nodes.size(); ++k) {
    const double a = law.nodes[k];
    const double b = law.nodes[k + 1];
    double piece_error = 0.0;
    if (law.smooth_integrand) {
      total += boost::math::quadrature::trapezoidal(f, a, b, 1e-12, 20, &piece_error);
    } else {
      boost::math::quadrature::tanh_sinh<double> integrator;
      total += integrator.integrate(f, a, b, 1e-10, &piece_error);
    }
    error += piece_error;
  }
  if (!std::isfinite(total))
    throw Error(ErrorCode::oracle_failure, "quadrature entropy is not finite for law " + law.name);
  return {total, error, OracleMethod::quadrature, evaluations};
}

PairSampler gaussian_pair_sampler(double rho)
{
  if (!(std::abs(rho) < 1.0))
    throw Error(ErrorCode::domain, "gaussian pair: |rho| must be below 1");
  const double c = std::sqrt(1.0 - rho * rho);
  return [=](Rng& rng) {
    const double x = rng.normal();
    return std::pair{x, rho * x + c * rng.normal()};
  };
}

PairSampler experiment1_sampler()
{
  return [](Rng& rng) {
    const double p2 = price_from_standard_normal(rng.normal());
    return std::pair{3.0 + 0.25 * p2, p2};
  };
}

PairSampler experiment2_sampler(Transform transform)
{
  return [transform](Rng& rng) {
    double x = rng.normal();
    while (transform_has_pole(transform) && std::abs(x) < pole_dead_zone)
      x = rng.normal();
    return std::pair{x, apply_transform(transform, x)};
  };
}

namespace {

struct Axis
{
  double lo = 0.0;
  double step = 0.0;
  std::vector<double> weights; // discrete kernel, centred, sums to 1
  std::size_t half = 0;
};

Axis make_axis(std::vector<double> values,
               double h,
               const KernelSpec& kernel,
               const SmoothedGrid& grid,
               std::string_view name)
{
  std::sort(values.begin(), values.end());
  const double reach = std::min(grid.margin, kernel.support_radius) * h;
  const double lo = stats::quantile(values, grid.tail_probability) - reach;
  const double hi = stats::quantile(values, 1.0 - grid.tail_probability) + reach;
  Axis axis;
  axis.lo = lo;
  axis.step = (hi - lo) / static_cast<double>(grid.points - 1);
  if (!(axis.step <= 0.5 * h)) {
    throw Error(ErrorCode::coverage,
                "smoothed grid too coarse on axis " + std::string(name) + ": step " +
                  format_point(axis.step) + " exceeds half the bandwidth " + format_point(h) +
                  "; use more grid points");
  }
  axis.half = static_cast<std::size_t>(std::ceil(reach / axis.step));
  axis.weights.resize(2 * axis.half + 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < axis.weights.size(); ++k) {
    const double u = (static_cast<double>(k) - static_cast<double>(axis.half)) * axis.step / h;
    axis.weights[k] = kernel(u);
    sum += axis.weights[k];
  }
  for (double& w : axis.weights)
    w /= sum;
  return axis;
}

struct GridEntropies
{
  double first = 0.0;
  double second = 0.0;
  double joint = 0.0;
  double mass = 0.0;
};

double xlogx_sum(const std::vector<double>& f, double cell)
{
  double s = 0.0;
  for (double v : f) {
    if (v > 0.0)
      s -= v * std::log(v);
  }
  return s * cell;
}

// counts: row-major [i * P + j], i along the first axis
GridEntropies smooth_and_integrate(const std::vector<double>& counts,
                                   double total,
                                   std::size_t P,
                                   const Axis& ax,
                                   const Axis& ay)
{
  std::vector<double> tmp(P * P, 0.0);
  const auto hx = static_cast<std::ptrdiff_t>(ax.half);
  for (std::size_t i = 0; i < P; ++i) {
    const double* src = &counts[i * P];
    bool empty = true;
    for (std::size_t j = 0; j < P && empty; ++j)
      empty = src[j] == 0.0;
    if (empty)
      continue;
    for (std::ptrdiff_t o = -hx; o <= hx; ++o) {
      const auto ii = static_cast<std::ptrdiff_t>(i) + o;
      if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(P))
        continue;
      const double w = ax.weights[static_cast<std::size_t>(o + hx)];
      double* dst = &tmp[static_cast<std::size_t>(ii) * P];
      for (std::size_t j = 0; j < P; ++j)
        dst[j] += w * src[j];
    }
  }
  std::vector<double> dens(P * P, 0.0);
  const auto hy = static_cast<std::ptrdiff_t>(ay.half);
  const double scale = 1.0 / (total * ax.step * ay.step);
  for (std::size_t i = 0; i < P; ++i) {
    const double* src = &tmp[i * P];
    double* dst = &dens[i * P];
    for (std::size_t j = 0; j < P; ++j) {
      if (src[j] == 0.0)
        continue;
      const double v = src[j] * scale;
      const auto lo = std::max<std::ptrdiff_t>(-hy, -static_cast<std::ptrdiff_t>(j));
      const auto hi = std::min<std::ptrdiff_t>(hy, static_cast<std::ptrdiff_t>(P - 1 - j));
      for (std::ptrdiff_t o = lo; o <= hi; ++o)
        dst[static_cast<std::ptrdiff_t>(j) + o] += v * ay.weights[static_cast<std::size_t>(o + hy)];
    }
  }

  std::vector<double> fx(P, 0.0);
  std::vector<double> fy(P, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < P; ++j) {
      fx[i] += dens[i * P + j] * ay.step;
      fy[j] += dens[i * P + j] * ax.step;
    }
  }
  GridEntropies out;
  for (double v : fx)
    out.mass += v * ax.step;
  out.first = xlogx_sum(fx, ax.step);
  out.second = xlogx_sum(fy, ay.step);
  out.joint = xlogx_sum(dens, ax.step * ay.step);
  return out;
}

OracleResult jackknife(double full, const std::vector<double>& leave_out, std::size_t points)
{
  const auto g = static_cast<double>(leave_out.size());
  double mean = 0.0;
  for (double v : leave_out)
    mean += v;
  mean /= g;
  double ss = 0.0;
  for (double v : leave_out)
    ss += (v - mean) * (v - mean);
  return {g * full - (g - 1.0) * mean, std::sqrt((g - 1.0) / g * ss), OracleMethod::smoothed_grid, points};
}

} // namespace

SmoothedAssociation smoothed_association(const PairSampler& sampler,
                                         double h_i,
                                         double h_j,
                                         const KernelSpec& kernel,
                                         const SmoothedGrid& grid,
                                         std::uint64_t seed)
{
  if (!(h_i > 0.0 && h_j > 0.0))
    throw Error(ErrorCode::domain, "smoothed oracle: bandwidths must be positive");
  if (grid.points < 16)
    throw Error(ErrorCode::configuration, "smoothed oracle: grid needs at least 16 points per axis");
  if (grid.jackknife_groups < 2 || grid.samples < 100 * grid.jackknife_groups)
    throw Error(ErrorCode::configuration, "smoothed oracle: too few samples for the jackknife groups");

  const std::size_t n = grid.samples;
  const std::size_t G = grid.jackknife_groups;
  const std::size_t P = grid.points;
  Rng rng(seed);
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [x, y] = sampler(rng);
    if (!std::isfinite(x) || !std::isfinite(y))
      throw Error(ErrorCode::oracle_failure, "smoothed oracle: sampler produced a non-finite value");
    xs[k] = x;
    ys[k] = y;
  }
  const Axis ax = make_axis(xs, h_i, kernel, grid, "i");
  const Axis ay = make_axis(ys, h_j, kernel, grid, "j");

  // linear binning, one count table per jackknife group
  std::vector<std::vector<double>> group_counts(G, std::vector<double>(P * P, 0.0));
  std::vector<double> group_size(G, 0.0);
  std::size_t inside = 0;
  const double last = static_cast<double>(P - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t g = k % G;
    group_size[g] += 1.0;
    const double fx = (xs[k] - ax.lo) / ax.step;
    const double fy = (ys[k] - ay.lo) / ay.step;
    if (fx < 0.0 || fy < 0.0 || fx > last || fy > last)
      continue;
    ++inside;
    const auto i = std::min(static_cast<std::size_t>(fx), P - 2);
    const auto j = std::min(static_cast<std::size_t>(fy), P - 2);
    const double wx = fx - static_cast<double>(i);
    const double wy = fy - static_cast<double>(j);
    auto& c = group_counts[g];
    c[i * P + j] += (1.0 - wx) * (1.0 - wy);
    c[(i + 1) * P + j] += wx * (1.0 - wy);
    c[i * P + j + 1] += (1.0 - wx) * wy;
    c[(i + 1) * P + j + 1] += wx * wy;
  }
  if (static_cast<double>(inside) < 0.999 * static_cast<double>(n)) {
    throw Error(ErrorCode::coverage, "smoothed oracle: grid covers only " +
                                       format_point(static_cast<double>(inside) / static_cast<double>(n)) +
                                       " of the sample mass");
  }

  std::vector<double> total(P * P, 0.0);
  for (const auto& c : group_counts)
    for (std::size_t k = 0; k < total.size(); ++k)
      total[k] += c[k];

  const auto full = smooth_and_integrate(total, static_cast<double>(n), P, ax, ay);
  if (full.mass < 0.999)
    throw Error(ErrorCode::coverage, "smoothed oracle: grid holds only " + format_point(full.mass) +
                                       " of the smoothed mass");

  struct Stats
  {
    double h1, h2, h12, mi, r12, r21, d;
  };
  auto derive = [](const GridEntropies& e) {
    const double mi = e.first + e.second - e.joint;
    const double r12 = 1.0 + (e.second - e.joint) / e.first;
    const double r21 = 1.0 + (e.first - e.joint) / e.second;
    return Stats{e.first, e.second, e.joint, mi, r12, r21, r12 - r21};
  };
  const Stats s_full = derive(full);
  std::vector<Stats> s_out;
  s_out.reserve(G);
  std::vector<double> counts(P * P);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t k = 0; k < counts.size(); ++k)
      counts[k] = total[k] - group_counts[g][k];
    s_out.push_back(derive(smooth_and_integrate(counts, static_cast<double>(n) - group_size[g], P, ax, ay)));
  }

  auto pick = [&](double Stats::*field) {
    std::vector<double> v;
    v.reserve(G);
    for (const auto& s : s_out)
      v.push_back(s.*field);
    return jackknife(s_full.*field, v, P);
  };
  SmoothedAssociation out;
  out.first = pick(&Stats::h1);
  out.second = pick(&Stats::h2);
  out.joint = pick(&Stats::h12);
  out.mutual_information = pick(&Stats::mi);
  out.r_ij = pick(&Stats::r12);
  out.r_ji = pick(&Stats::r21);
  out.d_ij = pick(&Stats::d);
  out.bandwidths = {h_i, h_j};
  return out;
}

OracleResult smoothed_mi(const PairSampler& sampler,
                         double h_i,
                         double h_j,
                         const KernelSpec& kernel,
                         const SmoothedGrid& grid,
                         std::uint64_t seed)
{
  return smoothed_association(sampler, h_i, h_j, kernel, grid, seed).mutual_information;
}

OracleResult taylor_entropy(double log_density_at_mean,
                            const Eigen::MatrixXd& log_density_hessian,
                            const Eigen::MatrixXd& covariance)
{
  if (log_density_hessian.rows() != log_density_hessian.cols() ||
      covariance.rows() != covariance.cols() || covariance.rows() != log_density_hessian.rows())
    throw Error(ErrorCode::domain, "taylor_entropy: Hessian and covariance shapes differ");
  if (!log_density_hessian.allFinite())
    throw Error(ErrorCode::domain, "taylor_entropy: non-finite Hessian");
  if (!std::isfinite(log_density_at_mean) || !covariance.allFinite())
    throw Error(ErrorCode::domain, "taylor_entropy: non-finite input");
  const double quad = (log_density_hessian.cwiseProduct(covariance)).sum();
  return {-(log_density_at_mean + 0.5 * quad), 0.0, OracleMethod::taylor, 0};
}

OracleResult taylor_entropy(const std::function<double(double)>& log_density,
                            const std::function<double(double)>& log_density_second_derivative,
                            double mean,
                            double variance)
{
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = log_density_second_derivative(mean);
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = variance;
  return taylor_entropy(log_density(mean), b, v);
}

OracleResult taylor_entropy_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance)
{
  const auto d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d)
    throw Error(ErrorCode::domain, "taylor_entropy: covariance shape does not match the mean");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::domain, "taylor_entropy: covariance is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  const double log_f_mean = -0.5 * (static_cast<double>(d) * log_two_pi + log_det);
  const Eigen::MatrixXd hessian = -llt.solve(Eigen::MatrixXd::Identity(d, d));
  return taylor_entropy(log_f_mean, hessian, covariance);
}

} // namespace hetassoc
