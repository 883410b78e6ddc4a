#pragma once

#include "hetassoc/kde.hpp"
#include "hetassoc/rng.hpp"
#include "hetassoc/simgen.hpp"

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hetassoc {

enum class OracleMethod
{
  closed_form,
  monte_carlo,
  smoothed_grid,
  taylor,
  quadrature
};

[[nodiscard]] std::string_view to_string(OracleMethod method);

struct OracleResult
{
  double value = 0.0;
  double standard_error = 0.0; //!< 0 for closed forms
  OracleMethod method = OracleMethod::closed_form;
  std::size_t samples_or_gridsize = 0;
};

//! 0.5 ln(2 pi e sigma^2). Domain error for sigma <= 0.
[[nodiscard]] OracleResult gaussian_entropy(double sigma);
//! -0.5 ln(1 - rho^2). Domain error for |rho| >= 1.
[[nodiscard]] OracleResult gaussian_mi(double rho);

//! Entropy of N(mu, sigma^2) restricted to (lower, inf).
[[nodiscard]] double truncated_normal_entropy(double mu, double sigma, double lower);

/**
 * A univariate law from the built-in catalog.
 *
 * `integrand` over the pieces between consecutive `nodes` integrates to
 * the entropy. For transforms of a standard normal X it is expressed in x
 * (-phi(x) log f_Y(g(x))), which keeps the integration range finite.
 */
struct UnivariateLaw
{
  std::string name;
  std::function<double(double)> log_density;
  std::function<double(Rng&)> sample;
  std::function<double(double)> integrand;
  std::vector<double> nodes;
  bool smooth_integrand = true; //!< false when pieces end in log singularities
  std::optional<double> closed_form;
};

[[nodiscard]] UnivariateLaw normal_law(double mu = 0.0, double sigma = 1.0);
[[nodiscard]] UnivariateLaw truncated_normal_law(double mu = 1.0, double sigma = 0.5, double lower = 0.0);
[[nodiscard]] UnivariateLaw uniform_law(double lower = 0.0, double upper = 1.0);
//! Law of transform(X) for X standard normal.
[[nodiscard]] UnivariateLaw transform_law(Transform transform);

//! Catalog lookup: normal, truncated_normal, uniform, or a transform name.
//! Unknown names are configuration errors.
[[nodiscard]] UnivariateLaw law_from_name(std::string_view name);

//! -mean log f over n draws; se = sd(-log f) / sqrt(n). Oracle-failure
//! error when a draw has a non-finite log density.
[[nodiscard]] OracleResult mc_entropy(const std::function<double(double)>& log_density,
                                      const std::function<double(Rng&)>& sampler,
                                      std::size_t samples,
                                      std::uint64_t seed);

[[nodiscard]] OracleResult mc_entropy(const UnivariateLaw& law, std::size_t samples, std::uint64_t seed);

//! Adaptive trapezoid for smooth integrands, tanh-sinh otherwise.
[[nodiscard]] OracleResult quadrature_entropy(const UnivariateLaw& law);

using PairSampler = std::function<std::pair<double, double>(Rng&)>;

[[nodiscard]] PairSampler gaussian_pair_sampler(double rho);
//! Population law of (P1, P2) in the duopoly design.
[[nodiscard]] PairSampler experiment1_sampler();
//! (X, transform(X)) with X standard normal.
[[nodiscard]] PairSampler experiment2_sampler(Transform transform);

struct SmoothedGrid
{
  std::size_t points = 512;        //!< nodes per axis
  std::size_t samples = 200000;
  std::size_t jackknife_groups = 10;
  double tail_probability = 2e-4;  //!< grid spans the [p, 1-p] sample quantiles
  double margin = 6.0;             //!< plus this many bandwidths either side
};

//! Entropies of the kernel-smoothed laws and the derived association
//! measures, each with a delete-a-group jackknife standard error.
struct SmoothedAssociation
{
  OracleResult first;
  OracleResult second;
  OracleResult joint;
  OracleResult mutual_information;
  OracleResult r_ij;
  OracleResult r_ji;
  OracleResult d_ij;
  std::array<double, 2> bandwidths{0.0, 0.0};
};

/**
 * Population limit of the plug-in estimator at fixed bandwidths: the
 * sampled law is convolved with the product kernel on a grid (linear
 * binning plus separable convolution) and its entropies are integrated.
 *
 * Coverage error when less than 99.9% of the sampled mass falls on the
 * grid or when the grid step exceeds half a bandwidth.
 */
[[nodiscard]] SmoothedAssociation smoothed_association(const PairSampler& sampler,
                                                       double h_i,
                                                       double h_j,
                                                       const KernelSpec& kernel,
                                                       const SmoothedGrid& grid,
                                                       std::uint64_t seed);

[[nodiscard]] OracleResult smoothed_mi(const PairSampler& sampler,
                                       double h_i,
                                       double h_j,
                                       const KernelSpec& kernel,
                                       const SmoothedGrid& grid,
                                       std::uint64_t seed);

//! Second-order entropy approximation -(log f(mu) + 0.5 tr(B Sigma)) where
//! B is the Hessian of log f at mu. Domain error for a non-finite Hessian.
[[nodiscard]] OracleResult taylor_entropy(double log_density_at_mean,
                                          const Eigen::MatrixXd& log_density_hessian,
                                          const Eigen::MatrixXd& covariance);

[[nodiscard]] OracleResult taylor_entropy(const std::function<double(double)>& log_density,
                                          const std::function<double(double)>& log_density_second_derivative,
                                          double mean,
                                          double variance);

//! Taylor entropy of N(mean, covariance), built from its exact log density.
[[nodiscard]] OracleResult taylor_entropy_gaussian(const Eigen::VectorXd& mean,
                                                   const Eigen::MatrixXd& covariance);

} // namespace hetassoc
