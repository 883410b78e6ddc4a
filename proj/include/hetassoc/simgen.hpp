#pragma once

#include "hetassoc/panel.hpp"
#include "hetassoc/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hetassoc {

enum class ProcessBase
{
  gaussian_ma,
  price_equilibrium,
  transform_suite
};

[[nodiscard]] std::string_view to_string(ProcessBase base);
[[nodiscard]] ProcessBase process_base_from_name(std::string_view name);

//! The five deterministic maps of the transform suite, applied to X.
enum class Transform
{
  inv,        //!< 12 / X
  exp,        //!< e^X
  square,     //!< X^2
  inv_square, //!< 12 / X^2
  xexp        //!< X e^X
};

[[nodiscard]] std::string_view to_string(Transform transform);
[[nodiscard]] Transform transform_from_name(std::string_view name);
[[nodiscard]] double apply_transform(Transform transform, double x);
//! Column label of the transformed companion (X2 .. X6).
[[nodiscard]] std::string_view transform_label(Transform transform);
[[nodiscard]] bool transform_has_pole(Transform transform);

/**
 * Generator description. params used per base:
 *  - gaussian_ma: "columns" (default 2), "rho" common-factor correlation
 *    in [0, 1) (default 0)
 *  - price_equilibrium: none
 *  - transform_suite: "transform" = index of Transform (default exp)
 */
struct ProcessSpec
{
  std::size_t m = 5;
  std::size_t T = 2000;
  std::uint64_t seed = 0;
  ProcessBase base = ProcessBase::gaussian_ma;
  std::map<std::string, double> params;
};

inline constexpr double pole_dead_zone = 1e-8;

//! Stationary m-dependent N(0, 1) series X_t = sum_{k=0..m} eps_{t-k} / sqrt(m+1).
//! `reject`, when given, marks values that are redrawn by resampling the
//! newest innovation.
[[nodiscard]] std::vector<double> gen_m_dependent_gaussian(
  std::size_t m,
  std::size_t T,
  Rng& rng,
  const std::function<bool(double)>& reject = {});

[[nodiscard]] std::vector<double> gen_m_dependent_gaussian(std::size_t m,
                                                           std::size_t T,
                                                           std::uint64_t seed);

//! Maps a standard normal draw to N(1, 0.25) truncated to (0, inf) through
//! the probability integral transform; monotone, so m-dependence survives.
[[nodiscard]] double price_from_standard_normal(double g);

//! Duopoly prices: P2 truncated normal around 1 (sd 0.5), P1 = 3 + P2 / 4.
[[nodiscard]] PanelSeries gen_experiment1(std::size_t T, std::uint64_t seed, std::size_t m = 5);

//! Columns (X, X_k) with X standard-normal m-dependent and X_k = map(X).
[[nodiscard]] PanelSeries gen_experiment2(std::size_t T,
                                          std::uint64_t seed,
                                          Transform transform,
                                          std::size_t m = 5);

//! Common-factor Gaussian panel: X_k = sqrt(rho) C + sqrt(1 - rho) E_k with
//! independent m-dependent drivers C, E_1..E_N, so corr(X_a, X_b) = rho.
[[nodiscard]] PanelSeries gen_gaussian_panel(std::size_t m,
                                             std::size_t T,
                                             std::uint64_t seed,
                                             std::size_t columns = 2,
                                             double rho = 0.0);

[[nodiscard]] PanelSeries generate(const ProcessSpec& spec);

} // namespace hetassoc
