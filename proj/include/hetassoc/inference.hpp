#pragma once

#include "hetassoc/association.hpp"

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace hetassoc {

//! (H_i, H_j, H_ij)
using EntropyTriple = std::array<double, 3>;
using Gradient = std::array<double, 3>;

//! Gradient of r = 1 + (H_j - H_ij) / H_i. Throws division error for H_i = 0.
[[nodiscard]] Gradient gradient_r(const EntropyTriple& h);

//! Gradient of d = (H_j - H_ij) / H_i - (H_i - H_ij) / H_j.
[[nodiscard]] Gradient gradient_d(const EntropyTriple& h);

/**
 * Delta-method variance S = g' Sigma g. Sigma is symmetrised, and negative
 * eigenvalues within 1e-8 (relative) of zero are clipped; anything more
 * negative is a numeric error. S in [-1e-10, 0] is returned as 0.
 */
[[nodiscard]] double delta_variance(const Gradient& g, const Eigen::Matrix3d& sigma);

enum class TestKind
{
  importance,
  asymmetry_normal,
  asymmetry_chisq
};

enum class Decision
{
  reject,
  fail_to_reject
};

[[nodiscard]] std::string_view to_string(TestKind kind);
[[nodiscard]] std::string_view to_string(Decision decision);
[[nodiscard]] TestKind test_kind_from_name(std::string_view name);

struct TestOutcome
{
  TestKind kind = TestKind::importance;
  //! importance: r_hat; asymmetry_normal: z; asymmetry_chisq: z^2
  double statistic = 0.0;
  //! importance: C; asymmetry_normal: normal quantile at 1 - alpha/2;
  //! asymmetry_chisq: chi-squared(1) quantile at 1 - alpha
  double critical_value = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  std::optional<double> r_star;
  Decision decision = Decision::fail_to_reject;
  double standard_error = 0.0;
  double estimate = 0.0; //!< r_hat or d_hat
};

//! One-sided test of H0: r_ij >= r_star. C = r_star + q_alpha * se;
//! reject iff r_hat <= C; p = Phi((r_hat - r_star) / se).
[[nodiscard]] TestOutcome importance_test(double r_hat,
                                          double standard_error,
                                          double r_star,
                                          double alpha);

//! Test of H0: d_ij = 0 with z = d_hat / se (normal, two-sided) or z^2
//! against chi-squared(1).
[[nodiscard]] TestOutcome asymmetry_test(double d_hat,
                                         double standard_error,
                                         double alpha,
                                         TestKind form);

//! Standard error sqrt(S / [T/2]) of r_ij for a pair estimate.
[[nodiscard]] double standard_error_r(const AssociationResult& result, std::size_t time_points);
[[nodiscard]] double standard_error_d(const AssociationResult& result, std::size_t time_points);

[[nodiscard]] TestOutcome importance_test(const AssociationResult& result,
                                          double r_star,
                                          double alpha,
                                          std::size_t time_points);

[[nodiscard]] TestOutcome asymmetry_test(const AssociationResult& result,
                                         double alpha,
                                         std::size_t time_points,
                                         TestKind form = TestKind::asymmetry_normal);

} // namespace hetassoc
