#include "hetassoc/inference.hpp"

#include "hetassoc/error.hpp"
#include "hetassoc/stats.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hetassoc {

Gradient gradient_r(const EntropyTriple& h)
{
  const auto [hi, hj, hij] = h;
  if (hi == 0.0)
    throw Error(ErrorCode::division, "gradient of r: H_i is zero");
  return {-(hj - hij) / (hi * hi), 1.0 / hi, -1.0 / hi};
}

Gradient gradient_d(const EntropyTriple& h)
{
  const auto [hi, hj, hij] = h;
  if (hi == 0.0 || hj == 0.0)
    throw Error(ErrorCode::division, "gradient of d: zero marginal entropy");
  return {-(hj - hij) / (hi * hi) - 1.0 / hj,
          1.0 / hi + (hi - hij) / (hj * hj),
          -1.0 / hi + 1.0 / hj};
}

double delta_variance(const Gradient& g, const Eigen::Matrix3d& sigma)
{
  Eigen::Matrix3d sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  Eigen::Vector3d lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-8 * scale)
    throw Error(ErrorCode::numeric, "moment table is not positive semidefinite");
  if (lambda.minCoeff() < 0.0) {
    lambda = lambda.cwiseMax(0.0);
    sym = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  }
  const Eigen::Vector3d v(g[0], g[1], g[2]);
  const double s = v.dot(sym * v);
  if (s < -1e-10)
    throw Error(ErrorCode::numeric, "negative delta-method variance");
  return std::max(s, 0.0);
}

std::string_view to_string(TestKind kind)
{
  switch (kind) {
    case TestKind::importance: return "importance";
    case TestKind::asymmetry_normal: return "asymmetry_normal";
    case TestKind::asymmetry_chisq: return "asymmetry_chisq";
  }
  return "unknown";
}

std::string_view to_string(Decision decision)
{
  return decision == Decision::reject ? "reject" : "fail_to_reject";
}

TestKind test_kind_from_name(std::string_view name)
{
  if (name == "importance")
    return TestKind::importance;
  if (name == "asymmetry" || name == "asymmetry_normal" || name == "asymmetry-normal")
    return TestKind::asymmetry_normal;
  if (name == "asymmetry-chisq" || name == "asymmetry_chisq")
    return TestKind::asymmetry_chisq;
  throw Error(ErrorCode::configuration, "unknown test kind '" + std::string(name) + "'");
}

namespace {

void check_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::domain, "alpha must lie in (0, 1)");
}

void check_se(double se)
{
  if (!(se > 0.0) || !std::isfinite(se))
    throw Error(ErrorCode::degenerate_variance, "standard error is zero or not finite");
}

} // namespace

TestOutcome importance_test(double r_hat, double standard_error, double r_star, double alpha)
{
  check_alpha(alpha);
  if (!(r_star > 0.0 && r_star < 1.0))
    throw Error(ErrorCode::domain, "r_star must lie in (0, 1)");
  check_se(standard_error);

  TestOutcome out;
  out.kind = TestKind::importance;
  out.alpha = alpha;
  out.r_star = r_star;
  out.standard_error = standard_error;
  out.estimate = r_hat;
  out.statistic = r_hat;
  out.critical_value = r_star + stats::normal_quantile(alpha) * standard_error;
  out.p_value = stats::normal_cdf((r_hat - r_star) / standard_error);
  out.decision = r_hat <= out.critical_value ? Decision::reject : Decision::fail_to_reject;
  return out;
}

TestOutcome asymmetry_test(double d_hat, double standard_error, double alpha, TestKind form)
{
  check_alpha(alpha);
  check_se(standard_error);
  if (form == TestKind::importance)
    throw Error(ErrorCode::configuration, "asymmetry test needs a normal or chisq form");

  const double z = d_hat / standard_error;
  TestOutcome out;
  out.kind = form;
  out.alpha = alpha;
  out.standard_error = standard_error;
  out.estimate = d_hat;
  // both forms share one p-value: P(|Z| > |z|) = P(chi2_1 > z^2)
  out.p_value = 2.0 * stats::normal_upper_tail(std::abs(z));
  // one rejection rule for both forms so their decisions cannot disagree
  const double chi2_critical = stats::chi_squared_quantile(1.0 - alpha, 1.0);
  out.decision = z * z > chi2_critical ? Decision::reject : Decision::fail_to_reject;
  if (form == TestKind::asymmetry_normal) {
    out.statistic = z;
    out.critical_value = stats::normal_upper_quantile(alpha / 2.0);
  } else {
    out.statistic = z * z;
    out.critical_value = chi2_critical;
  }
  return out;
}

namespace {

double eval_size(std::size_t time_points)
{
  const auto n = time_points / 2;
  if (n == 0)
    throw Error(ErrorCode::size, "standard error needs T >= 2");
  return static_cast<double>(n);
}

} // namespace

double standard_error_r(const AssociationResult& result, std::size_t time_points)
{
  const double s = delta_variance(gradient_r(result.entropies), result.moments.covariance);
  return std::sqrt(s / eval_size(time_points));
}

double standard_error_d(const AssociationResult& result, std::size_t time_points)
{
  const double s = delta_variance(gradient_d(result.entropies), result.moments.covariance);
  return std::sqrt(s / eval_size(time_points));
}

TestOutcome importance_test(const AssociationResult& result,
                            double r_star,
                            double alpha,
                            std::size_t time_points)
{
  return importance_test(result.r_ij, standard_error_r(result, time_points), r_star, alpha);
}

TestOutcome asymmetry_test(const AssociationResult& result,
                           double alpha,
                           std::size_t time_points,
                           TestKind form)
{
  return asymmetry_test(result.d_ij, standard_error_d(result, time_points), alpha, form);
}

} // namespace hetassoc
