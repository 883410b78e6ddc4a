#pragma once

#include "hetassoc/association.hpp"
#include "hetassoc/inference.hpp"
#include "hetassoc/oracle.hpp"
#include "hetassoc/panel.hpp"
#include "hetassoc/simgen.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>

namespace hetassoc {

inline constexpr std::string_view version = "0.1.0";

enum class OutputFormat
{
  json,
  table
};

struct RunConfig
{
  std::string kernel = "gaussian";
  double bandwidth_constant = 1.06;
  std::string truncation_rule = "inverse_fit_size";
  std::string variance = "long_run";
  double alpha = 0.05;
  double r_star = 0.9;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  OutputFormat output_format = OutputFormat::json;

  //! Validated estimator settings; configuration errors on bad names.
  [[nodiscard]] AssociationConfig association() const;
};

[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& config);

//! Association report for every ordered pair of the panel.
[[nodiscard]] nlohmann::ordered_json cmd_estimate(const PanelSeries& panel, const RunConfig& config);

[[nodiscard]] nlohmann::ordered_json cmd_test(const PanelSeries& panel,
                                              std::string_view label_i,
                                              std::string_view label_j,
                                              TestKind kind,
                                              const RunConfig& config);

struct SimulationRequest
{
  std::string experiment;   //!< "1", "2", or empty for a process base
  std::string process = "gaussian_ma";
  std::string transform = "exp";
  std::size_t T = 2000;
  std::size_t m = 5;
  std::size_t columns = 2;
  double rho = 0.0;
};

[[nodiscard]] PanelSeries cmd_simulate(const SimulationRequest& request, std::uint64_t seed);
[[nodiscard]] nlohmann::ordered_json simulation_metadata(const SimulationRequest& request,
                                                         const RunConfig& config);

struct OracleRequest
{
  std::string law;         //!< catalog law, "gaussian" or "gaussian_mi"
  std::string experiment;  //!< "1" or "2": smoothed association at estimator bandwidths
  std::string method = "auto";
  std::string transform = "exp";
  double sigma = 1.0;
  double rho = 0.0;
  std::size_t samples = 1000000;
  std::size_t grid = 512;
  std::size_t T = 2000;
  std::size_t m = 5;
};

[[nodiscard]] nlohmann::ordered_json cmd_oracle(const OracleRequest& request, const RunConfig& config);

//! Aligned key/value rendering carrying the same fields as the JSON.
[[nodiscard]] std::string render_table(const nlohmann::ordered_json& report);

//! Full command-line entry point. Returns the process exit code:
//! 0 success, 2 input or configuration error, 3 internal numeric failure.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace hetassoc
