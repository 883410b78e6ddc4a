#include "hetassoc/cli.hpp"

#include "hetassoc/error.hpp"
#include "hetassoc/parallel.hpp"
#include "hetassoc/rng.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace hetassoc {

using nlohmann::ordered_json;

AssociationConfig RunConfig::association() const
{
  AssociationConfig out;
  out.kernel = KernelSpec::from_name(kernel);
  if (!(bandwidth_constant > 0.0) || !std::isfinite(bandwidth_constant))
    throw Error(ErrorCode::configuration, "bandwidth constant must be positive");
  out.bandwidth_constant = bandwidth_constant;
  out.truncation = truncation_rule_from_name(truncation_rule);
  out.variance = variance_mode_from_name(variance);
  if (workers == 0)
    throw Error(ErrorCode::configuration, "workers must be positive");
  out.workers = workers;
  return out;
}

ordered_json to_json(const RunConfig& config)
{
  return ordered_json{{"kernel", config.kernel},
                      {"bandwidth_constant", config.bandwidth_constant},
                      {"truncation_rule", config.truncation_rule},
                      {"variance", config.variance},
                      {"alpha", config.alpha},
                      {"r_star", config.r_star},
                      {"seed", config.seed},
                      {"workers", config.workers},
                      {"output_format", config.output_format == OutputFormat::json ? "json" : "table"}};
}

namespace {

ordered_json provenance(std::string_view command, const RunConfig& config)
{
  return ordered_json{{"command", command},
                      {"version", version},
                      {"rng", Rng::algorithm},
                      {"seed", config.seed},
                      {"config", to_json(config)}};
}

ordered_json panel_summary(const PanelSeries& panel)
{
  return ordered_json{{"time_points", panel.time_points()},
                      {"individuals", panel.individuals()},
                      {"dependence_order", panel.dependence_order()},
                      {"labels", panel.labels()}};
}

// null for NaN and infinities so the JSON stays valid
ordered_json number(double v)
{
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json standard_errors(const AssociationResult& result, std::size_t time_points)
{
  ordered_json out;
  try {
    out["se_r"] = number(standard_error_r(result, time_points));
  } catch (const Error& e) {
    out["se_r"] = nullptr;
    out["se_r_error"] = e.what();
  }
  try {
    out["se_d"] = number(standard_error_d(result, time_points));
  } catch (const Error& e) {
    out["se_d"] = nullptr;
    out["se_d_error"] = e.what();
  }
  return out;
}

} // namespace

ordered_json cmd_estimate(const PanelSeries& panel, const RunConfig& config)
{
  const auto assoc = config.association();
  const auto matrix = estimate_matrix(panel, assoc);
  const auto n = matrix.size();

  ordered_json report = provenance("estimate", config);
  report["panel"] = panel_summary(panel);

  ordered_json r = ordered_json::array();
  ordered_json r_clamped = ordered_json::array();
  ordered_json cells = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    ordered_json row_clamped = ordered_json::array();
    for (std::size_t j = 0; j < n; ++j) {
      const auto cell = matrix.cell(i, j);
      row.push_back(number(cell.r));
      if (i == j) {
        row_clamped.push_back(1.0);
        continue;
      }
      ordered_json c{{"i", panel.label(i)}, {"j", panel.label(j)}};
      if (cell.status == MatrixCell::Status::failed) {
        row_clamped.push_back(nullptr);
        c["status"] = "failed";
        c["error_code"] = to_string(cell.error->code);
        c["error"] = cell.error->message;
        cells.push_back(std::move(c));
        continue;
      }
      const auto& res = *cell.result;
      row_clamped.push_back(res.r_ij_clamped);
      c["status"] = "estimated";
      c["r"] = number(res.r_ij);
      c["r_clamped"] = number(res.r_ij_clamped);
      c["clamped"] = res.clamped[0];
      c["mutual_information"] = number(res.mutual_information);
      c["d"] = number(res.d_ij);
      c.update(standard_errors(res, panel.time_points()));
      c["entropies"] = ordered_json{
        {"H_i", res.entropies[0]}, {"H_j", res.entropies[1]}, {"H_ij", res.entropies[2]}};
      c["bandwidths"] = res.bandwidths;
      c["eval_count"] = res.eval_count;
      c["moment_samples"] = res.moments.sample_count;
      c["moment_max_lag"] = res.moments.max_lag;
      c["truncated"] = ordered_json{
        {"H_i", res.truncated[0]}, {"H_j", res.truncated[1]}, {"H_ij", res.truncated[2]}};
      c["truncation_warning"] = res.truncation_warning;
      cells.push_back(std::move(c));
    }
    r.push_back(std::move(row));
    r_clamped.push_back(std::move(row_clamped));
  }
  report["matrix"] = ordered_json{{"r", std::move(r)}, {"r_clamped", std::move(r_clamped)}};
  report["cells"] = std::move(cells);
  report["failed_pairs"] = matrix.failed_pair_count();
  report["joint_fits"] = matrix.joint_fit_count();
  return report;
}

ordered_json cmd_test(const PanelSeries& panel,
                      std::string_view label_i,
                      std::string_view label_j,
                      TestKind kind,
                      const RunConfig& config)
{
  const auto assoc = config.association();
  const auto result = estimate_pair(panel, label_i, label_j, assoc);
  const auto outcome = kind == TestKind::importance
                         ? importance_test(result, config.r_star, config.alpha, panel.time_points())
                         : asymmetry_test(result, config.alpha, panel.time_points(), kind);

  ordered_json report = provenance("test", config);
  report["panel"] = panel_summary(panel);
  report["pair"] = {label_i, label_j};
  report["test"] = to_string(outcome.kind);
  report["estimate"] = outcome.estimate;
  report["standard_error"] = outcome.standard_error;
  report["statistic"] = outcome.statistic;
  report["critical_value"] = outcome.critical_value;
  report["p_value"] = outcome.p_value;
  report["alpha"] = outcome.alpha;
  report["r_star"] = outcome.r_star ? ordered_json(*outcome.r_star) : ordered_json(nullptr);
  report["decision"] = to_string(outcome.decision);
  report["r_ij"] = result.r_ij;
  report["r_ji"] = result.r_ji;
  report["mutual_information"] = result.mutual_information;
  report["truncation_warning"] = result.truncation_warning;
  return report;
}

PanelSeries cmd_simulate(const SimulationRequest& request, std::uint64_t seed)
{
  if (request.experiment == "1")
    return gen_experiment1(request.T, seed, request.m);
  if (request.experiment == "2")
    return gen_experiment2(request.T, seed, transform_from_name(request.transform), request.m);
  if (!request.experiment.empty())
    throw Error(ErrorCode::configuration, "unknown experiment '" + request.experiment + "' (use 1 or 2)");
  ProcessSpec spec;
  spec.m = request.m;
  spec.T = request.T;
  spec.seed = seed;
  spec.base = process_base_from_name(request.process);
  spec.params["columns"] = static_cast<double>(request.columns);
  spec.params["rho"] = request.rho;
  spec.params["transform"] = static_cast<double>(transform_from_name(request.transform));
  return generate(spec);
}

ordered_json simulation_metadata(const SimulationRequest& request, const RunConfig& config)
{
  ordered_json meta = provenance("simulate", config);
  ordered_json spec{{"T", request.T}, {"m", request.m}};
  if (!request.experiment.empty()) {
    spec["experiment"] = request.experiment;
    if (request.experiment == "2")
      spec["transform"] = request.transform;
  } else {
    spec["process"] = request.process;
    spec["columns"] = request.columns;
    spec["rho"] = request.rho;
    if (request.process == "transform_suite")
      spec["transform"] = request.transform;
  }
  meta["spec"] = std::move(spec);
  return meta;
}

namespace {

ordered_json oracle_json(const OracleResult& r)
{
  return ordered_json{{"value", number(r.value)},
                      {"standard_error", number(r.standard_error)},
                      {"method", to_string(r.method)},
                      {"samples_or_gridsize", r.samples_or_gridsize}};
}

} // namespace

ordered_json cmd_oracle(const OracleRequest& request, const RunConfig& config)
{
  ordered_json report = provenance("oracle", config);
  if (!request.experiment.empty()) {
    if (request.experiment != "1" && request.experiment != "2")
      throw Error(ErrorCode::configuration, "unknown experiment '" + request.experiment + "' (use 1 or 2)");
    SimulationRequest sim;
    sim.experiment = request.experiment;
    sim.transform = request.transform;
    sim.T = request.T;
    sim.m = request.m;
    const auto panel = cmd_simulate(sim, config.seed);
    const auto assoc = config.association();
    const auto fi = fit_marginal_entropy(panel, 0, assoc);
    const auto fj = fit_marginal_entropy(panel, 1, assoc);
    const PairSampler sampler = request.experiment == "1"
                                  ? experiment1_sampler()
                                  : experiment2_sampler(transform_from_name(request.transform));
    SmoothedGrid grid;
    grid.points = request.grid;
    if (request.samples > 0)
      grid.samples = request.samples;
    const auto s = smoothed_association(sampler, fi.bandwidth, fj.bandwidth, assoc.kernel, grid,
                                        derive_seed(config.seed, 1));
    report["experiment"] = request.experiment;
    if (request.experiment == "2")
      report["transform"] = request.transform;
    report["labels"] = panel.labels();
    report["T"] = request.T;
    report["bandwidths"] = s.bandwidths;
    report["H_i"] = oracle_json(s.first);
    report["H_j"] = oracle_json(s.second);
    report["H_ij"] = oracle_json(s.joint);
    report["mutual_information"] = oracle_json(s.mutual_information);
    report["r_ij"] = oracle_json(s.r_ij);
    report["r_ji"] = oracle_json(s.r_ji);
    report["d_ij"] = oracle_json(s.d_ij);
    report["entropy_positivity"] = s.first.value > assoc.entropy_floor && s.second.value > assoc.entropy_floor;
    return report;
  }

  if (request.law.empty())
    throw Error(ErrorCode::configuration, "oracle needs --law or --experiment");
  report["law"] = request.law;
  OracleResult result;
  if (request.law == "gaussian_mi") {
    report["rho"] = request.rho;
    result = gaussian_mi(request.rho);
  } else if ((request.law == "gaussian" || request.law == "normal") &&
             (request.method == "auto" || request.method == "closed_form")) {
    report["sigma"] = request.sigma;
    result = gaussian_entropy(request.sigma);
  } else {
    const auto law = request.law == "gaussian" || request.law == "normal" ? normal_law(0.0, request.sigma)
                                                                          : law_from_name(request.law);
    if (law.name == "normal")
      report["sigma"] = request.sigma;
    if (request.method == "monte_carlo") {
      result = mc_entropy(law, request.samples > 0 ? request.samples : 1000000, derive_seed(config.seed, 0));
    } else if (request.method == "quadrature") {
      result = quadrature_entropy(law);
    } else if (request.method == "closed_form" || request.method == "auto") {
      if (law.closed_form)
        result = {*law.closed_form, 0.0, OracleMethod::closed_form, 0};
      else if (request.method == "auto")
        result = quadrature_entropy(law);
      else
        throw Error(ErrorCode::configuration, "law '" + request.law + "' has no closed form");
    } else {
      throw Error(ErrorCode::configuration, "unknown oracle method '" + request.method + "'");
    }
  }
  report["result"] = oracle_json(result);
  return report;
}

namespace {

void flatten(const ordered_json& node, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows)
{
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten(value, path.empty() ? key : path + "." + key, rows);
  } else if (node.is_array() && std::any_of(node.begin(), node.end(),
                                            [](const auto& v) { return v.is_structured(); })) {
    for (std::size_t k = 0; k < node.size(); ++k)
      flatten(node[k], path + "[" + std::to_string(k) + "]", rows);
  } else {
    rows.emplace_back(path, node.is_string() ? node.get<std::string>() : node.dump());
  }
}

} // namespace

std::string render_table(const ordered_json& report)
{
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& row : rows)
    width = std::max(width, row.first.size());
  std::ostringstream os;
  for (const auto& [key, value] : rows)
    os << key << std::string(width - key.size() + 2, ' ') << value << '\n';
  return os.str();
}

namespace {

char parse_delimiter(const std::string& text)
{
  if (text == "tab" || text == "\\t")
    return '\t';
  if (text.size() != 1)
    throw Error(ErrorCode::configuration, "delimiter must be a single character or 'tab'");
  return text[0];
}

std::uint64_t parse_seed(const std::string& text)
{
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw Error(ErrorCode::configuration, "HETASSOC_SEED is not an unsigned integer: '" + text + "'");
  return value;
}

PanelSeries read_input(const std::string& path, std::size_t m, char delimiter, std::istream& in)
{
  if (path == "-")
    return load_panel(in, m, delimiter);
  return load_panel_file(path, m, delimiter);
}

void emit(const ordered_json& report, OutputFormat format, const std::string& path, std::ostream& out)
{
  const std::string text = format == OutputFormat::json ? report.dump(2) + "\n" : render_table(report);
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw Error(ErrorCode::configuration, "cannot open output file '" + path + "'");
  file << text;
  if (!file)
    throw Error(ErrorCode::configuration, "failed writing output file '" + path + "'");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Heterogeneous association between panel series", "hetassoc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  RunConfig config;
  config.workers = default_workers();
  std::string format = "json";
  std::string output = "-";
  std::string input = "-";
  std::string delimiter = ",";
  std::size_t m = 5;
  std::vector<std::string> pair;
  std::string test_name = "importance";
  SimulationRequest sim;
  OracleRequest oracle;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--kernel", config.kernel, "gaussian or epanechnikov")->capture_default_str();
    sub->add_option("--bandwidth-constant", config.bandwidth_constant)->capture_default_str();
    sub->add_option("--truncation", config.truncation_rule)->capture_default_str();
    sub->add_option("--variance", config.variance, "iid or long_run")->capture_default_str();
    sub->add_option("--alpha", config.alpha)->capture_default_str();
    sub->add_option("--r-star", config.r_star)->capture_default_str();
    sub->add_option("--seed", config.seed)->capture_default_str();
    sub->add_option("--workers", config.workers);
    sub->add_option("--format", format)->check(CLI::IsMember({"json", "table"}))->capture_default_str();
    sub->add_option("--output", output, "output path, - for stdout")->capture_default_str();
  };

  auto* estimate = app.add_subcommand("estimate", "association matrix of a panel file");
  add_common(estimate);
  estimate->add_option("--input", input, "panel path, - for stdin")->required();
  estimate->add_option("--m", m, "dependence order of the panel")->capture_default_str();
  estimate->add_option("--delimiter", delimiter)->capture_default_str();

  auto* test = app.add_subcommand("test", "importance or asymmetry test for one pair");
  add_common(test);
  test->add_option("--input", input)->required();
  test->add_option("--m", m)->capture_default_str();
  test->add_option("--delimiter", delimiter)->capture_default_str();
  test->add_option("--pair", pair, "labels I J")->expected(2)->required();
  test->add_option("--test", test_name, "importance, asymmetry or asymmetry-chisq")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "write a simulated panel");
  add_common(simulate);
  simulate->add_option("--experiment", sim.experiment, "1 or 2");
  simulate->add_option("--process", sim.process, "gaussian_ma, price_equilibrium or transform_suite")
    ->capture_default_str();
  simulate->add_option("--transform", sim.transform)->capture_default_str();
  simulate->add_option("--T", sim.T)->capture_default_str();
  simulate->add_option("--m", sim.m)->capture_default_str();
  simulate->add_option("--columns", sim.columns)->capture_default_str();
  simulate->add_option("--rho", sim.rho)->capture_default_str();
  simulate->add_option("--delimiter", delimiter)->capture_default_str();

  auto* oracle_cmd = app.add_subcommand("oracle", "ground-truth entropies and smoothed estimands");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--law", oracle.law, "gaussian, gaussian_mi, truncated_normal, uniform or a transform");
  oracle_cmd->add_option("--experiment", oracle.experiment, "1 or 2");
  oracle_cmd->add_option("--method", oracle.method, "auto, closed_form, monte_carlo or quadrature")
    ->capture_default_str();
  oracle_cmd->add_option("--transform", oracle.transform)->capture_default_str();
  oracle_cmd->add_option("--sigma", oracle.sigma)->capture_default_str();
  oracle_cmd->add_option("--rho", oracle.rho)->capture_default_str();
  oracle_cmd->add_option("--samples", oracle.samples, "0 picks the method default");
  oracle_cmd->add_option("--grid", oracle.grid)->capture_default_str();
  oracle_cmd->add_option("--T", oracle.T)->capture_default_str();
  oracle_cmd->add_option("--m", oracle.m)->capture_default_str();
  oracle.samples = 0;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (const char* env = std::getenv("HETASSOC_SEED"); env != nullptr && *env != '\0')
      config.seed = parse_seed(env);
    config.output_format = format == "table" ? OutputFormat::table : OutputFormat::json;
    const char delim = parse_delimiter(delimiter);

    if (estimate->parsed()) {
      const auto panel = read_input(input, m, delim, in);
      const auto report = cmd_estimate(panel, config);
      emit(report, config.output_format, output, out);
      const auto n = panel.individuals();
      const bool any_success = report["failed_pairs"].get<std::size_t>() < n * (n - 1) / 2;
      if (!any_success) {
        err << "error[assumption_violation]: no pair could be estimated\n";
        return 3;
      }
      return 0;
    }
    if (test->parsed()) {
      const auto panel = read_input(input, m, delim, in);
      emit(cmd_test(panel, pair[0], pair[1], test_kind_from_name(test_name), config), config.output_format,
           output, out);
      return 0;
    }
    if (simulate->parsed()) {
      const auto panel = cmd_simulate(sim, config.seed);
      if (output == "-") {
        write_panel(out, panel, delim);
        out.flush();
      } else {
        {
          std::ofstream file(output, std::ios::binary);
          if (!file)
            throw Error(ErrorCode::configuration, "cannot open output file '" + output + "'");
          write_panel(file, panel, delim);
        }
        emit(simulation_metadata(sim, config), OutputFormat::json, output + ".meta.json", out);
      }
      return 0;
    }
    if (oracle_cmd->parsed()) {
      emit(cmd_oracle(oracle, config), config.output_format, output, out);
      return 0;
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.is_input_error() ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

} // namespace hetassoc
