/*
* Copyright 2026 The OPJ Authors.
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     https://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* ============================================================================
*/
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "opj/csv.hpp"
#include "opj/jackknife.hpp"
#include "opj/regression.hpp"
#include "opj/simulation.hpp"
#include "opj/stratify.hpp"
#include "opj/types.hpp"

namespace {

using opj::BoundaryRule;
using opj::BoundarySource;
using opj::Estimand;
using opj::ErrorCode;
using opj::JackknifeConfig;
using opj::Method;
using opj::ScenarioSpec;

const std::map<std::string, Estimand> kEstimands = {
    {"difference", Estimand::kDifference},
    {"ratio", Estimand::kRatio},
};

const std::map<std::string, BoundarySource> kBoundarySources = {
    {"deleted", BoundarySource::kDeletedBuckets},
    {"retained", BoundarySource::kRetainedBuckets},
    {"full", BoundarySource::kFullSample},
};

struct CommonFlags {
  JackknifeConfig config;
  Estimand estimand = Estimand::kDifference;
  std::string out;
};

void add_jackknife_flags(CLI::App* cmd, CommonFlags* flags,
                         bool with_strata = true) {
  cmd->add_option("--b,--buckets", flags->config.buckets,
                  "Number of jackknife buckets B")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--d,--delete", flags->config.deleted,
                  "Buckets deleted per iteration D");
  cmd->add_option("--m,--iterations", flags->config.iterations,
                  "Resampling iterations M");
  if (with_strata) {
    cmd->add_option("--k,--strata", flags->config.num_strata,
                    "Number of strata K");
  }
  cmd->add_option("--alpha", flags->config.alpha,
                  "Confidence level alpha (CI covers 1-alpha)");
  cmd->add_option("--seed", flags->config.seed, "Master seed")
      ->envname("OPJ_SEED");
  cmd->add_option("--boundary-source", flags->config.boundary_source,
                  "Units feeding strata-boundary construction")
      ->transform(CLI::CheckedTransformer(kBoundarySources, CLI::ignore_case));
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    opj::fail(ErrorCode::kCsvFormat, "cannot write " + path);
  }
  out << text;
}

std::string report_json(const opj::EstimateReport& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"method\": \"" << opj::method_name(report.method) << "\",\n";
  out << "  \"estimand\": \"" << opj::estimand_name(report.estimand) << "\",\n";
  out << "  \"point\": " << opj::format_g6(report.point) << ",\n";
  out << "  \"se\": " << opj::format_g6(report.se) << ",\n";
  out << "  \"ci_low\": " << opj::format_g6(report.ci_low) << ",\n";
  out << "  \"ci_high\": " << opj::format_g6(report.ci_high) << ",\n";
  out << "  \"alpha\": " << opj::format_g6(report.alpha);
  if (!report.config_echo.empty()) {
    out << ",\n  \"config\": {";
    bool first = true;
    for (const auto& [key, value] : report.config_echo) {
      out << (first ? "" : ", ") << "\"" << key << "\": " << value;
      first = false;
    }
    out << "}";
  }
  out << "\n}\n";
  return out.str();
}

std::string traces_csv(const std::vector<opj::ReplicateTrace>& traces) {
  std::ostringstream out;
  out << "m,deleted_buckets,estimate,merges\n";
  for (const auto& trace : traces) {
    out << trace.iteration << ",";
    for (size_t i = 0; i < trace.deleted_buckets.size(); ++i) {
      out << (i ? "|" : "") << trace.deleted_buckets[i];
    }
    out << "," << opj::format_g6(trace.estimate) << "," << trace.merges << "\n";
  }
  return out.str();
}

int run_analyze(const std::string& data_path, const std::string& method,
                const CommonFlags& flags, const std::string& trace_out) {
  const opj::ExperimentData data = opj::read_experiment_csv_file(data_path);
  opj::EstimateReport report;
  if (method == "base") {
    report = opj::baseline_report(data, flags.estimand, flags.config.alpha);
  } else if (method == "impute") {
    report = opj::imputation_report(data, flags.estimand, flags.config);
  } else {
    const opj::OpjResult result =
        opj::opj_run(data, flags.estimand, flags.config, !trace_out.empty());
    if (!trace_out.empty()) {
      write_output(traces_csv(result.traces), trace_out);
    }
    report = result.report;
  }
  write_output(report_json(report), flags.out);
  return 0;
}

struct ScenarioForms {
  opj::OutcomeForm outcome;
  opj::EffectForm effect;
};

const std::map<std::string, ScenarioForms> kScenarios = {
    {"independent", {opj::OutcomeForm::kIndependent, opj::EffectForm::kNone}},
    {"lin-lin", {opj::OutcomeForm::kLinear, opj::EffectForm::kLinear}},
    {"lin-const", {opj::OutcomeForm::kLinear, opj::EffectForm::kConstant}},
    {"quad-quad", {opj::OutcomeForm::kQuadratic, opj::EffectForm::kQuadratic}},
    {"quad-const", {opj::OutcomeForm::kQuadratic, opj::EffectForm::kConstant}},
};

void append_metric_row(std::ostringstream& out, const std::string& scenario,
                       Estimand estimand, const std::string& method,
                       const opj::SimulationMetrics& metrics, int reps,
                       uint64_t seed) {
  out << scenario << "," << opj::estimand_name(estimand) << "," << method << ","
      << opj::format_g6(metrics.mean_bias) << ","
      << opj::format_g6(metrics.mean_se) << "," << opj::format_g6(metrics.rmse)
      << "," << opj::format_g6(metrics.coverage) << "," << reps << "," << seed
      << "\n";
}

int run_simulate(const std::string& scenario, const CommonFlags& flags,
                 int reps, int threads, const std::string& errors_out) {
  ScenarioSpec spec;
  spec.estimand = flags.estimand;
  spec.reps = reps;
  spec.seed = flags.config.seed;

  std::ostringstream out;
  out << "scenario,estimand,method,mean_bias,mean_se,rmse,coverage,reps,seed\n";
  std::vector<opj::RepRecord> errors;

  if (scenario == "naive-psf") {
    spec.outcome = opj::OutcomeForm::kQuadratic;
    spec.effect = opj::EffectForm::kQuadratic;
    spec.estimand = Estimand::kDifference;
    const char* labels[4] = {"yhat0", "x1", "x2", "x3"};
    for (int psf = 0; psf < 4; ++psf) {
      const opj::SimulationMetrics metrics = opj::naive_psf_run(
          spec, psf, flags.config, threads,
          errors_out.empty() ? nullptr : &errors);
      append_metric_row(out, scenario, spec.estimand, labels[psf], metrics,
                        reps, spec.seed);
    }
  } else {
    auto found = kScenarios.find(scenario);
    if (found == kScenarios.end()) {
      opj::fail(ErrorCode::kInvalidScenario, "unknown scenario " + scenario);
    }
    spec.outcome = found->second.outcome;
    spec.effect = found->second.effect;
    const Method methods[3] = {Method::kBase, Method::kImpute, Method::kOpj};
    const opj::MonteCarloResult result = opj::run_monte_carlo(
        spec, methods, flags.config, threads, !errors_out.empty());
    for (const auto& [method, metrics] : result.metrics) {
      append_metric_row(out, scenario, spec.estimand, method, metrics, reps,
                        spec.seed);
    }
    errors = result.errors;
  }

  if (!errors_out.empty()) {
    std::ostringstream errs;
    errs << "rep,method,error\n";
    for (const auto& record : errors) {
      errs << record.rep << "," << record.method << ","
           << opj::format_g6(record.error) << "\n";
    }
    write_output(errs.str(), errors_out);
  }
  write_output(out.str(), flags.out);
  return 0;
}

int run_strata(const std::string& data_path, const std::string& rule,
               int num_strata, const std::string& psf_column,
               const std::string& out_path, const std::string& grid_out) {
  const opj::ExperimentData data = opj::read_experiment_csv_file(data_path);

  std::vector<double> psf;
  if (psf_column == "yhat0") {
    psf = opj::predict(opj::fit_control_model(data), data);
  } else if (psf_column == "y") {
    psf = data.y;
  } else if (psf_column.size() > 1 && psf_column[0] == 'x') {
    const int j = std::atoi(psf_column.c_str() + 1);
    if (j < 1 || j > data.q()) {
      opj::fail(ErrorCode::kInvalidConfig,
                "psf column " + psf_column + " out of range");
    }
    psf.resize(data.n());
    for (int i = 0; i < data.n(); ++i) psf[i] = data.x(i, j - 1);
  } else {
    opj::fail(ErrorCode::kInvalidConfig, "psf must be yhat0, y or x<j>");
  }

  opj::StrataBoundaries boundaries;
  if (rule == "root-cum") {
    const opj::KdeModel kde = opj::kde_fit(psf);
    boundaries = opj::root_cum_boundaries(kde, num_strata);
    if (!grid_out.empty()) {
      std::ostringstream grid;
      grid << "grid,density\n";
      for (size_t i = 0; i < kde.grid.size(); ++i) {
        grid << opj::format_g6(kde.grid[i]) << ","
             << opj::format_g6(kde.density[i]) << "\n";
      }
      write_output(grid.str(), grid_out);
    }
  } else if (rule == "quantile") {
    boundaries = opj::quantile_boundaries(psf, num_strata);
  } else {
    boundaries = opj::class_boundaries(psf);
  }

  const opj::StrataAssignment assignment =
      opj::assign(boundaries, psf, data.w);
  std::ostringstream out;
  out << "stratum,lower,upper,n,n0,n1\n";
  for (int k = 0; k < assignment.num_strata(); ++k) {
    out << (k + 1) << "," << opj::format_g6(boundaries.cuts[k]) << ","
        << opj::format_g6(boundaries.cuts[k + 1]) << "," << assignment.count[k]
        << "," << assignment.count0[k] << "," << assignment.count1[k] << "\n";
  }
  write_output(out.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Out-of-bag post-stratified jackknife treatment-effect toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML file");

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "Estimate a treatment effect from an experiment CSV");
  std::string analyze_data, analyze_method = "opj", trace_out;
  CommonFlags analyze_flags;
  analyze->add_option("--data", analyze_data, "Input CSV (w,y,x1,...,xq)")
      ->required();
  analyze->add_option("--method", analyze_method, "Estimator")
      ->check(CLI::IsMember({"base", "impute", "opj"}));
  analyze->add_option("--estimand", analyze_flags.estimand, "Estimand")
      ->transform(CLI::CheckedTransformer(kEstimands, CLI::ignore_case));
  analyze->add_option("--out", analyze_flags.out, "Write the report here");
  analyze->add_option("--trace-out", trace_out,
                      "Write per-replicate jackknife traces (opj only)");
  add_jackknife_flags(analyze, &analyze_flags);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Run a Monte Carlo scenario and emit a metrics table");
  std::string scenario, errors_out;
  int reps = 2000, threads = 0;
  CommonFlags simulate_flags;
  simulate->add_option("--scenario", scenario, "Scenario name")
      ->required()
      ->check(CLI::IsMember({"independent", "lin-lin", "lin-const",
                             "quad-quad", "quad-const", "naive-psf"}));
  simulate->add_option("--estimand", simulate_flags.estimand, "Estimand")
      ->transform(CLI::CheckedTransformer(kEstimands, CLI::ignore_case));
  simulate->add_option("--reps", reps, "Monte Carlo replications")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", threads,
                       "Worker threads (0 = hardware concurrency)");
  simulate->add_option("--out", simulate_flags.out, "Write the table here");
  simulate->add_option("--errors-out", errors_out,
                       "Write per-replication errors (rep,method,error)");
  add_jackknife_flags(simulate, &simulate_flags);

  // strata
  auto* strata = app.add_subcommand(
      "strata", "Export strata boundaries and per-stratum counts");
  std::string strata_data, rule = "root-cum", psf_column = "yhat0";
  std::string strata_out, grid_out;
  int strata_k = 5;
  strata->add_option("--data", strata_data, "Input CSV (w,y,x1,...,xq)")
      ->required();
  strata->add_option("--rule", rule, "Boundary rule")
      ->check(CLI::IsMember({"root-cum", "quantile", "class"}));
  strata->add_option("--k", strata_k, "Number of strata (root-cum, quantile)")
      ->check(CLI::Range(1, 1000000));
  strata->add_option("--psf", psf_column,
                     "Stratification values: yhat0, y or x<j>");
  strata->add_option("--out", strata_out, "Write the strata table here");
  strata->add_option("--grid-out", grid_out,
                     "Write the KDE grid/density pairs here (root-cum)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (analyze->parsed()) {
      return run_analyze(analyze_data, analyze_method, analyze_flags,
                         trace_out);
    }
    if (simulate->parsed()) {
      return run_simulate(scenario, simulate_flags, reps, threads, errors_out);
    }
    return run_strata(strata_data, rule, strata_k, psf_column, strata_out,
                      grid_out);
  } catch (const opj::Error& e) {
    std::cerr << "error:" << opj::error_code_name(e.code()) << ": " << e.what()
              << "\n";
    return opj::is_input_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 3;
  }
}
