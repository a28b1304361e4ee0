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
#include "opj/simulation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "opj/error.hpp"
#include "opj/regression.hpp"

namespace opj {

namespace {

const double kX3Levels[5] = {-1.4142135623730951, -0.7071067811865476, 0.0,
                             0.7071067811865476, 1.4142135623730951};

struct RepEstimate {
  double point = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Runs fn(0..count-1) on up to `threads` workers. Work items only write to
// their own output slot, so results do not depend on scheduling.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentData generate_dataset(const ScenarioSpec& spec, RngStream& rng) {
  const int n = spec.n0 + spec.n1;
  ExperimentData data;
  data.x = gen_covariates(n, rng);
  data.w.assign(n, 0);
  for (int i = spec.n0; i < n; ++i) data.w[i] = 1;
  rng.shuffle(data.w);
  data.y = gen_outcome(spec, data.x, data.w, rng);
  return data;
}

uint64_t rep_seed(const ScenarioSpec& spec, const char* purpose, int rep) {
  return mix64(spec.seed ^ stream_id(purpose, static_cast<uint64_t>(rep)));
}

SimulationMetrics metrics_from(const std::vector<RepEstimate>& rows,
                               double tau) {
  std::vector<double> points, ses, los, his;
  points.reserve(rows.size());
  ses.reserve(rows.size());
  los.reserve(rows.size());
  his.reserve(rows.size());
  for (const auto& row : rows) {
    points.push_back(row.point);
    ses.push_back(row.se);
    los.push_back(row.lo);
    his.push_back(row.hi);
  }
  return aggregate_metrics(points, ses, los, his, tau);
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  const bool legal =
      (spec.outcome == OutcomeForm::kIndependent &&
       spec.effect == EffectForm::kNone) ||
      (spec.outcome == OutcomeForm::kLinear &&
       (spec.effect == EffectForm::kLinear ||
        spec.effect == EffectForm::kConstant)) ||
      (spec.outcome == OutcomeForm::kQuadratic &&
       (spec.effect == EffectForm::kQuadratic ||
        spec.effect == EffectForm::kConstant));
  if (!legal) {
    fail(ErrorCode::kInvalidScenario, "illegal (outcome, effect) pair");
  }
  if (spec.outcome == OutcomeForm::kIndependent &&
      spec.estimand == Estimand::kRatio) {
    fail(ErrorCode::kInvalidScenario,
         "ratio estimand is undefined for the independent outcome (EY = 0)");
  }
  if (spec.n0 < 1 || spec.n1 < 1 || spec.reps < 1) {
    fail(ErrorCode::kInvalidScenario, "n0, n1 and reps must be positive");
  }
}

SimulationMetrics aggregate_metrics(std::span<const double> points,
                                    std::span<const double> ses,
                                    std::span<const double> ci_lows,
                                    std::span<const double> ci_highs,
                                    double tau) {
  const size_t n = points.size();
  if (n == 0 || ses.size() != n || ci_lows.size() != n ||
      ci_highs.size() != n) {
    fail(ErrorCode::kInvalidConfig, "metric inputs must have equal length >= 1");
  }
  SimulationMetrics metrics;
  double bias = 0.0, se = 0.0, mse = 0.0;
  int covered = 0;
  for (size_t i = 0; i < n; ++i) {
    bias += points[i] - tau;
    se += ses[i];
    mse += (points[i] - tau) * (points[i] - tau);
    if (ci_lows[i] <= tau && tau <= ci_highs[i]) ++covered;
  }
  metrics.mean_bias = bias / n;
  metrics.mean_se = se / n;
  metrics.rmse = std::sqrt(mse / n);
  metrics.coverage = static_cast<double>(covered) / n;
  return metrics;
}

Eigen::MatrixXd gen_covariates(int n, RngStream& rng) {
  if (n < 1) {
    fail(ErrorCode::kInvalidConfig, "need n >= 1 covariate rows");
  }
  Eigen::MatrixXd x(n, 3);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.next_normal();
    x(i, 1) = rng.next_normal();
    x(i, 2) = kX3Levels[rng.next_below(5)];
  }
  return x;
}

double mean_outcome(const ScenarioSpec& spec, double x1, double x2, double x3,
                    int w) {
  double base = 0.0;
  switch (spec.outcome) {
    case OutcomeForm::kIndependent:
      base = 0.0;
      break;
    case OutcomeForm::kLinear:
      base = 1.0 + 3.0 * x1 - 2.0 * x2 + x3;
      break;
    case OutcomeForm::kQuadratic:
      base = 1.0 + 3.0 * x1 - 2.0 * x2 + x3 + 2.0 * x1 * x1 +
             3.0 * x2 * x2 + x3 * x3;
      break;
  }
  double effect = 0.0;
  switch (spec.effect) {
    case EffectForm::kNone:
      effect = 0.0;
      break;
    case EffectForm::kLinear:
      effect = 0.2 * (1.0 + x1 + 2.0 * x2 + 3.0 * x3);
      break;
    case EffectForm::kQuadratic:
      effect = 0.2 * (1.0 + x1 + 2.0 * x2 + 3.0 * x3 - x1 * x1 -
                      2.0 * x2 * x2 + 3.0 * x3 * x3);
      break;
    case EffectForm::kConstant:
      effect = 0.2;
      break;
  }
  return base + w * effect;
}

std::vector<double> gen_outcome(const ScenarioSpec& spec,
                                const Eigen::MatrixXd& x,
                                const std::vector<int>& w, RngStream& rng) {
  const int n = static_cast<int>(x.rows());
  if (static_cast<int>(w.size()) != n) {
    fail(ErrorCode::kShapeMismatch, "w and x row counts differ");
  }
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = mean_outcome(spec, x(i, 0), x(i, 1), x(i, 2), w[i]) +
           rng.next_normal();
  }
  return y;
}

double true_tau(const ScenarioSpec& spec) {
  validate(spec);
  // E[effect] = 0.2 for every effect form (linear and quadratic effect terms
  // have mean zero: EX_j = 0, EX1^2 = EX2^2 = EX3^2 = 1 and
  // -1 - 2 + 3 = 0); E[base] is 0, 1 or 7.
  if (spec.estimand == Estimand::kDifference) {
    return spec.outcome == OutcomeForm::kIndependent ? 0.0 : 0.2;
  }
  const double base_mean = spec.outcome == OutcomeForm::kLinear ? 1.0 : 7.0;
  return (base_mean + 0.2) / base_mean;
}

MonteCarloResult run_monte_carlo(const ScenarioSpec& spec,
                                 std::span<const Method> methods,
                                 const JackknifeConfig& config,
                                 int threads, bool collect_errors) {
  validate(spec);
  validate(config);
  const double tau = true_tau(spec);
  const int num_methods = static_cast<int>(methods.size());

  std::vector<std::vector<RepEstimate>> rows(
      num_methods, std::vector<RepEstimate>(spec.reps));

  parallel_for(spec.reps, threads, [&](int rep) {
    RngStream data_rng(spec.seed, stream_id("datagen", rep));
    ExperimentData data;
    try {
      data = generate_dataset(spec, data_rng);
      for (int j = 0; j < num_methods; ++j) {
        EstimateReport report;
        switch (methods[j]) {
          case Method::kBase:
            report = baseline_report(data, spec.estimand, config.alpha);
            break;
          case Method::kImpute: {
            JackknifeConfig rep_config = config;
            rep_config.seed = rep_seed(spec, "impute", rep);
            report = imputation_report(data, spec.estimand, rep_config);
            break;
          }
          case Method::kOpj:
          case Method::kNaivePs: {
            JackknifeConfig rep_config = config;
            rep_config.seed = rep_seed(spec, "opj", rep);
            report = opj_run(data, spec.estimand, rep_config).report;
            break;
          }
        }
        rows[j][rep] = {report.point, report.se, report.ci_low, report.ci_high};
      }
    } catch (const Error& e) {
      throw Error(e.code(), "replication " + std::to_string(rep) + " (seed " +
                                std::to_string(spec.seed) + "): " + e.what());
    }
  });

  MonteCarloResult result;
  for (int j = 0; j < num_methods; ++j) {
    result.metrics.emplace_back(method_name(methods[j]),
                                metrics_from(rows[j], tau));
  }
  if (collect_errors) {
    for (int rep = 0; rep < spec.reps; ++rep) {
      for (int j = 0; j < num_methods; ++j) {
        result.errors.push_back(
            {rep, method_name(methods[j]), rows[j][rep].point - tau});
      }
    }
  }
  return result;
}

SimulationMetrics naive_psf_run(const ScenarioSpec& spec, int psf_index,
                                const JackknifeConfig& config, int threads,
                                std::vector<RepRecord>* errors) {
  validate(spec);
  validate(config);
  if (spec.outcome != OutcomeForm::kQuadratic ||
      spec.effect != EffectForm::kQuadratic ||
      spec.estimand != Estimand::kDifference) {
    fail(ErrorCode::kInvalidScenario,
         "the naive PSF comparison is defined for the quadratic/quadratic "
         "difference scenario");
  }
  if (psf_index < 0 || psf_index > 3) {
    fail(ErrorCode::kInvalidConfig, "psf_index must lie in 0..3");
  }
  if (psf_index == 0) {
    Method method = Method::kOpj;
    auto result =
        run_monte_carlo(spec, {&method, 1}, config, threads, errors != nullptr);
    if (errors != nullptr) {
      for (auto& record : result.errors) {
        record.method = "yhat0";
        errors->push_back(std::move(record));
      }
    }
    return result.metrics.front().second;
  }

  const double tau = true_tau(spec);
  const std::string label = "x" + std::to_string(psf_index);
  const BoundaryRule rule =
      psf_index == 3 ? BoundaryRule::kClass : BoundaryRule::kQuantile;
  std::vector<RepEstimate> rows(spec.reps);

  parallel_for(spec.reps, threads, [&](int rep) {
    RngStream data_rng(spec.seed, stream_id("datagen", rep));
    try {
      const ExperimentData data = generate_dataset(spec, data_rng);
      std::vector<double> psf(data.n());
      for (int i = 0; i < data.n(); ++i) psf[i] = data.x(i, psf_index - 1);
      JackknifeConfig rep_config = config;
      rep_config.seed = rep_seed(spec, label.c_str(), rep);
      const EstimateReport report =
          opj_run_with_psf(data, spec.estimand, rep_config, psf, rule).report;
      rows[rep] = {report.point, report.se, report.ci_low, report.ci_high};
    } catch (const Error& e) {
      throw Error(e.code(), "replication " + std::to_string(rep) + " (seed " +
                                std::to_string(spec.seed) + "): " + e.what());
    }
  });

  if (errors != nullptr) {
    for (int rep = 0; rep < spec.reps; ++rep) {
      errors->push_back({rep, label, rows[rep].point - tau});
    }
  }
  return metrics_from(rows, tau);
}

}  // namespace opj
