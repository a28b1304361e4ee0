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
#ifndef OPJ_CORE_SIMULATION_H_
#define OPJ_CORE_SIMULATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opj/jackknife.hpp"
#include "opj/rng.hpp"
#include "opj/types.hpp"

namespace opj {

enum class OutcomeForm { kIndependent, kLinear, kQuadratic };
enum class EffectForm { kNone, kLinear, kQuadratic, kConstant };

// A data-generating process plus Monte Carlo run parameters. Legal
// (outcome, effect) pairs: (Independent, None), (Linear, Linear),
// (Linear, Constant), (Quadratic, Quadratic), (Quadratic, Constant).
struct ScenarioSpec {
  OutcomeForm outcome = OutcomeForm::kLinear;
  EffectForm effect = EffectForm::kLinear;
  Estimand estimand = Estimand::kDifference;
  int n0 = 1000;
  int n1 = 1000;
  int reps = 2000;
  uint64_t seed = 0;
};

void validate(const ScenarioSpec& spec);

struct SimulationMetrics {
  double mean_bias = 0.0;
  double mean_se = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
};

// mean_bias = mean(point - tau), mean_se = mean(se),
// rmse = sqrt(mean((point - tau)^2)), coverage = fraction of CIs holding tau.
SimulationMetrics aggregate_metrics(std::span<const double> points,
                                    std::span<const double> ses,
                                    std::span<const double> ci_lows,
                                    std::span<const double> ci_highs,
                                    double tau);

// n x 3 covariates: X1, X2 ~ N(0,1); X3 uniform on
// {-sqrt2, -sqrt2/2, 0, sqrt2/2, sqrt2}.
Eigen::MatrixXd gen_covariates(int n, RngStream& rng);

// E[Y | X = (x1,x2,x3), W = w]; the deterministic part of the DGP.
double mean_outcome(const ScenarioSpec& spec, double x1, double x2, double x3,
                    int w);

// Y_i = mean_outcome(x_i, w_i) + eps_i with eps ~ N(0,1) iid.
std::vector<double> gen_outcome(const ScenarioSpec& spec,
                                const Eigen::MatrixXd& x,
                                const std::vector<int>& w, RngStream& rng);

// Analytic population effect g(EY(0), EY(1)).
double true_tau(const ScenarioSpec& spec);

// One per-replication estimator-error record (point - tau).
struct RepRecord {
  int rep = 0;
  std::string method;
  double error = 0.0;
};

struct MonteCarloResult {
  std::vector<std::pair<std::string, SimulationMetrics>> metrics;
  std::vector<RepRecord> errors;  // populated when collect_errors
};

// Runs spec.reps replications; each replicate generates one dataset (complete
// randomization with exactly n0 controls, n1 treated) shared by all methods.
// Bit-reproducible for a fixed seed regardless of the thread count.
MonteCarloResult run_monte_carlo(const ScenarioSpec& spec,
                                 std::span<const Method> methods,
                                 const JackknifeConfig& config,
                                 int threads = 0,
                                 bool collect_errors = false);

// Naive post-stratification comparison: the PSF is covariate X_j
// (psf_index in 1..3) with quantile boundaries for X1/X2 and class
// boundaries for X3; psf_index 0 is the model-based PSF Yhat(0).
SimulationMetrics naive_psf_run(const ScenarioSpec& spec, int psf_index,
                                const JackknifeConfig& config, int threads = 0,
                                std::vector<RepRecord>* errors = nullptr);

}  // namespace opj

#endif  // OPJ_CORE_SIMULATION_H_
