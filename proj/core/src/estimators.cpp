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
#include "opj/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "opj/error.hpp"
#include "opj/regression.hpp"

namespace opj {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double arm_sample_variance(const ExperimentData& data, int arm) {
  const double mean = data.arm_mean(arm);
  double ss = 0.0;
  int count = 0;
  for (int i = 0; i < data.n(); ++i) {
    if (data.w[i] == arm) {
      ss += (data.y[i] - mean) * (data.y[i] - mean);
      ++count;
    }
  }
  return ss / (count - 1);
}

}  // namespace

bool StrataSummary::has_empty_cell() const {
  for (int k = 0; k < num_strata(); ++k) {
    if (count0[k] == 0 || count1[k] == 0) return true;
  }
  return false;
}

double baseline_estimate(const ExperimentData& data, Estimand estimand) {
  return g_apply(estimand, data.arm_mean(0), data.arm_mean(1));
}

double baseline_se(const ExperimentData& data, Estimand estimand) {
  const int n0 = data.arm_count(0);
  const int n1 = data.arm_count(1);
  if (n0 < 2 || n1 < 2) {
    fail(ErrorCode::kSubsetTooSmall, "baseline SE needs >= 2 units per arm");
  }
  const double var0 = arm_sample_variance(data, 0);
  const double var1 = arm_sample_variance(data, 1);
  if (estimand == Estimand::kDifference) {
    return std::sqrt(var0 / n0 + var1 / n1);
  }
  const double mean0 = data.arm_mean(0);
  const double mean1 = data.arm_mean(1);
  if (std::abs(mean0) < 1e-12 * std::max(1.0, std::abs(mean1))) {
    fail(ErrorCode::kDivisionByZero, "ratio SE with near-zero control mean");
  }
  return std::sqrt(var1 / (n1 * mean0 * mean0) +
                   mean1 * mean1 * var0 / (n0 * mean0 * mean0 * mean0 * mean0));
}

double imputation_estimate(const ExperimentData& data, Estimand estimand) {
  auto [control, treated] = fit_arm_models(data);
  const auto pred0 = predict(control, data);
  const auto pred1 = predict(treated, data);
  double sum0 = 0.0, sum1 = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    sum0 += pred0[i];
    sum1 += pred1[i];
  }
  return g_apply(estimand, sum0 / data.n(), sum1 / data.n());
}

StrataSummary strata_summary(std::span<const int> labels, int num_strata,
                             std::span<const double> y,
                             std::span<const int> w) {
  StrataSummary summary;
  summary.total = static_cast<int>(labels.size());
  summary.count0.assign(num_strata, 0);
  summary.count1.assign(num_strata, 0);
  std::vector<double> sum0(num_strata, 0.0);
  std::vector<double> sum1(num_strata, 0.0);
  for (size_t i = 0; i < labels.size(); ++i) {
    const int k = labels[i] - 1;
    if (w[i] == 0) {
      ++summary.count0[k];
      sum0[k] += y[i];
    } else {
      ++summary.count1[k];
      sum1[k] += y[i];
    }
  }
  summary.weight.resize(num_strata);
  summary.mean0.resize(num_strata);
  summary.mean1.resize(num_strata);
  for (int k = 0; k < num_strata; ++k) {
    const int nk = summary.count0[k] + summary.count1[k];
    summary.weight[k] = static_cast<double>(nk) / summary.total;
    summary.mean0[k] = summary.count0[k] > 0 ? sum0[k] / summary.count0[k] : kNan;
    summary.mean1[k] = summary.count1[k] > 0 ? sum1[k] / summary.count1[k] : kNan;
  }
  return summary;
}

StrataSummary strata_summary(const ExperimentData& data,
                             const StrataAssignment& assignment) {
  return strata_summary(assignment.labels, assignment.num_strata(), data.y,
                        data.w);
}

double post_stratified_estimate(const StrataSummary& summary,
                                Estimand estimand) {
  double stratified0 = 0.0, stratified1 = 0.0;
  for (int k = 0; k < summary.num_strata(); ++k) {
    if (summary.count0[k] == 0 || summary.count1[k] == 0) {
      fail(ErrorCode::kEmptyCell,
           "stratum " + std::to_string(k + 1) + " lacks one arm");
    }
    stratified0 += summary.weight[k] * summary.mean0[k];
    stratified1 += summary.weight[k] * summary.mean1[k];
  }
  return g_apply(estimand, stratified0, stratified1);
}

VarianceDecomposition variance_decomposition(
    const ExperimentData& data, const StrataAssignment& assignment) {
  const int num_strata = assignment.num_strata();
  const StrataSummary summary = strata_summary(data, assignment);

  VarianceDecomposition decomposition;
  decomposition.within0.assign(num_strata, kNan);
  decomposition.within1.assign(num_strata, kNan);

  std::vector<double> ss0(num_strata, 0.0);
  std::vector<double> ss1(num_strata, 0.0);
  for (int i = 0; i < data.n(); ++i) {
    const int k = assignment.labels[i] - 1;
    if (data.w[i] == 0) {
      const double d = data.y[i] - summary.mean0[k];
      ss0[k] += d * d;
    } else {
      const double d = data.y[i] - summary.mean1[k];
      ss1[k] += d * d;
    }
  }
  for (int k = 0; k < num_strata; ++k) {
    if (summary.count0[k] >= 2) {
      decomposition.within0[k] = ss0[k] / (summary.count0[k] - 1);
    }
    if (summary.count1[k] >= 2) {
      decomposition.within1[k] = ss1[k] / (summary.count1[k] - 1);
    }
  }

  const double grand0 = data.arm_mean(0);
  const double grand1 = data.arm_mean(1);
  double between0 = 0.0, between1 = 0.0;
  for (int k = 0; k < num_strata; ++k) {
    const int nk = assignment.count[k];
    if (summary.count0[k] > 0) {
      between0 += nk * (summary.mean0[k] - grand0) * (summary.mean0[k] - grand0);
    }
    if (summary.count1[k] > 0) {
      between1 += nk * (summary.mean1[k] - grand1) * (summary.mean1[k] - grand1);
    }
  }
  decomposition.between0 = between0 / (data.n() - 1);
  decomposition.between1 = between1 / (data.n() - 1);
  return decomposition;
}

}  // namespace opj
