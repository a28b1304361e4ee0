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
#include "opj/types.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "opj/error.hpp"

namespace opj {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kInvalidTreatmentIndicator: return "invalid_treatment_indicator";
    case ErrorCode::kEmptyArm: return "empty_arm";
    case ErrorCode::kNonFiniteValue: return "non_finite_value";
    case ErrorCode::kCsvFormat: return "csv_format";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kInvalidScenario: return "invalid_scenario";
    case ErrorCode::kDivisionByZero: return "division_by_zero";
    case ErrorCode::kRankDeficient: return "rank_deficient";
    case ErrorCode::kSubsetTooSmall: return "subset_too_small";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kDegenerateSample: return "degenerate_sample";
    case ErrorCode::kTooFewDistinctValues: return "too_few_distinct_values";
    case ErrorCode::kTooManyClasses: return "too_many_classes";
    case ErrorCode::kEmptyCell: return "empty_cell";
    case ErrorCode::kArmSmallerThanBuckets: return "arm_smaller_than_buckets";
  }
  return "unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kInvalidTreatmentIndicator:
    case ErrorCode::kEmptyArm:
    case ErrorCode::kNonFiniteValue:
    case ErrorCode::kCsvFormat:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidScenario:
      return true;
    default:
      return false;
  }
}

const char* estimand_name(Estimand estimand) {
  return estimand == Estimand::kDifference ? "difference" : "ratio";
}

const char* method_name(Method method) {
  switch (method) {
    case Method::kBase: return "base";
    case Method::kImpute: return "impute";
    case Method::kOpj: return "opj";
    case Method::kNaivePs: return "naive_ps";
  }
  return "unknown";
}

double g_apply(Estimand estimand, double mean0, double mean1) {
  if (estimand == Estimand::kDifference) {
    return mean1 - mean0;
  }
  double guard = 1e-12 * std::max(1.0, std::abs(mean1));
  if (std::abs(mean0) < guard) {
    fail(ErrorCode::kDivisionByZero,
         "ratio estimand with control mean " + std::to_string(mean0) +
             " below the zero guard");
  }
  return mean1 / mean0;
}

int ExperimentData::arm_count(int arm) const {
  int count = 0;
  for (int value : w) {
    if (value == arm) ++count;
  }
  return count;
}

std::vector<int> ExperimentData::arm_indices(int arm) const {
  std::vector<int> indices;
  for (int i = 0; i < n(); ++i) {
    if (w[i] == arm) indices.push_back(i);
  }
  return indices;
}

double ExperimentData::arm_mean(int arm) const {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < n(); ++i) {
    if (w[i] == arm) {
      sum += y[i];
      ++count;
    }
  }
  return sum / count;
}

void validate(const ExperimentData& data) {
  const auto n = data.y.size();
  if (n < 2) {
    fail(ErrorCode::kShapeMismatch, "need at least 2 units, got " +
                                        std::to_string(n));
  }
  if (data.w.size() != n || static_cast<size_t>(data.x.rows()) != n) {
    fail(ErrorCode::kShapeMismatch,
         "row counts differ: y=" + std::to_string(n) +
             " w=" + std::to_string(data.w.size()) +
             " x=" + std::to_string(data.x.rows()));
  }
  int n1 = 0;
  for (size_t i = 0; i < n; ++i) {
    if (data.w[i] != 0 && data.w[i] != 1) {
      fail(ErrorCode::kInvalidTreatmentIndicator,
           "w[" + std::to_string(i) + "] = " + std::to_string(data.w[i]));
    }
    n1 += data.w[i];
  }
  if (n1 == 0 || static_cast<size_t>(n1) == n) {
    fail(ErrorCode::kEmptyArm, n1 == 0 ? "no treated units" : "no control units");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(data.y[i])) {
      fail(ErrorCode::kNonFiniteValue, "y[" + std::to_string(i) + "]");
    }
  }
  if (!data.x.allFinite()) {
    fail(ErrorCode::kNonFiniteValue, "covariate matrix");
  }
}

EstimateReport make_report(double point, double se, double ci_low,
                           double ci_high, Method method, Estimand estimand,
                           double alpha) {
  if (!(se >= 0.0) || !(ci_low <= point && point <= ci_high)) {
    fail(ErrorCode::kInvalidConfig, "malformed estimate report");
  }
  EstimateReport report;
  report.point = point;
  report.se = se;
  report.ci_low = ci_low;
  report.ci_high = ci_high;
  report.method = method;
  report.estimand = estimand;
  report.alpha = alpha;
  return report;
}

}  // namespace opj
