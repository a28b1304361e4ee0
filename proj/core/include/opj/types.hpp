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
#ifndef OPJ_CORE_TYPES_H_
#define OPJ_CORE_TYPES_H_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "opj/error.hpp"

namespace opj {

// Treatment-effect estimand tau = g(EY(0), EY(1)).
enum class Estimand { kDifference, kRatio };

const char* estimand_name(Estimand estimand);

// g(mean0, mean1): mean1 - mean0 for kDifference, mean1 / mean0 for kRatio.
// Throws kDivisionByZero for a ratio with |mean0| below the zero guard
// 1e-12 * max(1, |mean1|).
double g_apply(Estimand estimand, double mean0, double mean1);

// A two-arm randomized experiment: outcomes y, treatment indicators w in
// {0,1} and an N x q covariate matrix without an intercept column (the
// regression module prepends the intercept).
struct ExperimentData {
  std::vector<double> y;
  std::vector<int> w;
  Eigen::MatrixXd x;

  int n() const { return static_cast<int>(y.size()); }
  int q() const { return static_cast<int>(x.cols()); }

  int arm_count(int arm) const;
  std::vector<int> arm_indices(int arm) const;
  double arm_mean(int arm) const;
};

// Checks all ExperimentData invariants: consistent row counts with N >= 2,
// indicators in {0,1}, both arms non-empty, all entries finite.
void validate(const ExperimentData& data);

enum class Method { kBase, kImpute, kOpj, kNaivePs };

const char* method_name(Method method);

struct EstimateReport {
  double point = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Method method = Method::kBase;
  Estimand estimand = Estimand::kDifference;
  double alpha = 0.05;
  std::map<std::string, std::string> config_echo;
};

// Constructs a report and verifies se >= 0 and ci_low <= point <= ci_high.
EstimateReport make_report(double point, double se, double ci_low,
                           double ci_high, Method method, Estimand estimand,
                           double alpha);

}  // namespace opj

#endif  // OPJ_CORE_TYPES_H_
