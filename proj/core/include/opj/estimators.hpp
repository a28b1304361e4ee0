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
#ifndef OPJ_CORE_ESTIMATORS_H_
#define OPJ_CORE_ESTIMATORS_H_

#include <span>
#include <vector>

#include "opj/stratify.hpp"
#include "opj/types.hpp"

namespace opj {

// Per-stratum weights p_k = n_k / N and arm-wise outcome means. A mean for an
// empty (stratum, arm) cell is NaN; downstream consumers must merge or reject.
struct StrataSummary {
  std::vector<double> weight;
  std::vector<int> count0;
  std::vector<int> count1;
  std::vector<double> mean0;
  std::vector<double> mean1;
  int total = 0;

  int num_strata() const { return static_cast<int>(weight.size()); }
  bool has_empty_cell() const;
};

// g(arm-0 mean, arm-1 mean) over all units.
double baseline_estimate(const ExperimentData& data, Estimand estimand);

// Closed-form SE of the baseline estimate: sqrt(s0^2/N0 + s1^2/N1) for the
// difference, delta-method for the ratio. Requires >= 2 units per arm.
double baseline_se(const ExperimentData& data, Estimand estimand);

// Regression imputation: both potential outcomes of every unit are predicted
// from the two arm models and g is applied to the mean imputed outcomes,
// g(mean Yhat(0), mean Yhat(1)).
double imputation_estimate(const ExperimentData& data, Estimand estimand);

StrataSummary strata_summary(const ExperimentData& data,
                             const StrataAssignment& assignment);

// Lower-level form used by the jackknife engine on retained subsets.
StrataSummary strata_summary(std::span<const int> labels, int num_strata,
                             std::span<const double> y,
                             std::span<const int> w);

// g(sum_k p_k mean_k(0), sum_k p_k mean_k(1)). Throws kEmptyCell when any
// stratum lacks one arm.
double post_stratified_estimate(const StrataSummary& summary,
                                Estimand estimand);

// Observed-outcome variance diagnostic: per-(stratum, arm) sample variances
// and the per-arm between-strata variance
// (1/(N-1)) sum_k n_k (mean_k(w) - mean(w))^2. Cells with fewer than two
// units in the arm report NaN. Diagnostic only, never used in estimation.
struct VarianceDecomposition {
  std::vector<double> within0;
  std::vector<double> within1;
  double between0 = 0.0;
  double between1 = 0.0;
};

VarianceDecomposition variance_decomposition(const ExperimentData& data,
                                             const StrataAssignment& assignment);

}  // namespace opj

#endif  // OPJ_CORE_ESTIMATORS_H_
