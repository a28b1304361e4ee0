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
#ifndef OPJ_CORE_JACKKNIFE_H_
#define OPJ_CORE_JACKKNIFE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "opj/estimators.hpp"
#include "opj/rng.hpp"
#include "opj/stratify.hpp"
#include "opj/types.hpp"

namespace opj {

// Which units feed the strata-boundary construction in each iteration.
//   kDeletedBuckets:  the D deleted buckets (out-of-bag construction).
//   kRetainedBuckets: the B-D retained buckets.
//   kFullSample:      all units, boundaries computed once outside the loop.
enum class BoundarySource { kDeletedBuckets, kRetainedBuckets, kFullSample };

// Boundary rule applied to the stratification values.
enum class BoundaryRule { kRootCum, kQuantile, kClass };

struct JackknifeConfig {
  int buckets = 20;      // B
  int deleted = 4;       // D
  int iterations = 60;   // M
  int num_strata = 5;    // K
  double alpha = 0.05;
  uint64_t seed = 0;
  BoundarySource boundary_source = BoundarySource::kFullSample;
};

void validate(const JackknifeConfig& config);

// Per-unit bucket labels in 1..B; within each arm, sizes differ by at most 1.
struct BucketPartition {
  std::vector<int> bucket;
  int num_buckets = 0;
};

struct ReplicateTrace {
  int iteration = 0;
  std::vector<int> deleted_buckets;  // sorted, size D
  double estimate = 0.0;
  std::vector<double> interior_cuts;  // boundaries used by this replicate
  int merges = 0;
  int effective_strata = 0;  // strata remaining after merging
};

struct OpjResult {
  EstimateReport report;
  BucketPartition partition;
  std::vector<ReplicateTrace> traces;  // populated when keep_traces
  std::vector<int> inclusion_count;    // per unit: iterations spent in the estimation set
  int degenerate_replicates = 0;       // replicates that collapsed to a single stratum
};

// Shuffles each arm independently and deals units round-robin into buckets
// 1..B. Throws kArmSmallerThanBuckets when an arm has fewer than B units.
BucketPartition partition_buckets(const ExperimentData& data, int num_buckets,
                                  RngStream& rng);

// Delete-D jackknife standard error
//   sqrt( (B-D)/(D*M) * sum_m (est_m - mean)^2 ).
double jackknife_se(std::span<const double> replicate_estimates,
                    int num_buckets, int num_deleted);

// Student-t quantile, prob in (0, 1).
double student_t_quantile(double dof, double prob);

// point +/- t(B-1, 1-alpha/2) * se.
std::pair<double, double> confidence_interval(double point, double se,
                                              int num_buckets, double alpha);

// Merges strata lacking one arm into the adjacent stratum with the smaller
// total count (ties toward the lower index) until every stratum has both
// arms; merge_count reports the number of merges performed.
StrataSummary merge_degenerate_strata(StrataSummary summary, int* merge_count);

// The full out-of-bag post-stratified jackknife: control model fit once on
// all control units, PSF predicted for every unit, then M delete-D
// iterations aggregate into the point estimate, SE and CI.
OpjResult opj_run(const ExperimentData& data, Estimand estimand,
                  const JackknifeConfig& config, bool keep_traces = false);

// Same engine with a caller-supplied PSF and boundary rule (used by the
// naive single-covariate comparison).
OpjResult opj_run_with_psf(const ExperimentData& data, Estimand estimand,
                           const JackknifeConfig& config,
                           std::span<const double> psf, BoundaryRule rule,
                           bool keep_traces = false);

// Baseline report: closed-form SE and a normal-quantile CI.
EstimateReport baseline_report(const ExperimentData& data, Estimand estimand,
                               double alpha);

// Imputation report: full-sample point estimate with a delete-D jackknife SE
// in which both arm models are refit on each replicate's retained buckets.
EstimateReport imputation_report(const ExperimentData& data, Estimand estimand,
                                 const JackknifeConfig& config);

}  // namespace opj

#endif  // OPJ_CORE_JACKKNIFE_H_
