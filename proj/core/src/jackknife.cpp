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
#include "opj/jackknife.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "opj/error.hpp"
#include "opj/regression.hpp"

namespace opj {

namespace {

// Aggregated per-stratum cell sums; exact merging needs sums, not means.
struct StratumCell {
  int count0 = 0;
  int count1 = 0;
  double sum0 = 0.0;
  double sum1 = 0.0;
};

std::string echo_value(uint64_t v) { return std::to_string(v); }

std::vector<int> draw_deleted_buckets(int num_buckets, int num_deleted,
                                      RngStream& rng) {
  std::vector<int> labels(num_buckets);
  std::iota(labels.begin(), labels.end(), 1);
  for (int j = 0; j < num_deleted; ++j) {
    int k = j + static_cast<int>(rng.next_below(num_buckets - j));
    std::swap(labels[j], labels[k]);
  }
  labels.resize(num_deleted);
  std::sort(labels.begin(), labels.end());
  return labels;
}

// Builds boundaries for one replicate. A degenerate (constant) sample cannot
// be stratified; the caller falls back to a single stratum, which makes the
// replicate the baseline estimate on its retained units.
StrataBoundaries build_boundaries(BoundaryRule rule,
                                  std::span<const double> values,
                                  int num_strata, bool* degenerate) {
  *degenerate = false;
  switch (rule) {
    case BoundaryRule::kRootCum:
      try {
        return root_cum_boundaries(kde_fit(values), num_strata);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateSample) throw;
        *degenerate = true;
        return StrataBoundaries{
            {-std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()}};
      }
    case BoundaryRule::kQuantile:
      return quantile_boundaries(values, num_strata);
    case BoundaryRule::kClass:
      return class_boundaries(values);
  }
  fail(ErrorCode::kInvalidConfig, "unknown boundary rule");
}

}  // namespace

void validate(const JackknifeConfig& config) {
  if (config.buckets < 2) {
    fail(ErrorCode::kInvalidConfig, "buckets must be >= 2");
  }
  if (config.deleted < 1 || config.deleted >= config.buckets) {
    fail(ErrorCode::kInvalidConfig, "deleted must satisfy 1 <= D < B");
  }
  if (config.iterations < 2) {
    fail(ErrorCode::kInvalidConfig, "iterations must be >= 2");
  }
  if (config.num_strata < 1) {
    fail(ErrorCode::kInvalidConfig, "num_strata must be >= 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    fail(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1)");
  }
}

BucketPartition partition_buckets(const ExperimentData& data, int num_buckets,
                                  RngStream& rng) {
  if (num_buckets < 2) {
    fail(ErrorCode::kInvalidConfig, "buckets must be >= 2");
  }
  BucketPartition partition;
  partition.num_buckets = num_buckets;
  partition.bucket.assign(data.n(), 0);
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<int> indices = data.arm_indices(arm);
    if (static_cast<int>(indices.size()) < num_buckets) {
      fail(ErrorCode::kArmSmallerThanBuckets,
           "arm " + std::to_string(arm) + " has " +
               std::to_string(indices.size()) + " units < B = " +
               std::to_string(num_buckets));
    }
    rng.shuffle(indices);
    for (size_t i = 0; i < indices.size(); ++i) {
      partition.bucket[indices[i]] =
          static_cast<int>(i % num_buckets) + 1;
    }
  }
  return partition;
}

double jackknife_se(std::span<const double> replicate_estimates,
                    int num_buckets, int num_deleted) {
  const size_t m = replicate_estimates.size();
  if (m < 2) {
    fail(ErrorCode::kInvalidConfig, "need at least 2 replicate estimates");
  }
  double mean = 0.0;
  for (double est : replicate_estimates) mean += est;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double est : replicate_estimates) ss += (est - mean) * (est - mean);
  const double scale = static_cast<double>(num_buckets - num_deleted) /
                       (static_cast<double>(num_deleted) * m);
  return std::sqrt(scale * ss);
}

double student_t_quantile(double dof, double prob) {
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

std::pair<double, double> confidence_interval(double point, double se,
                                              int num_buckets, double alpha) {
  const double mult = student_t_quantile(num_buckets - 1, 1.0 - alpha / 2.0);
  return {point - mult * se, point + mult * se};
}

StrataSummary merge_degenerate_strata(StrataSummary summary,
                                      int* merge_count) {
  int merges = 0;
  std::vector<StratumCell> cells(summary.num_strata());
  for (int k = 0; k < summary.num_strata(); ++k) {
    cells[k].count0 = summary.count0[k];
    cells[k].count1 = summary.count1[k];
    cells[k].sum0 = summary.count0[k] > 0
                        ? summary.mean0[k] * summary.count0[k]
                        : 0.0;
    cells[k].sum1 = summary.count1[k] > 0
                        ? summary.mean1[k] * summary.count1[k]
                        : 0.0;
  }

  while (cells.size() > 1) {
    int bad = -1;
    for (size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].count0 == 0 || cells[k].count1 == 0) {
        bad = static_cast<int>(k);
        break;
      }
    }
    if (bad < 0) break;
    int neighbor;
    if (bad == 0) {
      neighbor = 1;
    } else if (bad == static_cast<int>(cells.size()) - 1) {
      neighbor = bad - 1;
    } else {
      const int left = cells[bad - 1].count0 + cells[bad - 1].count1;
      const int right = cells[bad + 1].count0 + cells[bad + 1].count1;
      neighbor = left <= right ? bad - 1 : bad + 1;
    }
    cells[neighbor].count0 += cells[bad].count0;
    cells[neighbor].count1 += cells[bad].count1;
    cells[neighbor].sum0 += cells[bad].sum0;
    cells[neighbor].sum1 += cells[bad].sum1;
    cells.erase(cells.begin() + bad);
    ++merges;
  }

  StrataSummary merged;
  merged.total = summary.total;
  for (const auto& cell : cells) {
    merged.count0.push_back(cell.count0);
    merged.count1.push_back(cell.count1);
    merged.weight.push_back(
        static_cast<double>(cell.count0 + cell.count1) / summary.total);
    merged.mean0.push_back(cell.count0 > 0
                               ? cell.sum0 / cell.count0
                               : std::numeric_limits<double>::quiet_NaN());
    merged.mean1.push_back(cell.count1 > 0
                               ? cell.sum1 / cell.count1
                               : std::numeric_limits<double>::quiet_NaN());
  }
  if (merge_count != nullptr) *merge_count = merges;
  return merged;
}

OpjResult opj_run_with_psf(const ExperimentData& data, Estimand estimand,
                           const JackknifeConfig& config,
                           std::span<const double> psf, BoundaryRule rule,
                           bool keep_traces) {
  validate(data);
  validate(config);
  if (psf.size() != static_cast<size_t>(data.n())) {
    fail(ErrorCode::kDimensionMismatch, "PSF length differs from N");
  }

  OpjResult result;
  RngStream partition_rng(config.seed, stream_id("partition"));
  result.partition = partition_buckets(data, config.buckets, partition_rng);
  result.inclusion_count.assign(data.n(), 0);

  bool full_degenerate = false;
  StrataBoundaries full_boundaries;
  if (config.boundary_source == BoundarySource::kFullSample) {
    full_boundaries =
        build_boundaries(rule, psf, config.num_strata, &full_degenerate);
  }

  std::vector<double> estimates;
  estimates.reserve(config.iterations);
  std::vector<double> retained_psf, retained_y;
  std::vector<int> retained_w;
  std::vector<double> construction;

  for (int m = 1; m <= config.iterations; ++m) {
    RngStream iter_rng(config.seed, stream_id("iter", m));
    const std::vector<int> deleted =
        draw_deleted_buckets(config.buckets, config.deleted, iter_rng);

    std::vector<char> is_deleted(config.buckets + 1, 0);
    for (int b : deleted) is_deleted[b] = 1;

    retained_psf.clear();
    retained_y.clear();
    retained_w.clear();
    construction.clear();
    for (int i = 0; i < data.n(); ++i) {
      if (is_deleted[result.partition.bucket[i]]) {
        construction.push_back(psf[i]);
      } else {
        retained_psf.push_back(psf[i]);
        retained_y.push_back(data.y[i]);
        retained_w.push_back(data.w[i]);
        ++result.inclusion_count[i];
      }
    }

    bool degenerate = false;
    StrataBoundaries boundaries;
    switch (config.boundary_source) {
      case BoundarySource::kDeletedBuckets:
        boundaries =
            build_boundaries(rule, construction, config.num_strata, &degenerate);
        break;
      case BoundarySource::kRetainedBuckets:
        boundaries =
            build_boundaries(rule, retained_psf, config.num_strata, &degenerate);
        break;
      case BoundarySource::kFullSample:
        boundaries = full_boundaries;
        degenerate = full_degenerate;
        break;
    }

    const StrataAssignment assignment =
        assign(boundaries, retained_psf, retained_w);
    StrataSummary summary = strata_summary(
        assignment.labels, assignment.num_strata(), retained_y, retained_w);
    int merges = 0;
    summary = merge_degenerate_strata(std::move(summary), &merges);
    if (summary.num_strata() == 1) ++result.degenerate_replicates;

    const double estimate = post_stratified_estimate(summary, estimand);
    estimates.push_back(estimate);

    if (keep_traces) {
      ReplicateTrace trace;
      trace.iteration = m;
      trace.deleted_buckets = deleted;
      trace.estimate = estimate;
      trace.interior_cuts = boundaries.interior_cuts();
      trace.merges = merges;
      trace.effective_strata = summary.num_strata();
      result.traces.push_back(std::move(trace));
    }
  }

  double point = 0.0;
  for (double est : estimates) point += est;
  point /= static_cast<double>(estimates.size());
  const double se = jackknife_se(estimates, config.buckets, config.deleted);
  const auto [lo, hi] =
      confidence_interval(point, se, config.buckets, config.alpha);

  result.report = make_report(point, se, lo, hi,
                              rule == BoundaryRule::kRootCum
                                  ? Method::kOpj
                                  : Method::kNaivePs,
                              estimand, config.alpha);
  result.report.config_echo = {
      {"b", echo_value(config.buckets)},
      {"d", echo_value(config.deleted)},
      {"m", echo_value(config.iterations)},
      {"k", echo_value(config.num_strata)},
      {"seed", echo_value(config.seed)},
  };
  return result;
}

OpjResult opj_run(const ExperimentData& data, Estimand estimand,
                  const JackknifeConfig& config, bool keep_traces) {
  validate(data);
  const LinearModel control = fit_control_model(data);
  const std::vector<double> psf = predict(control, data);
  return opj_run_with_psf(data, estimand, config, psf, BoundaryRule::kRootCum,
                          keep_traces);
}

EstimateReport baseline_report(const ExperimentData& data, Estimand estimand,
                               double alpha) {
  const double point = baseline_estimate(data, estimand);
  const double se = baseline_se(data, estimand);
  boost::math::normal_distribution<double> normal;
  const double mult = boost::math::quantile(normal, 1.0 - alpha / 2.0);
  EstimateReport report = make_report(point, se, point - mult * se,
                                      point + mult * se, Method::kBase,
                                      estimand, alpha);
  return report;
}

EstimateReport imputation_report(const ExperimentData& data, Estimand estimand,
                                 const JackknifeConfig& config) {
  validate(config);
  const double point = imputation_estimate(data, estimand);

  RngStream partition_rng(config.seed, stream_id("partition"));
  const BucketPartition partition =
      partition_buckets(data, config.buckets, partition_rng);

  std::vector<double> estimates;
  estimates.reserve(config.iterations);
  std::vector<int> control_subset, treated_subset, retained;
  for (int m = 1; m <= config.iterations; ++m) {
    RngStream iter_rng(config.seed, stream_id("iter", m));
    const std::vector<int> deleted =
        draw_deleted_buckets(config.buckets, config.deleted, iter_rng);
    std::vector<char> is_deleted(config.buckets + 1, 0);
    for (int b : deleted) is_deleted[b] = 1;

    control_subset.clear();
    treated_subset.clear();
    retained.clear();
    for (int i = 0; i < data.n(); ++i) {
      if (is_deleted[partition.bucket[i]]) continue;
      retained.push_back(i);
      (data.w[i] == 0 ? control_subset : treated_subset).push_back(i);
    }

    const LinearModel control = fit_ols(data, control_subset);
    const LinearModel treated = fit_ols(data, treated_subset);
    const auto pred0 = predict(control, data);
    const auto pred1 = predict(treated, data);
    double sum0 = 0.0, sum1 = 0.0;
    for (int i : retained) {
      sum0 += pred0[i];
      sum1 += pred1[i];
    }
    const double count = static_cast<double>(retained.size());
    estimates.push_back(g_apply(estimand, sum0 / count, sum1 / count));
  }

  const double se = jackknife_se(estimates, config.buckets, config.deleted);
  const auto [lo, hi] =
      confidence_interval(point, se, config.buckets, config.alpha);
  EstimateReport report = make_report(point, se, lo, hi, Method::kImpute,
                                      estimand, config.alpha);
  report.config_echo = {
      {"b", echo_value(config.buckets)},
      {"d", echo_value(config.deleted)},
      {"m", echo_value(config.iterations)},
      {"seed", echo_value(config.seed)},
  };
  return report;
}

}  // namespace opj
