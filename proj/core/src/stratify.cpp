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
#include "opj/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "opj/error.hpp"

namespace opj {

namespace {

constexpr int kGridPoints = 512;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
// Kernel contributions beyond this many bandwidths are below double noise.
constexpr double kKernelCutoff = 8.5;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxClasses = 50;

double sample_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

std::vector<double> StrataBoundaries::interior_cuts() const {
  return {cuts.begin() + 1, cuts.end() - 1};
}

double quantile_linear(std::span<const double> sorted_values, double p) {
  const size_t n = sorted_values.size();
  double pos = p * static_cast<double>(n - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo >= n - 1) return sorted_values[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

KdeModel kde_fit(std::span<const double> values) {
  const size_t n = values.size();
  if (n < 2) {
    fail(ErrorCode::kDegenerateSample, "need at least 2 values for a KDE");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  const double sd = sample_sd(sorted);
  if (sd == 0.0) {
    fail(ErrorCode::kDegenerateSample, "all values identical");
  }
  const double iqr =
      quantile_linear(sorted, 0.75) - quantile_linear(sorted, 0.25);
  double scale = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double h =
      0.9 * scale * std::pow(static_cast<double>(n), -0.2);

  KdeModel model;
  model.bandwidth = h;
  model.grid.resize(kGridPoints);
  model.density.resize(kGridPoints);
  const double lo = sorted.front() - 3.0 * h;
  const double hi = sorted.back() + 3.0 * h;
  const double step = (hi - lo) / (kGridPoints - 1);
  const double norm = 1.0 / (static_cast<double>(n) * h);
  for (int g = 0; g < kGridPoints; ++g) {
    const double at = lo + step * g;
    model.grid[g] = at;
    auto first = std::lower_bound(sorted.begin(), sorted.end(),
                                  at - kKernelCutoff * h);
    auto last = std::lower_bound(first, sorted.end(), at + kKernelCutoff * h);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (at - *it) / h;
      sum += std::exp(-0.5 * z * z);
    }
    model.density[g] = norm * kInvSqrt2Pi * sum;
  }
  return model;
}

StrataBoundaries root_cum_boundaries(const KdeModel& kde, int num_strata) {
  if (num_strata < 1) {
    fail(ErrorCode::kInvalidConfig, "num_strata must be >= 1");
  }
  const size_t g = kde.grid.size();
  std::vector<double> cum(g, 0.0);
  for (size_t i = 1; i < g; ++i) {
    const double width = kde.grid[i] - kde.grid[i - 1];
    cum[i] = cum[i - 1] + 0.5 * width * (std::sqrt(kde.density[i]) +
                                         std::sqrt(kde.density[i - 1]));
  }
  const double total = cum.back();

  StrataBoundaries boundaries;
  boundaries.cuts.reserve(num_strata + 1);
  boundaries.cuts.push_back(-kInf);
  for (int k = 1; k < num_strata; ++k) {
    const double target = total * static_cast<double>(k) / num_strata;
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    size_t j = it == cum.begin() ? 0 : (it - cum.begin()) - 1;
    j = std::min(j, g - 2);
    const double span = cum[j + 1] - cum[j];
    double cut = span > 0.0
                     ? kde.grid[j] + (kde.grid[j + 1] - kde.grid[j]) *
                                         (target - cum[j]) / span
                     : kde.grid[j];
    // Positive Gaussian density makes the cumulative strictly increasing,
    // so collisions only arise from degenerate grids.
    if (cut <= boundaries.cuts.back()) {
      fail(ErrorCode::kDegenerateSample, "collapsed root-cumulative cuts");
    }
    boundaries.cuts.push_back(cut);
  }
  boundaries.cuts.push_back(kInf);
  return boundaries;
}

StrataBoundaries quantile_boundaries(std::span<const double> values,
                                     int num_strata) {
  if (num_strata < 1) {
    fail(ErrorCode::kInvalidConfig, "num_strata must be >= 1");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  StrataBoundaries boundaries;
  boundaries.cuts.push_back(-kInf);
  for (int k = 1; k < num_strata; ++k) {
    double cut =
        quantile_linear(sorted, static_cast<double>(k) / num_strata);
    if (cut <= boundaries.cuts.back()) {
      fail(ErrorCode::kTooFewDistinctValues,
           "quantile cuts collide at k=" + std::to_string(k) +
               "; need more distinct values");
    }
    boundaries.cuts.push_back(cut);
  }
  boundaries.cuts.push_back(kInf);
  return boundaries;
}

StrataBoundaries class_boundaries(std::span<const double> values) {
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() > kMaxClasses) {
    fail(ErrorCode::kTooManyClasses,
         std::to_string(distinct.size()) + " distinct values exceed " +
             std::to_string(kMaxClasses));
  }
  StrataBoundaries boundaries;
  boundaries.cuts.push_back(-kInf);
  for (size_t i = 0; i + 1 < distinct.size(); ++i) {
    boundaries.cuts.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }
  boundaries.cuts.push_back(kInf);
  return boundaries;
}

StrataAssignment assign(const StrataBoundaries& boundaries,
                        std::span<const double> psf, std::span<const int> w) {
  const int k = boundaries.num_strata();
  const auto interior = boundaries.interior_cuts();

  StrataAssignment assignment;
  assignment.labels.resize(psf.size());
  assignment.count.assign(k, 0);
  assignment.count0.assign(k, 0);
  assignment.count1.assign(k, 0);
  for (size_t i = 0; i < psf.size(); ++i) {
    // Stratum k is (c_{k-1}, c_k]: the first interior cut >= psf decides.
    auto it = std::lower_bound(interior.begin(), interior.end(), psf[i]);
    int label = static_cast<int>(it - interior.begin()) + 1;
    assignment.labels[i] = label;
    ++assignment.count[label - 1];
    if (w[i] == 0) {
      ++assignment.count0[label - 1];
    } else {
      ++assignment.count1[label - 1];
    }
  }
  return assignment;
}

}  // namespace opj
