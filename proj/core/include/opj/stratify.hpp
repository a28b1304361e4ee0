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
#ifndef OPJ_CORE_STRATIFY_H_
#define OPJ_CORE_STRATIFY_H_

#include <span>
#include <vector>

namespace opj {

// Gaussian kernel density estimate on a uniform grid.
struct KdeModel {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Strata cut points c_0 < c_1 < ... < c_K with c_0 = -inf and c_K = +inf;
// stratum k covers the half-open interval (c_{k-1}, c_k].
struct StrataBoundaries {
  std::vector<double> cuts;

  int num_strata() const { return static_cast<int>(cuts.size()) - 1; }
  // Finite cuts c_1..c_{K-1}.
  std::vector<double> interior_cuts() const;
};

// Per-unit stratum labels in 1..K with per-stratum, per-arm tallies.
struct StrataAssignment {
  std::vector<int> labels;
  std::vector<int> count;
  std::vector<int> count0;
  std::vector<int> count1;

  int num_strata() const { return static_cast<int>(count.size()); }
};

// Interpolated quantile (linear interpolation between order statistics) of an
// ascending-sorted sample, p in [0, 1].
double quantile_linear(std::span<const double> sorted_values, double p);

// Gaussian KDE with Silverman bandwidth
//   h = 0.9 * min(sd, IQR/1.34) * n^(-1/5)   (sd alone when IQR == 0),
// evaluated on a uniform grid of 512 points over [min - 3h, max + 3h].
// Throws kDegenerateSample when all values are identical.
KdeModel kde_fit(std::span<const double> values);

// Boundaries equalizing the cumulative integral of sqrt(density): the k-th
// interior cut is placed (by linear interpolation of the cumulative curve)
// where it reaches k/K of its total.
StrataBoundaries root_cum_boundaries(const KdeModel& kde, int num_strata);

// Interior cuts at the k/K interpolated quantiles of the values. Throws
// kTooFewDistinctValues when adjacent cuts collide.
StrataBoundaries quantile_boundaries(std::span<const double> values,
                                     int num_strata);

// One stratum per distinct value, interior cuts at midpoints between
// adjacent distinct values. Throws kTooManyClasses above 50 distinct values.
StrataBoundaries class_boundaries(std::span<const double> values);

// Labels every unit by the (c_{k-1}, c_k] rule and tallies counts per
// stratum and arm.
StrataAssignment assign(const StrataBoundaries& boundaries,
                        std::span<const double> psf, std::span<const int> w);

}  // namespace opj

#endif  // OPJ_CORE_STRATIFY_H_
