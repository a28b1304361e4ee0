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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "opj/estimators.hpp"
#include "opj/jackknife.hpp"
#include "opj/rng.hpp"
#include "test_util.hpp"

using opj::Estimand;
using opj::ErrorCode;
using opj::JackknifeConfig;
using opj_test::error_code_of;
using opj_test::make_data;

namespace {

opj::ExperimentData balanced_dataset(int n0, int n1, uint64_t seed) {
  opj::RngStream rng(seed, opj::stream_id("balanced"));
  std::vector<double> y;
  std::vector<int> w;
  std::vector<std::vector<double>> x_rows;
  for (int i = 0; i < n0 + n1; ++i) {
    const int arm = i < n0 ? 0 : 1;
    const double x = rng.next_normal();
    w.push_back(arm);
    x_rows.push_back({x});
    y.push_back(0.5 + 1.5 * x + 0.4 * arm + rng.next_normal());
  }
  return make_data(y, w, x_rows);
}

}  // namespace

TEST_SUITE("jackknife") {

TEST_CASE("partition deals one unit per bucket when sizes divide") {
  auto data = balanced_dataset(20, 20, 3);
  opj::RngStream rng(9, opj::stream_id("partition"));
  auto partition = opj::partition_buckets(data, 20, rng);
  std::map<int, std::pair<int, int>> per_bucket;
  for (int i = 0; i < data.n(); ++i) {
    auto& [c0, c1] = per_bucket[partition.bucket[i]];
    (data.w[i] == 0 ? c0 : c1)++;
  }
  CHECK(per_bucket.size() == 20);
  for (const auto& [bucket, counts] : per_bucket) {
    CHECK(counts.first == 1);
    CHECK(counts.second == 1);
  }
}

TEST_CASE("partition spreads the remainder round-robin") {
  auto data = balanced_dataset(21, 20, 4);
  opj::RngStream rng(9, opj::stream_id("partition"));
  auto partition = opj::partition_buckets(data, 20, rng);
  std::vector<int> control_sizes(21, 0);
  for (int i = 0; i < data.n(); ++i) {
    if (data.w[i] == 0) ++control_sizes[partition.bucket[i]];
  }
  int twos = 0, ones = 0;
  for (int b = 1; b <= 20; ++b) {
    if (control_sizes[b] == 2) ++twos;
    if (control_sizes[b] == 1) ++ones;
  }
  CHECK(twos == 1);
  CHECK(ones == 19);
}

TEST_CASE("partition is deterministic for a fixed stream") {
  auto data = balanced_dataset(30, 30, 5);
  opj::RngStream rng1(123, opj::stream_id("partition"));
  opj::RngStream rng2(123, opj::stream_id("partition"));
  auto p1 = opj::partition_buckets(data, 10, rng1);
  auto p2 = opj::partition_buckets(data, 10, rng2);
  CHECK(p1.bucket == p2.bucket);
}

TEST_CASE("partition rejects arms smaller than B") {
  auto data = balanced_dataset(5, 30, 6);
  opj::RngStream rng(1, opj::stream_id("partition"));
  CHECK(error_code_of([&] { opj::partition_buckets(data, 10, rng); }) ==
        ErrorCode::kArmSmallerThanBuckets);
}

TEST_CASE("jackknife SE formula") {
  std::vector<double> flat = {1.3, 1.3, 1.3, 1.3};
  CHECK(opj::jackknife_se(flat, 20, 4) == doctest::Approx(0.0));

  std::vector<double> ests = {1.0, 1.1, 0.9};
  CHECK(opj::jackknife_se(ests, 20, 4) ==
        doctest::Approx(0.16329931618554525).epsilon(1e-12));

  // Aggregation sanity: the point estimate is the plain mean.
  double mean = (1.0 + 1.1 + 0.9) / 3.0;
  CHECK(mean == doctest::Approx(1.0));

  // Doubling every deviation doubles the SE.
  std::vector<double> doubled = {1.0, 1.2, 0.8};
  CHECK(opj::jackknife_se(doubled, 20, 4) ==
        doctest::Approx(2.0 * opj::jackknife_se(ests, 20, 4)).epsilon(1e-12));
}

TEST_CASE("jackknife SE equals brute force on random vectors") {
  opj::RngStream rng(11, opj::stream_id("se_prop"));
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_below(40));
    const int b = 2 + static_cast<int>(rng.next_below(40));
    const int d = 1 + static_cast<int>(rng.next_below(b - 1));
    std::vector<double> ests(m);
    for (auto& e : ests) e = 3.0 * rng.next_normal();
    double mean = 0.0;
    for (double e : ests) mean += e;
    mean /= m;
    double ss = 0.0;
    for (double e : ests) ss += (e - mean) * (e - mean);
    const double brute = std::sqrt(static_cast<double>(b - d) / (d * m) * ss);
    const double got = opj::jackknife_se(ests, b, d);
    CHECK(got == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("student t quantiles match published critical values") {
  CHECK(opj::student_t_quantile(19, 0.975) ==
        doctest::Approx(2.093024054408307).epsilon(1e-9));
  CHECK(opj::student_t_quantile(9, 0.975) ==
        doctest::Approx(2.2621571627982027).epsilon(1e-9));
  CHECK(opj::student_t_quantile(29, 0.975) ==
        doctest::Approx(2.0452296421327016).epsilon(1e-9));
  CHECK(opj::student_t_quantile(19, 0.95) ==
        doctest::Approx(1.7291328115213664).epsilon(1e-9));
  CHECK(opj::student_t_quantile(59, 0.975) ==
        doctest::Approx(2.0009953780882643).epsilon(1e-9));
  CHECK(opj::student_t_quantile(4, 0.995) ==
        doctest::Approx(4.604094871349979).epsilon(1e-9));
}

TEST_CASE("confidence interval uses t(B-1)") {
  auto [lo, hi] = opj::confidence_interval(1.0, 0.0, 20, 0.05);
  CHECK(lo == 1.0);
  CHECK(hi == 1.0);

  auto [lo2, hi2] = opj::confidence_interval(2.0, 0.5, 20, 0.05);
  CHECK(hi2 - 2.0 == doctest::Approx(2.093024054408307 * 0.5).epsilon(1e-9));
  CHECK(2.0 - lo2 == doctest::Approx(2.093024054408307 * 0.5).epsilon(1e-9));

  // alpha near one collapses the interval.
  auto [lo3, hi3] = opj::confidence_interval(2.0, 0.5, 20, 0.999);
  CHECK(hi3 - lo3 < 0.01);
}

TEST_CASE("degenerate strata merge into the smaller neighbour") {
  opj::StrataSummary summary;
  summary.total = 20;
  summary.count0 = {3, 0, 6};
  summary.count1 = {3, 2, 6};
  summary.mean0 = {1.0, std::numeric_limits<double>::quiet_NaN(), 4.0};
  summary.mean1 = {2.0, 3.0, 5.0};
  summary.weight = {0.3, 0.1, 0.6};

  int merges = 0;
  auto merged = opj::merge_degenerate_strata(summary, &merges);
  CHECK(merges == 1);
  REQUIRE(merged.num_strata() == 2);
  // Stratum 2 (n=2) merges left into stratum 1 (n=6 < n=12).
  CHECK(merged.count0[0] == 3);
  CHECK(merged.count1[0] == 5);
  CHECK(merged.mean1[0] == doctest::Approx((2.0 * 3 + 3.0 * 2) / 5));
  CHECK(merged.weight[0] == doctest::Approx(8.0 / 20));

  // Collapse to a single stratum when everything is degenerate.
  opj::StrataSummary bad;
  bad.total = 4;
  bad.count0 = {2, 0};
  bad.count1 = {0, 2};
  bad.mean0 = {1.0, std::numeric_limits<double>::quiet_NaN()};
  bad.mean1 = {std::numeric_limits<double>::quiet_NaN(), 3.0};
  bad.weight = {0.5, 0.5};
  auto collapsed = opj::merge_degenerate_strata(bad, &merges);
  CHECK(collapsed.num_strata() == 1);
  CHECK(collapsed.mean0[0] == doctest::Approx(1.0));
  CHECK(collapsed.mean1[0] == doctest::Approx(3.0));
}

TEST_CASE("ties merge toward the lower index") {
  opj::StrataSummary summary;
  summary.total = 14;
  summary.count0 = {2, 0, 2};
  summary.count1 = {2, 6, 2};
  summary.mean0 = {1.0, std::numeric_limits<double>::quiet_NaN(), 2.0};
  summary.mean1 = {1.5, 2.5, 3.5};
  summary.weight = {4.0 / 14, 6.0 / 14, 4.0 / 14};
  int merges = 0;
  auto merged = opj::merge_degenerate_strata(summary, &merges);
  REQUIRE(merged.num_strata() == 2);
  CHECK(merged.count1[0] == 8);  // merged left
  CHECK(merged.count1[1] == 2);
}

TEST_CASE("constant outcomes give a zero-width report") {
  opj::RngStream rng(2, opj::stream_id("const"));
  std::vector<double> y(80, 4.2);
  std::vector<int> w(80);
  std::vector<std::vector<double>> x_rows;
  for (int i = 0; i < 80; ++i) {
    w[i] = i % 2;
    x_rows.push_back({rng.next_normal()});
  }
  auto data = make_data(y, w, x_rows);
  JackknifeConfig config;
  config.buckets = 10;
  config.deleted = 2;
  config.iterations = 12;
  config.seed = 5;
  auto result = opj::opj_run(data, Estimand::kDifference, config, true);
  CHECK(result.report.point == doctest::Approx(0.0));
  CHECK(result.report.se == doctest::Approx(0.0));
  // Constant PSF cannot be stratified: every replicate is a baseline
  // replicate and is counted as degenerate.
  CHECK(result.degenerate_replicates == config.iterations);
}

TEST_CASE("opj_run is bit-reproducible for a fixed seed") {
  auto data = balanced_dataset(60, 60, 7);
  JackknifeConfig config;
  config.buckets = 10;
  config.deleted = 2;
  config.iterations = 15;
  config.num_strata = 3;
  config.seed = 99;
  auto r1 = opj::opj_run(data, Estimand::kDifference, config, true);
  auto r2 = opj::opj_run(data, Estimand::kDifference, config, true);
  CHECK(r1.report.point == r2.report.point);
  CHECK(r1.report.se == r2.report.se);
  CHECK(r1.report.ci_low == r2.report.ci_low);
  CHECK(r1.partition.bucket == r2.partition.bucket);
  REQUIRE(r1.traces.size() == r2.traces.size());
  for (size_t i = 0; i < r1.traces.size(); ++i) {
    CHECK(r1.traces[i].estimate == r2.traces[i].estimate);
    CHECK(r1.traces[i].deleted_buckets == r2.traces[i].deleted_buckets);
  }
}

TEST_CASE("K=1 replicates equal the baseline on retained units") {
  auto data = balanced_dataset(50, 50, 8);
  JackknifeConfig config;
  config.buckets = 10;
  config.deleted = 3;
  config.iterations = 20;
  config.num_strata = 1;
  config.seed = 21;
  auto result = opj::opj_run(data, Estimand::kDifference, config, true);

  double replicate_mean = 0.0;
  for (const auto& trace : result.traces) {
    std::vector<char> deleted(config.buckets + 1, 0);
    for (int b : trace.deleted_buckets) deleted[b] = 1;
    opj::ExperimentData retained;
    std::vector<std::vector<double>> x_rows;
    for (int i = 0; i < data.n(); ++i) {
      if (deleted[result.partition.bucket[i]]) continue;
      retained.y.push_back(data.y[i]);
      retained.w.push_back(data.w[i]);
      x_rows.push_back({data.x(i, 0)});
    }
    retained.x.resize(static_cast<int>(x_rows.size()), 1);
    for (size_t i = 0; i < x_rows.size(); ++i) retained.x(i, 0) = x_rows[i][0];
    CHECK(trace.estimate ==
          opj::baseline_estimate(retained, Estimand::kDifference));
    replicate_mean += trace.estimate;
  }
  replicate_mean /= result.traces.size();
  CHECK(result.report.point == doctest::Approx(replicate_mean).epsilon(1e-12));
  // With enough iterations the aggregate sits near the full-sample baseline.
  CHECK(result.report.point ==
        doctest::Approx(opj::baseline_estimate(data, Estimand::kDifference))
            .epsilon(0.25));
}

TEST_CASE("inclusion counts match the traces") {
  auto data = balanced_dataset(40, 40, 9);
  JackknifeConfig config;
  config.buckets = 8;
  config.deleted = 2;
  config.iterations = 25;
  config.num_strata = 2;
  config.seed = 77;
  auto result = opj::opj_run(data, Estimand::kDifference, config, true);
  for (int i = 0; i < data.n(); ++i) {
    int expected = 0;
    for (const auto& trace : result.traces) {
      bool inside = std::find(trace.deleted_buckets.begin(),
                              trace.deleted_buckets.end(),
                              result.partition.bucket[i]) !=
                    trace.deleted_buckets.end();
      if (!inside) ++expected;
    }
    CHECK(result.inclusion_count[i] == expected);
  }
  // Every unit lands in the estimation set at least once by M=25.
  for (int count : result.inclusion_count) CHECK(count > 0);
}

TEST_CASE("baseline and imputation reports") {
  auto data = balanced_dataset(60, 60, 10);
  auto base = opj::baseline_report(data, Estimand::kDifference, 0.05);
  CHECK(base.ci_high - base.point ==
        doctest::Approx(1.959963984540054 * base.se).epsilon(1e-9));

  JackknifeConfig config;
  config.buckets = 10;
  config.deleted = 2;
  config.iterations = 20;
  config.seed = 3;
  auto impute = opj::imputation_report(data, Estimand::kDifference, config);
  CHECK(impute.point ==
        doctest::Approx(opj::imputation_estimate(data, Estimand::kDifference)));
  CHECK(impute.se > 0.0);
  CHECK(impute.ci_low <= impute.point);
  CHECK(impute.ci_high >= impute.point);

  auto impute2 = opj::imputation_report(data, Estimand::kDifference, config);
  CHECK(impute.se == impute2.se);
}

TEST_CASE("config validation") {
  JackknifeConfig config;
  config.deleted = 25;
  CHECK(error_code_of([&] { opj::validate(config); }) ==
        ErrorCode::kInvalidConfig);
  config = JackknifeConfig{};
  config.alpha = 1.5;
  CHECK(error_code_of([&] { opj::validate(config); }) ==
        ErrorCode::kInvalidConfig);
  config = JackknifeConfig{};
  CHECK_NOTHROW(opj::validate(config));
  CHECK(config.buckets == 20);
  CHECK(config.deleted == 4);
  CHECK(config.iterations == 60);
  CHECK(config.num_strata == 5);
  CHECK(config.alpha == 0.05);
}

}  // TEST_SUITE
