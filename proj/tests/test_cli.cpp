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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / "opj_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string command = std::string(OPJ_CLI_PATH) + " " + args + " >" +
                              out.string() + " 2>" + err.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string small_dataset() {
  std::ostringstream out;
  out << "w,y,x1\n";
  // Deterministic non-random dataset, 24 units per arm.
  for (int i = 0; i < 48; ++i) {
    const int w = i % 2;
    const double x = 0.25 * (i % 12) - 1.5;
    const double y = 1.0 + 2.0 * x + 0.4 * w + 0.1 * ((i * 7) % 5 - 2);
    out << w << "," << y << "," << x << "\n";
  }
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze is byte-identical across runs") {
  const auto data = write_file("det.csv", small_dataset());
  const std::string flags = "analyze --data " + data.string() +
                            " --method opj --estimand difference --seed 7 "
                            "--b 8 --d 2 --m 10 --k 2";
  auto first = run_cli(flags);
  auto second = run_cli(flags);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(!first.out.empty());

  const auto parsed = nlohmann::json::parse(first.out);
  CHECK(parsed["method"] == "opj");
  CHECK(parsed["estimand"] == "difference");
  CHECK(parsed["config"]["b"] == 8);
  CHECK(parsed["config"]["seed"] == 7);
  CHECK(parsed["alpha"] == 0.05);
  CHECK(parsed["ci_low"].get<double>() <= parsed["point"].get<double>());
}

TEST_CASE("analyze rejects a bad treatment indicator with exit 2") {
  const auto data =
      write_file("bad_w.csv", "w,y,x1\n0,1.0,0.1\n2,2.0,0.2\n1,3.0,0.3\n");
  auto result = run_cli("analyze --data " + data.string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("error:invalid_treatment_indicator:") !=
        std::string::npos);
  CHECK(result.err.find("line 3") != std::string::npos);
}

TEST_CASE("analyze reports estimation failures with exit 3") {
  // Constant covariate makes the control design rank deficient.
  std::ostringstream data;
  data << "w,y,x1\n";
  for (int i = 0; i < 20; ++i) {
    data << (i % 2) << "," << 0.5 * i << ",2.0\n";
  }
  const auto path = write_file("rank.csv", data.str());
  auto result = run_cli("analyze --data " + path.string() + " --method opj");
  CHECK(result.exit_code == 3);
  CHECK(result.err.find("error:rank_deficient:") != std::string::npos);
}

TEST_CASE("base method on constant outcomes reports zero") {
  std::ostringstream data;
  data << "w,y,x1\n";
  for (int i = 0; i < 12; ++i) data << (i % 2) << ",3.25,0." << i << "\n";
  const auto path = write_file("const.csv", data.str());
  auto result = run_cli("analyze --data " + path.string() + " --method base");
  CHECK(result.exit_code == 0);
  const auto parsed = nlohmann::json::parse(result.out);
  CHECK(parsed["point"].get<double>() == 0.0);
  CHECK(parsed["se"].get<double>() == 0.0);
}

TEST_CASE("simulate emits one row per method and is reproducible") {
  const std::string flags =
      "simulate --scenario independent --reps 6 --seed 3 --threads 2 "
      "--m 8 --b 10 --d 2";
  auto first = run_cli(flags);
  auto second = run_cli(flags);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);

  std::istringstream lines(first.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "scenario,estimand,method,mean_bias,mean_se,rmse,coverage,reps,seed");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
    CHECK(line.find("independent,difference,") == 0);
  }
  CHECK(rows == 3);
}

TEST_CASE("simulate writes per-replication errors when asked") {
  const fs::path errors = scratch_dir() / "errors.csv";
  auto result = run_cli(
      "simulate --scenario lin-lin --reps 4 --seed 9 --threads 2 --m 6 "
      "--b 10 --d 2 --errors-out " + errors.string());
  CHECK(result.exit_code == 0);
  const std::string text = slurp(errors);
  CHECK(text.find("rep,method,error") == 0);
  // 4 reps x 3 methods.
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
}

TEST_CASE("simulate rejects an unknown scenario with exit 2") {
  auto result = run_cli("simulate --scenario banana --reps 2");
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("error:usage:") != std::string::npos);
}

TEST_CASE("simulate rejects ratio for the independent scenario") {
  auto result =
      run_cli("simulate --scenario independent --estimand ratio --reps 2");
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("error:invalid_scenario:") != std::string::npos);
}

TEST_CASE("strata exports boundaries, counts and the KDE grid") {
  const auto data = write_file("strata.csv", small_dataset());
  const fs::path grid = scratch_dir() / "grid.csv";
  auto result = run_cli("strata --data " + data.string() +
                        " --rule root-cum --k 3 --psf y --grid-out " +
                        grid.string());
  CHECK(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "stratum,lower,upper,n,n0,n1");
  int rows = 0;
  int total = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream fields(line);
    std::string field;
    for (int j = 0; j < 4; ++j) std::getline(fields, field, ',');
    total += std::stoi(field);
  }
  CHECK(rows == 3);
  CHECK(total == 48);

  const std::string grid_text = slurp(grid);
  CHECK(grid_text.find("grid,density") == 0);
  CHECK(std::count(grid_text.begin(), grid_text.end(), '\n') == 513);
}

TEST_CASE("strata with k=1 has no interior cuts") {
  const auto data = write_file("strata1.csv", small_dataset());
  auto result =
      run_cli("strata --data " + data.string() + " --rule quantile --k 1");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("1,-inf,inf,48") != std::string::npos);
}

TEST_CASE("strata class rule rejects too many classes with exit 3") {
  std::ostringstream data;
  data << "w,y,x1\n";
  for (int i = 0; i < 200; ++i) {
    data << (i % 2) << "," << 0.5 * i << "," << 0.1 * i << "\n";
  }
  const auto path = write_file("classes.csv", data.str());
  auto result =
      run_cli("strata --data " + path.string() + " --rule class --psf y");
  CHECK(result.exit_code == 3);
  CHECK(result.err.find("error:too_many_classes:") != std::string::npos);
}

TEST_CASE("trace export lists one row per iteration") {
  const auto data = write_file("trace.csv", small_dataset());
  const fs::path traces = scratch_dir() / "traces.csv";
  auto result = run_cli("analyze --data " + data.string() +
                        " --method opj --seed 4 --b 8 --d 2 --m 9 --k 2 "
                        "--trace-out " + traces.string());
  CHECK(result.exit_code == 0);
  const std::string text = slurp(traces);
  CHECK(text.find("m,deleted_buckets,estimate,merges") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

}  // TEST_SUITE
