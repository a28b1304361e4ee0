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
#include "opj/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "opj/error.hpp"

namespace opj {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& field, int line_no, const std::string& column) {
  const std::string text = strip(field);
  if (text.empty()) {
    fail(ErrorCode::kCsvFormat,
         "line " + std::to_string(line_no) + ": missing value in column " + column);
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    fail(ErrorCode::kCsvFormat, "line " + std::to_string(line_no) +
                                    ": cannot parse '" + text +
                                    "' in column " + column);
  }
  if (!std::isfinite(value)) {
    fail(ErrorCode::kCsvFormat, "line " + std::to_string(line_no) +
                                    ": non-finite value in column " + column);
  }
  return value;
}

}  // namespace

ExperimentData read_experiment_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::kCsvFormat, "empty input: expected header w,y,x1,...,xq");
  }
  const auto header = split_fields(line);
  if (header.size() < 3 || strip(header[0]) != "w" || strip(header[1]) != "y") {
    fail(ErrorCode::kCsvFormat, "line 1: header must be w,y,x1,...,xq");
  }
  const int q = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < q; ++j) {
    if (strip(header[2 + j]) != "x" + std::to_string(j + 1)) {
      fail(ErrorCode::kCsvFormat,
           "line 1: covariate column " + std::to_string(j + 3) +
               " must be named x" + std::to_string(j + 1));
    }
  }

  ExperimentData data;
  std::vector<std::vector<double>> x_rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::kCsvFormat,
           "line " + std::to_string(line_no) + ": expected " +
               std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    const std::string w_text = strip(fields[0]);
    if (w_text != "0" && w_text != "1") {
      fail(ErrorCode::kInvalidTreatmentIndicator,
           "line " + std::to_string(line_no) + ": w must be 0 or 1, got '" +
               w_text + "'");
    }
    data.w.push_back(w_text == "1" ? 1 : 0);
    data.y.push_back(parse_real(fields[1], line_no, "y"));
    std::vector<double> row(q);
    for (int j = 0; j < q; ++j) {
      row[j] = parse_real(fields[2 + j], line_no, "x" + std::to_string(j + 1));
    }
    x_rows.push_back(std::move(row));
  }

  data.x.resize(static_cast<Eigen::Index>(x_rows.size()), q);
  for (size_t i = 0; i < x_rows.size(); ++i) {
    for (int j = 0; j < q; ++j) data.x(static_cast<Eigen::Index>(i), j) = x_rows[i][j];
  }
  validate(data);
  return data;
}

ExperimentData read_experiment_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::kCsvFormat, "cannot open " + path);
  }
  return read_experiment_csv(in);
}

std::string format_g6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace opj
