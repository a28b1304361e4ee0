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
#ifndef OPJ_CORE_ERROR_H_
#define OPJ_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace opj {

enum class ErrorCode {
  // Data validation.
  kShapeMismatch,
  kInvalidTreatmentIndicator,
  kEmptyArm,
  kNonFiniteValue,
  kCsvFormat,
  kInvalidConfig,
  kInvalidScenario,
  // Estimation.
  kDivisionByZero,
  kRankDeficient,
  kSubsetTooSmall,
  kDimensionMismatch,
  kDegenerateSample,
  kTooFewDistinctValues,
  kTooManyClasses,
  kEmptyCell,
  kArmSmallerThanBuckets,
};

// Stable machine-readable name, e.g. "rank_deficient".
const char* error_code_name(ErrorCode code);

// Input errors are the caller's fault (malformed data, bad flags) and map to
// CLI exit code 2; estimation errors map to exit code 3.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace opj

#endif  // OPJ_CORE_ERROR_H_
