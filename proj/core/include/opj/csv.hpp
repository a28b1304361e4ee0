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
#ifndef OPJ_CORE_CSV_H_
#define OPJ_CORE_CSV_H_

#include <iosfwd>
#include <string>

#include "opj/types.hpp"

namespace opj {

// Reads the experiment schema `w,y,x1,...,xq` (header required): w as an
// integer 0/1, all other columns as decimal reals. Rows with missing or
// non-numeric fields raise kCsvFormat naming the offending row and column;
// the parsed dataset is then checked with validate().
ExperimentData read_experiment_csv(std::istream& in);
ExperimentData read_experiment_csv_file(const std::string& path);

// Formats a double with 6 significant digits (the fixed CSV/report format).
std::string format_g6(double value);

}  // namespace opj

#endif  // OPJ_CORE_CSV_H_
