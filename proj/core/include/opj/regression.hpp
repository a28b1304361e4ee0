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
#ifndef OPJ_CORE_REGRESSION_H_
#define OPJ_CORE_REGRESSION_H_

#include <span>
#include <utility>
#include <vector>

#include "opj/types.hpp"

namespace opj {

// OLS fit; coefficients has length q+1 with the intercept first.
struct LinearModel {
  Eigen::VectorXd coefficients;
};

// Least-squares fit of y on [1, x] over the given unit indices, solved by
// Householder QR. Throws kSubsetTooSmall when |subset| < q+2 and
// kRankDeficient when the smallest singular value of the augmented design
// falls below 1e-10 times the largest.
LinearModel fit_ols(const ExperimentData& data, std::span<const int> subset);

// fit_ols over exactly the control arm {i : w_i = 0}.
LinearModel fit_control_model(const ExperimentData& data);

// (control model, treated model), each fit on its own arm. Error messages
// identify the offending arm.
std::pair<LinearModel, LinearModel> fit_arm_models(const ExperimentData& data);

// Linear predictions intercept + x_i . beta for every unit.
std::vector<double> predict(const LinearModel& model,
                            const ExperimentData& data);

}  // namespace opj

#endif  // OPJ_CORE_REGRESSION_H_
