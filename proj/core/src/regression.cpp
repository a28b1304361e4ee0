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
#include "opj/regression.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <string>

#include "opj/error.hpp"

namespace opj {

namespace {

constexpr double kRankTolerance = 1e-10;

LinearModel fit_ols_impl(const ExperimentData& data,
                         std::span<const int> subset, const char* arm_label) {
  const int q = data.q();
  const int m = static_cast<int>(subset.size());
  if (m < q + 2) {
    fail(ErrorCode::kSubsetTooSmall,
         std::string(arm_label) + "subset of " + std::to_string(m) +
             " units cannot fit " + std::to_string(q + 1) + " coefficients");
  }

  Eigen::MatrixXd design(m, q + 1);
  Eigen::VectorXd outcome(m);
  for (int r = 0; r < m; ++r) {
    const int i = subset[r];
    design(r, 0) = 1.0;
    design.row(r).tail(q) = data.x.row(i);
    outcome(r) = data.y[i];
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  // Singular values of the triangular factor equal those of the design.
  Eigen::MatrixXd r_factor =
      qr.matrixQR().topRows(q + 1).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r_factor);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kRankTolerance * sv(0)) {
    fail(ErrorCode::kRankDeficient,
         std::string(arm_label) + "design is rank deficient (sigma_min/sigma_max = " +
             std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
  }

  LinearModel model;
  model.coefficients = qr.solve(outcome);
  return model;
}

}  // namespace

LinearModel fit_ols(const ExperimentData& data, std::span<const int> subset) {
  return fit_ols_impl(data, subset, "");
}

LinearModel fit_control_model(const ExperimentData& data) {
  return fit_ols_impl(data, data.arm_indices(0), "control ");
}

std::pair<LinearModel, LinearModel> fit_arm_models(const ExperimentData& data) {
  LinearModel control = fit_ols_impl(data, data.arm_indices(0), "control ");
  LinearModel treated = fit_ols_impl(data, data.arm_indices(1), "treated ");
  return {std::move(control), std::move(treated)};
}

std::vector<double> predict(const LinearModel& model,
                            const ExperimentData& data) {
  const int q = data.q();
  if (model.coefficients.size() != q + 1) {
    fail(ErrorCode::kDimensionMismatch,
         "model has " + std::to_string(model.coefficients.size()) +
             " coefficients, data has " + std::to_string(q) + " covariates");
  }
  std::vector<double> out(data.n());
  Eigen::VectorXd fitted =
      (data.x * model.coefficients.tail(q)).array() + model.coefficients(0);
  for (int i = 0; i < data.n(); ++i) out[i] = fitted(i);
  return out;
}

}  // namespace opj
