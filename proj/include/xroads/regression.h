/* Copyright 2026 The xroads Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef XROADS_REGRESSION_H_
#define XROADS_REGRESSION_H_

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xroads/evaluation.h"
#include "xroads/image_metrics.h"

namespace xroads {

class RegressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Observations in rows. Predictors exclude the intercept column, which the
// fit adds itself.
struct DesignMatrix {
  std::vector<std::string> predictor_names;
  Eigen::MatrixXd predictors;
  std::vector<std::string> response_names;
  Eigen::MatrixXd responses;
};

// z-scores every predictor and response column with the sample (n - 1)
// standard deviation. A zero-variance column is rejected by name.
DesignMatrix Standardize(const DesignMatrix& m);

struct OlsFit {
  std::vector<std::string> names;   // "intercept" first, then predictors
  Eigen::VectorXd coefficients;     // same order as names
  Eigen::MatrixXd xtx_inverse;      // (X^T X)^-1 including the intercept
  double rss = 0;
  int df = 0;                       // n - p - 1
  double residual_variance = 0;     // rss / df; NaN when df == 0
};

// Least squares through a Householder QR of [1 | predictors]. Rank
// deficiency is reported with the first pair of columns found to be
// collinear.
OlsFit FitOls(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& response,
              const std::vector<std::string>& predictor_names);

struct CoefficientRow {
  std::string predictor;
  double coefficient = 0;
  double standard_error = 0;
  double t = 0;
  double p_value = 0;
  double ci_lower = 0;
  double ci_upper = 0;
};

struct RegressionReport {
  std::string response;
  int df = 0;
  double alpha = 0.05;
  std::vector<CoefficientRow> rows;  // predictors only, intercept omitted
};

// t = coefficient / se and the interval coefficient -/+ t_crit * se.
// The p-value is left at zero; callers that know df fill it in.
CoefficientRow SummarizeCoefficient(const std::string& name, double coefficient,
                                    double standard_error, double t_crit);

RegressionReport Inference(const OlsFit& fit, const std::string& response, double alpha = 0.05);

struct TileErrorCounts {
  std::string tile_id;
  double fp = 0;
  double fn = 0;
};

// Joins on tile id (each side must cover the same ids), standardizes, and
// fits FP and FN on (edge_density, rgb_diversity, sharpness). Needs at
// least 10 tiles.
std::pair<RegressionReport, RegressionReport> AnalyzeErrors(
    std::span<const TileErrorCounts> errors, std::span<const TileMetricsRow> metrics,
    double alpha = 0.05);

// predictor,coef,se,t,p,ci_lo,ci_hi with "# response", "# df" and
// "# alpha" comment lines on top.
std::string RegressionReportCsv(const RegressionReport& report);

}  // namespace xroads

#endif  // XROADS_REGRESSION_H_
