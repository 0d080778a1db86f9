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
#include "xroads/regression.h"

#include <cmath>
#include <limits>
#include <map>

#include "xroads/student_t.h"
#include "xroads/text_io.h"

namespace xroads {

namespace {

void StandardizeColumns(Eigen::MatrixXd& m, const std::vector<std::string>& names) {
  const auto n = m.rows();
  if (n < 2) throw RegressionError("standardization needs at least two observations");
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double mean = m.col(c).mean();
    const double ss = (m.col(c).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const std::string name = c < static_cast<Eigen::Index>(names.size()) ? names[c] : std::to_string(c);
    if (!(sd > 0) || sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      throw RegressionError("column '" + name + "' has zero variance");
    }
    m.col(c) = (m.col(c).array() - mean) / sd;
  }
}

}  // namespace

DesignMatrix Standardize(const DesignMatrix& m) {
  if (m.predictors.rows() != m.responses.rows()) {
    throw RegressionError("predictor and response row counts differ");
  }
  DesignMatrix out = m;
  StandardizeColumns(out.predictors, out.predictor_names);
  StandardizeColumns(out.responses, out.response_names);
  return out;
}

OlsFit FitOls(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& response,
              const std::vector<std::string>& predictor_names) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index k = predictors.cols() + 1;
  if (response.size() != n) throw RegressionError("response length differs from predictor rows");
  if (n < k) throw RegressionError("fewer observations than coefficients");

  Eigen::MatrixXd x(n, k);
  x.col(0).setOnes();
  x.rightCols(k - 1) = predictors;

  OlsFit fit;
  fit.names.push_back("intercept");
  for (Eigen::Index c = 0; c + 1 < k; ++c) {
    fit.names.push_back(c < static_cast<Eigen::Index>(predictor_names.size())
                            ? predictor_names[c] : "x" + std::to_string(c));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(x);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() < k) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        Eigen::MatrixXd pair(n, 2);
        pair << x.col(i), x.col(j);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pqr(pair);
        pqr.setThreshold(1e-10);
        if (pqr.rank() < 2) {
          throw RegressionError("design matrix is rank deficient: columns '" + fit.names[i] +
                                "' and '" + fit.names[j] + "' are collinear");
        }
      }
    }
    throw RegressionError("design matrix is rank deficient (rank " +
                          std::to_string(rank_qr.rank()) + " of " + std::to_string(k) + ")");
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  fit.coefficients = qr.solve(response);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  fit.xtx_inverse = r_inv * r_inv.transpose();
  fit.rss = (response - x * fit.coefficients).squaredNorm();
  fit.df = static_cast<int>(n - k);
  fit.residual_variance =
      fit.df > 0 ? fit.rss / fit.df : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

CoefficientRow SummarizeCoefficient(const std::string& name, double coefficient,
                                    double standard_error, double t_crit) {
  CoefficientRow row;
  row.predictor = name;
  row.coefficient = coefficient;
  row.standard_error = standard_error;
  row.t = standard_error > 0 ? coefficient / standard_error
                             : std::copysign(std::numeric_limits<double>::infinity(), coefficient);
  row.ci_lower = coefficient - t_crit * standard_error;
  row.ci_upper = coefficient + t_crit * standard_error;
  return row;
}

RegressionReport Inference(const OlsFit& fit, const std::string& response, double alpha) {
  if (fit.df < 1) throw RegressionError("inference needs at least one residual degree of freedom");
  if (!(alpha > 0 && alpha < 1)) throw RegressionError("alpha must lie in (0, 1)");
  RegressionReport report;
  report.response = response;
  report.df = fit.df;
  report.alpha = alpha;
  const double t_crit = StudentTQuantile(1 - alpha / 2, fit.df);
  for (Eigen::Index i = 1; i < fit.coefficients.size(); ++i) {
    const double se = std::sqrt(std::max(0.0, fit.residual_variance * fit.xtx_inverse(i, i)));
    CoefficientRow row = SummarizeCoefficient(fit.names[i], fit.coefficients[i], se, t_crit);
    row.p_value = StudentTTwoSidedPValue(row.t, fit.df);
    report.rows.push_back(row);
  }
  return report;
}

std::pair<RegressionReport, RegressionReport> AnalyzeErrors(
    std::span<const TileErrorCounts> errors, std::span<const TileMetricsRow> metrics,
    double alpha) {
  std::map<std::string, const TileMetrics*> by_id;
  for (const TileMetricsRow& m : metrics) {
    if (!by_id.emplace(m.tile_id, &m.metrics).second) {
      throw RegressionError("duplicate metrics row for tile '" + m.tile_id + "'");
    }
  }
  if (errors.size() != metrics.size()) {
    throw RegressionError("evaluation has " + std::to_string(errors.size()) +
                          " tiles but metrics has " + std::to_string(metrics.size()));
  }
  if (errors.size() < 10) throw RegressionError("error analysis needs at least 10 tiles");

  const auto n = static_cast<Eigen::Index>(errors.size());
  DesignMatrix dm;
  dm.predictor_names = {"edge_density", "rgb_diversity", "sharpness"};
  dm.response_names = {"fp", "fn"};
  dm.predictors.resize(n, 3);
  dm.responses.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TileErrorCounts& e = errors[static_cast<std::size_t>(i)];
    auto it = by_id.find(e.tile_id);
    if (it == by_id.end()) throw RegressionError("tile '" + e.tile_id + "' has no metrics row");
    dm.predictors(i, 0) = it->second->edge_density;
    dm.predictors(i, 1) = static_cast<double>(it->second->rgb_diversity);
    dm.predictors(i, 2) = it->second->sharpness;
    dm.responses(i, 0) = e.fp;
    dm.responses(i, 1) = e.fn;
  }

  const DesignMatrix z = Standardize(dm);
  const OlsFit fp_fit = FitOls(z.predictors, z.responses.col(0), z.predictor_names);
  const OlsFit fn_fit = FitOls(z.predictors, z.responses.col(1), z.predictor_names);
  return {Inference(fp_fit, "fp", alpha), Inference(fn_fit, "fn", alpha)};
}

std::string RegressionReportCsv(const RegressionReport& report) {
  std::string out = "# response=" + report.response + "\n# df=" + std::to_string(report.df) +
                    "\n# alpha=" + FormatDouble(report.alpha) + "\n";
  out += "predictor,coef,se,t,p,ci_lo,ci_hi\n";
  for (const CoefficientRow& r : report.rows) {
    out += r.predictor + "," + FormatDouble(r.coefficient) + "," + FormatDouble(r.standard_error) +
           "," + FormatDouble(r.t) + "," + FormatDouble(r.p_value) + "," +
           FormatDouble(r.ci_lower) + "," + FormatDouble(r.ci_upper) + "\n";
  }
  return out;
}

}  // namespace xroads
