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
#include "xroads/evaluation.h"

#include <algorithm>
#include <numeric>

#include "xroads/text_io.h"

namespace xroads {

namespace {

std::vector<std::size_t> ScoreOrder(std::span<const ScoredBox> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });
  return order;
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string("NA");
}

std::optional<double> ParseOptional(const std::string& s) {
  if (s == "NA") return std::nullopt;
  return ParseDouble(s);
}

}  // namespace

MatchResult MatchDetections(std::span<const ScoredBox> detections, std::span<const Box> gts,
                            MatchMode mode) {
  MatchResult result;
  std::vector<bool> served(gts.size(), false);

  for (std::size_t d : ScoreOrder(detections)) {
    const Box& det = detections[d].box;
    std::optional<std::size_t> chosen;
    if (mode == MatchMode::kPoint) {
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (served[g] || !gts[g].Contains(det.cx, det.cy)) continue;
        if (!chosen || gts[g].area() < gts[*chosen].area()) chosen = g;
      }
    } else {
      double best = 0.5;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (served[g]) continue;
        const double iou = Iou(det, gts[g]);
        if (iou >= best && (!chosen || iou > best)) {
          best = iou;
          chosen = g;
        }
      }
    }
    if (chosen) {
      served[*chosen] = true;
      ++result.tp;
      result.matched_pairs.emplace_back(d, *chosen);
    } else {
      ++result.fp;
    }
  }
  result.fn = static_cast<std::size_t>(std::count(served.begin(), served.end(), false));
  return result;
}

PrecisionRecall ComputePrecisionRecall(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrecisionRecall pr;
  if (tp + fp > 0) pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return pr;
}

std::optional<double> F1Score(std::optional<double> precision, std::optional<double> recall) {
  if (!precision || !recall) return std::nullopt;
  const double p = *precision, r = *recall;
  if (p + r == 0) return 0.0;
  return 2 * p * r / (p + r);
}

EvalReport MakeReport(const MatchResult& m) {
  EvalReport report{m.tp, m.fp, m.fn, std::nullopt, std::nullopt, std::nullopt};
  const PrecisionRecall pr = ComputePrecisionRecall(m);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.f1 = F1Score(pr.precision, pr.recall);
  return report;
}

EvalReport Aggregate(std::span<const TileEvaluation> tiles, Averaging averaging) {
  MatchResult total;
  for (const TileEvaluation& t : tiles) {
    total.tp += t.match.tp;
    total.fp += t.match.fp;
    total.fn += t.match.fn;
  }
  EvalReport report = MakeReport(total);
  if (averaging == Averaging::kMacro) {
    double p_sum = 0, r_sum = 0;
    std::size_t p_n = 0, r_n = 0;
    for (const TileEvaluation& t : tiles) {
      const PrecisionRecall pr = ComputePrecisionRecall(t.match);
      if (pr.precision) { p_sum += *pr.precision; ++p_n; }
      if (pr.recall) { r_sum += *pr.recall; ++r_n; }
    }
    report.precision = p_n ? std::optional<double>(p_sum / p_n) : std::nullopt;
    report.recall = r_n ? std::optional<double>(r_sum / r_n) : std::nullopt;
    report.f1 = F1Score(report.precision, report.recall);
  }
  return report;
}

std::string EvaluationCsv(std::span<const TileEvaluation> tiles, Averaging averaging) {
  std::string out = "tile_id,tp,fp,fn,precision,recall,f1\n";
  auto row = [&](const std::string& id, const EvalReport& r) {
    out += id + "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," +
           std::to_string(r.fn) + "," + FormatOptional(r.precision) + "," +
           FormatOptional(r.recall) + "," + FormatOptional(r.f1) + "\n";
  };
  for (const TileEvaluation& t : tiles) row(t.tile_id, MakeReport(t.match));
  row(kTotalsRowId, Aggregate(tiles, averaging));
  return out;
}

std::vector<EvaluationCsvRow> ParseEvaluationCsv(const std::string& text) {
  const CsvTable table = ParseCsv(text);
  const std::size_t id = table.Column("tile_id"), tp = table.Column("tp"), fp = table.Column("fp"),
                    fn = table.Column("fn"), p = table.Column("precision"),
                    r = table.Column("recall"), f = table.Column("f1");
  std::vector<EvaluationCsvRow> rows;
  for (const auto& cells : table.rows) {
    if (cells[id] == kTotalsRowId) continue;
    EvalReport rep;
    rep.tp = static_cast<std::size_t>(ParseInt(cells[tp]));
    rep.fp = static_cast<std::size_t>(ParseInt(cells[fp]));
    rep.fn = static_cast<std::size_t>(ParseInt(cells[fn]));
    rep.precision = ParseOptional(cells[p]);
    rep.recall = ParseOptional(cells[r]);
    rep.f1 = ParseOptional(cells[f]);
    rows.push_back({cells[id], rep});
  }
  return rows;
}

}  // namespace xroads
