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
#ifndef XROADS_EVALUATION_H_
#define XROADS_EVALUATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xroads/geometry.h"

namespace xroads {

// Point-in-box matching treats each detection's center as the detected
// intersection. IoU matching is the conventional overlap >= 0.5 criterion,
// kept for comparison only.
enum class MatchMode { kPoint, kIou50 };

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // (detection index, ground-truth index), in processing order.
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Detections are visited by descending score, ties by input index. In point
// mode a center inside several unserved boxes (boundary inclusive) credits
// the smallest-area one (ties: lowest index); a center whose containing boxes
// are all served already counts as FP. Unserved boxes are FN.
MatchResult MatchDetections(std::span<const ScoredBox> detections, std::span<const Box> gts,
                            MatchMode mode = MatchMode::kPoint);

struct PrecisionRecall {
  std::optional<double> precision;  // absent when tp + fp == 0
  std::optional<double> recall;     // absent when tp + fn == 0
};

PrecisionRecall ComputePrecisionRecall(std::size_t tp, std::size_t fp, std::size_t fn);
inline PrecisionRecall ComputePrecisionRecall(const MatchResult& m) {
  return ComputePrecisionRecall(m.tp, m.fp, m.fn);
}

// Harmonic mean; 0 when both are 0, absent if either input is absent.
std::optional<double> F1Score(std::optional<double> precision, std::optional<double> recall);

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0;
  std::optional<double> precision, recall, f1;
};

EvalReport MakeReport(const MatchResult& m);

enum class Averaging { kMicro, kMacro };

struct TileEvaluation {
  std::string tile_id;
  MatchResult match;
};

// Micro sums the counts before computing ratios; macro averages the defined
// per-tile ratios. Counts are always summed.
EvalReport Aggregate(std::span<const TileEvaluation> tiles, Averaging averaging = Averaging::kMicro);

inline constexpr const char* kTotalsRowId = "TOTAL";

// tile_id,tp,fp,fn,precision,recall,f1 with one row per tile and a final
// TOTAL row. Absent ratios are written as NA.
std::string EvaluationCsv(std::span<const TileEvaluation> tiles, Averaging averaging = Averaging::kMicro);

struct EvaluationCsvRow {
  std::string tile_id;
  EvalReport report;
};
// Returns the per-tile rows only; the TOTAL row is dropped.
std::vector<EvaluationCsvRow> ParseEvaluationCsv(const std::string& text);

}  // namespace xroads

#endif  // XROADS_EVALUATION_H_
