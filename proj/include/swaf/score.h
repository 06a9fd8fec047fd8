// Copyright 2026 The SWAF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SWAF_SCORE_H_
#define SWAF_SCORE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "swaf/model.h"

namespace swaf {

struct ScoreReport {
  TaskKind task = TaskKind::kSlotFilling;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  // Detection only: AP per category id in 1..C.
  std::map<int, double> class_ap;
  double median_ap = 0;
  double mean_ap = 0;

  // F1 for the text tasks, mAP for detection.
  double primary() const {
    return task == TaskKind::kObjectDetection ? mean_ap : f1;
  }
};

// 2PR / (P + R), 0 when P + R = 0.
double F1Score(double precision, double recall);

// Micro-averaged P/R/F1 over distinct (query, slot, normalized fill) triples.
ScoreReport ScoreSlotfill(std::span<const OutputRecord> predicted,
                          const GoldStandard &gold);

using MentionCluster = std::vector<TextSpan>;

// Mention CEAF: phi(S, G) = |S ∩ G| under an optimal one-to-one cluster
// alignment; P and R divide the aligned total by system and gold mention
// counts.
ScoreReport ScoreCeafm(const std::vector<MentionCluster> &predicted,
                       const std::vector<MentionCluster> &gold);

// Entity-linking records grouped into clusters by entity id.
std::vector<MentionCluster> ClustersFromRecords(
    std::span<const OutputRecord> records);
std::vector<MentionCluster> ClustersFromGold(const GoldStandard &gold);

// Average precision for one ranked list: `matched[k]` says whether the k-th
// prediction (by descending confidence) was a true positive. Area under the
// monotone precision envelope, stepping at every recall change.
double AveragePrecision(const std::vector<bool> &matched, size_t num_gold);

// Per-category AP at IOU > `iou_threshold`, with median and mean over
// categories 1..num_categories (categories without gold boxes score 0).
ScoreReport ScoreDetectionAp(std::span<const OutputRecord> predicted,
                             const GoldStandard &gold, int num_categories,
                             double iou_threshold = 0.5);

// Dispatches to the scorer of `task`.
ScoreReport Evaluate(TaskKind task, std::span<const OutputRecord> predicted,
                     const GoldStandard &gold,
                     const CategoryInventory &categories);

}  // namespace swaf

#endif  // SWAF_SCORE_H_
