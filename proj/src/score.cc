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

#include "swaf/score.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "swaf/align.h"
#include "swaf/assignment.h"

namespace swaf {

namespace {

ScoreReport FromCounts(TaskKind task, double correct, double predicted,
                       double gold) {
  ScoreReport r;
  r.task = task;
  r.precision = predicted > 0 ? correct / predicted : 0.0;
  r.recall = gold > 0 ? correct / gold : 0.0;
  r.f1 = F1Score(r.precision, r.recall);
  return r;
}

std::vector<std::set<TextSpan>> AsSets(
    const std::vector<MentionCluster> &clusters) {
  std::vector<std::set<TextSpan>> sets;
  for (const auto &c : clusters) {
    std::set<TextSpan> s(c.begin(), c.end());
    if (!s.empty()) sets.push_back(std::move(s));
  }
  return sets;
}

}  // namespace

double F1Score(double precision, double recall) {
  if (precision + recall <= 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

ScoreReport ScoreSlotfill(std::span<const OutputRecord> predicted,
                          const GoldStandard &gold) {
  using Triple = std::tuple<std::string, std::string, std::string>;
  std::set<Triple> gold_set;
  for (const auto &g : gold.fills) {
    gold_set.emplace(g.key.query_id, g.key.slot, g.fill.normalized);
  }
  std::set<Triple> predicted_set;
  for (const auto &r : predicted) {
    const auto &key = std::get<SlotKey>(r.key);
    predicted_set.emplace(key.query_id, key.slot,
                          std::get<SlotFill>(r.value).normalized);
  }
  size_t correct = 0;
  for (const auto &t : predicted_set) correct += gold_set.count(t);
  return FromCounts(TaskKind::kSlotFilling, static_cast<double>(correct),
                    static_cast<double>(predicted_set.size()),
                    static_cast<double>(gold_set.size()));
}

ScoreReport ScoreCeafm(const std::vector<MentionCluster> &predicted,
                       const std::vector<MentionCluster> &gold) {
  auto system = AsSets(predicted);
  auto key = AsSets(gold);
  double system_mentions = 0, gold_mentions = 0;
  for (const auto &s : system) system_mentions += s.size();
  for (const auto &g : key) gold_mentions += g.size();

  std::vector<std::vector<double>> phi(system.size(),
                                       std::vector<double>(key.size(), 0.0));
  for (size_t i = 0; i < system.size(); ++i) {
    for (size_t j = 0; j < key.size(); ++j) {
      double shared = 0;
      for (const auto &m : system[i]) shared += key[j].count(m);
      phi[i][j] = shared;
    }
  }
  double aligned = MaxWeightAssignment(phi).total;
  return FromCounts(TaskKind::kEntityLinking, aligned, system_mentions,
                    gold_mentions);
}

std::vector<MentionCluster> ClustersFromRecords(
    std::span<const OutputRecord> records) {
  std::map<std::string, MentionCluster> by_entity;
  for (const auto &r : records) {
    by_entity[std::get<EntityKey>(r.key).entity_id].push_back(
        std::get<Mention>(r.value).span);
  }
  std::vector<MentionCluster> clusters;
  for (auto &[id, c] : by_entity) clusters.push_back(std::move(c));
  return clusters;
}

std::vector<MentionCluster> ClustersFromGold(const GoldStandard &gold) {
  std::map<std::string, MentionCluster> by_entity;
  for (const auto &m : gold.mentions) by_entity[m.entity_id].push_back(m.span);
  std::vector<MentionCluster> clusters;
  for (auto &[id, c] : by_entity) clusters.push_back(std::move(c));
  return clusters;
}

double AveragePrecision(const std::vector<bool> &matched, size_t num_gold) {
  if (num_gold == 0 || matched.empty()) return 0.0;
  const size_t n = matched.size();
  std::vector<double> precision(n), recall(n);
  size_t tp = 0;
  for (size_t k = 0; k < n; ++k) {
    tp += matched[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gold);
  }
  for (size_t k = n - 1; k > 0; --k) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0, previous_recall = 0;
  for (size_t k = 0; k < n; ++k) {
    ap += (recall[k] - previous_recall) * precision[k];
    previous_recall = recall[k];
  }
  return ap;
}

ScoreReport ScoreDetectionAp(std::span<const OutputRecord> predicted,
                             const GoldStandard &gold, int num_categories,
                             double iou_threshold) {
  ScoreReport report;
  report.task = TaskKind::kObjectDetection;

  // Gold boxes per category, then per image.
  std::map<int, std::map<std::string, std::vector<BBox>>> gold_boxes;
  std::map<int, size_t> gold_count;
  for (const auto &g : gold.boxes) {
    gold_boxes[g.category][g.image_id].push_back(g.box);
    ++gold_count[g.category];
  }
  std::map<int, std::vector<const OutputRecord *>> by_category;
  for (const auto &r : predicted) {
    by_category[std::get<Detection>(r.value).category].push_back(&r);
  }

  std::vector<double> aps;
  for (int c = 1; c <= num_categories; ++c) {
    auto &preds = by_category[c];
    std::stable_sort(preds.begin(), preds.end(),
                     [](const OutputRecord *a, const OutputRecord *b) {
                       return a->confidence > b->confidence;
                     });
    std::map<std::string, std::vector<bool>> taken;
    std::vector<bool> matched;
    matched.reserve(preds.size());
    for (const OutputRecord *r : preds) {
      const auto &image = std::get<ImageKey>(r->key).image_id;
      const auto &box = std::get<Detection>(r->value).box;
      bool tp = false;
      auto cat = gold_boxes.find(c);
      if (cat != gold_boxes.end()) {
        auto img = cat->second.find(image);
        if (img != cat->second.end()) {
          auto &used = taken[image];
          used.resize(img->second.size(), false);
          double best = iou_threshold;
          int match = -1;
          for (size_t g = 0; g < img->second.size(); ++g) {
            if (used[g]) continue;
            double iou = Iou(box, img->second[g]);
            if (iou > best) {
              best = iou;
              match = static_cast<int>(g);
            }
          }
          if (match >= 0) {
            used[match] = true;
            tp = true;
          }
        }
      }
      matched.push_back(tp);
    }
    double ap = AveragePrecision(matched, gold_count[c]);
    report.class_ap[c] = ap;
    aps.push_back(ap);
  }
  if (!aps.empty()) {
    report.mean_ap =
        std::accumulate(aps.begin(), aps.end(), 0.0) / aps.size();
    std::vector<double> sorted = aps;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    report.median_ap = m % 2 == 1 ? sorted[m / 2]
                                  : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  return report;
}

ScoreReport Evaluate(TaskKind task, std::span<const OutputRecord> predicted,
                     const GoldStandard &gold,
                     const CategoryInventory &categories) {
  if (gold.task != task) {
    throw Error(ErrorCode::kTaskMismatch, "gold standard task differs");
  }
  switch (task) {
    case TaskKind::kSlotFilling:
      return ScoreSlotfill(predicted, gold);
    case TaskKind::kEntityLinking:
      return ScoreCeafm(ClustersFromRecords(predicted), ClustersFromGold(gold));
    case TaskKind::kObjectDetection:
      return ScoreDetectionAp(predicted, gold,
                              static_cast<int>(categories.size()));
  }
  return {};
}

}  // namespace swaf
