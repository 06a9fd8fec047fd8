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

#ifndef SWAF_FUSE_H_
#define SWAF_FUSE_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swaf/model.h"
#include "swaf/score.h"
#include "swaf/stacker.h"

namespace swaf {

// System id written on fused output records.
inline constexpr char kFusedSystem[] = "swaf";

// Keeps every accepted fill of a list-valued slot and only the highest
// meta-confidence fill of a single-valued slot (ties broken by the roster
// position of the fill's canonical system, then by fill).
std::vector<OutputRecord> PostprocessSlotfill(
    std::span<const Instance> accepted, const CategoryInventory &slots,
    const Roster &roster);

struct ClusterMention {
  Mention mention;
  double confidence = 0;
};

struct EntityCluster {
  std::string entity_id;
  std::vector<ClusterMention> mentions;
};

// Unites per-system NIL clusters that share at least one mention (spans in
// the same document that overlap). Each merged cluster gets a fresh id
// NILE0001, NILE0002, ... in order of its smallest mention. Identical spans
// inside a merged cluster are collapsed, keeping the highest confidence.
// Only instances keyed by NIL ids are considered.
std::vector<EntityCluster> MergeNilClusters(std::span<const Instance> accepted);

// Entity-linking output: KB-linked mentions as-is plus merged NIL clusters.
std::vector<OutputRecord> PostprocessEntityLinking(
    std::span<const Instance> accepted);

// The box reported for an accepted detection group: the sole box for N=1,
// the higher-confidence system's box for N=2, otherwise the box with the
// largest summed pairwise intersection area with the other members. Ties go
// to roster order.
BBox SelectBoundingBox(const ValueGroup &group, const Roster &roster);

std::vector<OutputRecord> PostprocessDetection(
    std::span<const Instance> accepted, const Roster &roster);

// Task dispatch over the accepted subset of `instances`.
std::vector<OutputRecord> Postprocess(TaskKind task,
                                      std::span<const Instance> instances,
                                      const CategoryInventory &categories,
                                      const Roster &roster);

// Output of count-threshold voting: the canonical record of every group with
// at least `threshold` contributing systems.
std::vector<OutputRecord> VoteOutput(std::span<const ValueGroup> groups,
                                     size_t threshold);

struct VoteResult {
  size_t best_threshold = 1;
  std::vector<OutputRecord> output;
  ScoreReport score;
  // (threshold, score) for every threshold 1..S.
  std::vector<std::pair<size_t, ScoreReport>> curve;
};

// Sweeps thresholds 1..S against gold and keeps the best primary metric
// (F1, or mAP for detection). Ties keep the smaller threshold.
VoteResult OracleVote(std::span<const ValueGroup> groups,
                      const GoldStandard &gold, TaskKind task,
                      size_t num_systems, const CategoryInventory &categories);

}  // namespace swaf

#endif  // SWAF_FUSE_H_
