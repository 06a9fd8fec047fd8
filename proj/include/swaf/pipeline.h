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

#ifndef SWAF_PIPELINE_H_
#define SWAF_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swaf/features.h"
#include "swaf/fuse.h"
#include "swaf/io.h"
#include "swaf/model.h"
#include "swaf/score.h"
#include "swaf/stacker.h"
#include "swaf/synth.h"

namespace swaf {

// Everything one CLI invocation needs. Built from a config file and then
// overridden by command-line flags.
//
// Config keys (all optional):
//   task              slotfill | entitylink | detection
//   inputs            comma-separated record files
//   gold, docs, model, out
//   seed              unsigned integer, default 42
//   learning_rate, epochs, l2, batch_size, tolerance, threshold
//   roster            comma-separated system ids (fixes the feature order)
//   slots             comma-separated "name:single" or "name:list"
//   entity_types      comma-separated type names
//   categories        object category count C
//   accuracies, confidence_noise, rho, train_keys, test_keys   (synth)
struct RunConfig {
  TaskKind task = TaskKind::kSlotFilling;
  bool task_set = false;
  std::vector<std::string> inputs;
  std::string gold;
  std::string docs;
  std::string model;
  std::string out;
  uint64_t seed = 42;
  TrainConfig train;
  std::optional<Roster> roster;
  std::optional<CategoryInventory> categories;
  SynthSpec synth;

  // The configured inventory, or the task default.
  CategoryInventory Categories() const;
};

// Throws kInvalidSpec for unknown keys or malformed values.
void ApplyConfig(const ConfigMap &config, RunConfig &run);

FeatureLayout MakeLayout(TaskKind task, const Roster &roster,
                         const CategoryInventory &categories, bool has_docs);

// Groups every key's records and extracts one feature row per group.
std::vector<Instance> BuildInstances(const Dataset &dataset,
                                     const FeatureLayout &layout,
                                     std::shared_ptr<const DocumentStore> docs);

// Zeroes every block except the confidences. Used for the
// confidence-only ablation.
void ZeroAuxiliaryFeatures(std::span<Instance> instances,
                           const FeatureLayout &layout);

// Throws kIncompatibleModel unless the dataset's task and active systems
// fit the model's layout.
void CheckCompatible(const StackerModel &model, const Dataset &dataset);

struct TrainResult {
  StackerModel model;
  std::vector<Instance> instances;
  std::vector<double> loss_history;
};

TrainResult TrainStacker(const Dataset &dataset, const GoldStandard &gold,
                         const CategoryInventory &categories,
                         std::shared_ptr<const DocumentStore> docs,
                         const TrainConfig &config,
                         bool confidence_only = false);

struct FusionResult {
  std::vector<Instance> instances;
  std::vector<OutputRecord> output;
};

FusionResult FuseDataset(const StackerModel &model, const Dataset &dataset,
                         std::shared_ptr<const DocumentStore> docs,
                         bool confidence_only = false);

std::string FormatScoreReport(const ScoreReport &report);

// One line per instance: key, canonical value, group size,
// meta-confidence, accepted flag.
std::string FormatInstances(std::span<const Instance> instances);

// Writes `dir`/train.tsv, train.gold.tsv, test.tsv, test.gold.tsv, a
// synth.conf naming the task and inventory and, for text tasks, docs.tsv.
void WriteSynthetic(const SynthData &data, const std::string &dir);

// CLI modes. Each reads and writes files named in `run`; errors propagate
// as swaf::Error.
void RunIngest(const RunConfig &run);
void RunTrain(const RunConfig &run);
void RunPredict(const RunConfig &run);
void RunScore(const RunConfig &run);
void RunVoteSweep(const RunConfig &run);
void RunSynth(const RunConfig &run);

}  // namespace swaf

#endif  // SWAF_PIPELINE_H_
