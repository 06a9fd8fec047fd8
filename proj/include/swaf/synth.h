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

#ifndef SWAF_SYNTH_H_
#define SWAF_SYNTH_H_

#include <cstdint>
#include <vector>

#include "swaf/features.h"
#include "swaf/io.h"
#include "swaf/model.h"

namespace swaf {

// Parameters of the synthetic ensemble generator.
//
// Each simulated system answers every gold slot of every key; an answer is
// correct with the system's accuracy. Correct answers cite the gold
// provenance with probability `rho` and a random location otherwise, so
// provenance agreement correlates with correctness. Confidences are noisy
// and only weakly separate correct from incorrect answers.
//
// Per task, `accuracy` means:
//   slotfill   - probability an emitted fill is a gold fill
//   entitylink - probability a mention is a gold mention linked to the
//                right entity; `rho` is the chance its boundaries are exact
//   detection  - probability a box matches a gold object at IOU > 0.5;
//                `rho` is the chance the box is tight (<= 2% jitter per
//                edge instead of <= 6%)
struct SynthSpec {
  TaskKind task = TaskKind::kSlotFilling;
  std::vector<double> accuracies = {0.35, 0.4125, 0.475, 0.5375, 0.6};
  double confidence_noise = 0.15;
  double rho = 0.8;
  size_t train_keys = 500;
  size_t test_keys = 500;
  // Object categories (detection only).
  int num_categories = 10;
};

struct SynthSplit {
  Dataset dataset;
  GoldStandard gold;
};

struct SynthData {
  TaskKind task = TaskKind::kSlotFilling;
  Roster roster;
  CategoryInventory categories;
  SynthSplit train;
  SynthSplit test;
  // Documents and key documents of both splits (empty for detection).
  DocumentStore documents;
};

// Throws kInvalidSpec for out-of-range parameters.
void ValidateSynthSpec(const SynthSpec &spec);

// Deterministic for a given (spec, seed).
SynthData GenerateSynthetic(const SynthSpec &spec, uint64_t seed);

}  // namespace swaf

#endif  // SWAF_SYNTH_H_
