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

#ifndef SWAF_STACKER_H_
#define SWAF_STACKER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swaf/features.h"
#include "swaf/model.h"

namespace swaf {

// One distinct key-value pair presented to the meta-classifier.
struct Instance {
  ValueGroup group;
  FeatureVector features;
  std::optional<bool> label;
  double meta_confidence = 0;
  bool accepted = false;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
  // 0 means full batch.
  size_t batch_size = 0;
  uint64_t seed = 42;
  // Training stops once the gradient norm drops below this.
  double tolerance = 1e-8;
  double threshold = 0.5;
};

// L2-regularized logistic regression over standardized features:
//   p = sigmoid(w . ((f - mean) / scale) + b)
struct StackerModel {
  FeatureLayout layout;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0;
  double threshold = 0.5;
  double l2 = 0;
  uint64_t seed = 0;

  size_t dimension() const { return weights.size(); }
};

// Untrained model: zero weights, identity standardization.
StackerModel ZeroModel(const FeatureLayout &layout, double threshold = 0.5);

// Marks each instance correct or incorrect against the gold standard:
// slot fills by normalized string match, mentions by exact span linked to
// the key's gold entity (any gold NIL entity for NIL keys), detections by
// greedy confidence-ordered matching to unmatched gold boxes at IOU > 0.5.
void LabelInstances(std::span<Instance> instances, const GoldStandard &gold);

struct LossGradient {
  double loss = 0;
  std::vector<double> weight_gradient;
  double bias_gradient = 0;
};

// Mean cross-entropy plus (l2 / 2) * |w|^2, and its gradient with respect to
// the weights and bias (in standardized feature space).
LossGradient LossAndGradient(const StackerModel &model,
                             std::span<const Instance> batch);

// Fits the model by gradient descent. Standardization statistics come from
// `instances`. Per-epoch training loss is appended to `loss_history` when
// given.
StackerModel Train(std::span<const Instance> instances,
                   const FeatureLayout &layout, const TrainConfig &config,
                   std::vector<double> *loss_history = nullptr);

struct Prediction {
  double probability = 0;
  bool accepted = false;
};

// accepted = probability > threshold (strict).
Prediction Predict(const StackerModel &model, const FeatureVector &features);

// Fills meta_confidence and accepted on every instance.
void PredictAll(const StackerModel &model, std::span<Instance> instances);

double Sigmoid(double z);

}  // namespace swaf

#endif  // SWAF_STACKER_H_
