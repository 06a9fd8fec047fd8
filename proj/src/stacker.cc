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

#include "swaf/stacker.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "swaf/align.h"
#include "swaf/random.h"

namespace swaf {

namespace {

// log(1 + e^z) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void CheckDimension(const StackerModel &model, const FeatureVector &f) {
  if (f.values.size() != model.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature vector has " + std::to_string(f.values.size()) +
                    " entries, model expects " +
                    std::to_string(model.dimension()));
  }
}

double Margin(const StackerModel &model, const std::vector<double> &f) {
  double z = model.bias;
  for (size_t j = 0; j < f.size(); ++j) {
    z += model.weights[j] * ((f[j] - model.mean[j]) / model.scale[j]);
  }
  return z;
}

// Loss and gradient over a subset of standardized rows.
LossGradient Evaluate(const std::vector<std::vector<double>> &rows,
                      const std::vector<double> &labels,
                      std::span<const size_t> subset,
                      const std::vector<double> &weights, double bias,
                      double l2) {
  const size_t d = weights.size();
  LossGradient out;
  out.weight_gradient.assign(d, 0.0);
  for (size_t i : subset) {
    const auto &x = rows[i];
    double z = bias;
    for (size_t j = 0; j < d; ++j) z += weights[j] * x[j];
    out.loss += Softplus(z) - labels[i] * z;
    double residual = Sigmoid(z) - labels[i];
    for (size_t j = 0; j < d; ++j) out.weight_gradient[j] += residual * x[j];
    out.bias_gradient += residual;
  }
  const double n = static_cast<double>(subset.size());
  out.loss /= n;
  out.bias_gradient /= n;
  double norm2 = 0;
  for (size_t j = 0; j < d; ++j) {
    out.weight_gradient[j] = out.weight_gradient[j] / n + l2 * weights[j];
    norm2 += weights[j] * weights[j];
  }
  out.loss += 0.5 * l2 * norm2;
  return out;
}

std::vector<double> Standardize(const StackerModel &model,
                                const std::vector<double> &f) {
  std::vector<double> z(f.size());
  for (size_t j = 0; j < f.size(); ++j) {
    z[j] = (f[j] - model.mean[j]) / model.scale[j];
  }
  return z;
}

void LabelSlotFills(std::span<Instance> instances, const GoldStandard &gold) {
  std::set<std::tuple<std::string, std::string, std::string>> correct;
  for (const auto &g : gold.fills) {
    correct.emplace(g.key.query_id, g.key.slot, g.fill.normalized);
  }
  for (auto &inst : instances) {
    const auto &key = std::get<SlotKey>(inst.group.key);
    const auto &fill = std::get<SlotFill>(inst.group.canonical);
    inst.label = correct.count({key.query_id, key.slot, fill.normalized}) > 0;
  }
}

void LabelMentions(std::span<Instance> instances, const GoldStandard &gold) {
  std::map<TextSpan, std::set<std::string>> entities_at;
  for (const auto &g : gold.mentions) entities_at[g.span].insert(g.entity_id);
  for (auto &inst : instances) {
    const auto &entity = std::get<EntityKey>(inst.group.key).entity_id;
    const auto &span = std::get<Mention>(inst.group.canonical).span;
    bool label = false;
    auto it = entities_at.find(span);
    if (it != entities_at.end()) {
      if (IsNilId(entity)) {
        label = std::any_of(it->second.begin(), it->second.end(),
                            [](const std::string &e) { return IsNilId(e); });
      } else {
        label = it->second.count(entity) > 0;
      }
    }
    inst.label = label;
  }
}

void LabelDetections(std::span<Instance> instances, const GoldStandard &gold) {
  std::map<std::pair<std::string, int>, std::vector<BBox>> gold_boxes;
  for (const auto &g : gold.boxes) {
    gold_boxes[{g.image_id, g.category}].push_back(g.box);
  }
  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return instances[a].group.canonical_record().confidence >
           instances[b].group.canonical_record().confidence;
  });
  std::map<std::pair<std::string, int>, std::vector<bool>> used;
  for (size_t idx : order) {
    Instance &inst = instances[idx];
    const auto &image = std::get<ImageKey>(inst.group.key).image_id;
    const auto &det = std::get<Detection>(inst.group.canonical);
    inst.label = false;
    auto it = gold_boxes.find({image, det.category});
    if (it == gold_boxes.end()) continue;
    auto &taken = used[it->first];
    taken.resize(it->second.size(), false);
    double best = kSameObjectIou;
    std::optional<size_t> match;
    for (size_t g = 0; g < it->second.size(); ++g) {
      if (taken[g]) continue;
      double iou = Iou(det.box, it->second[g]);
      if (iou > best) {
        best = iou;
        match = g;
      }
    }
    if (match) {
      taken[*match] = true;
      inst.label = true;
    }
  }
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

StackerModel ZeroModel(const FeatureLayout &layout, double threshold) {
  StackerModel model;
  model.layout = layout;
  const size_t d = layout.dimension();
  model.mean.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  model.weights.assign(d, 0.0);
  model.threshold = threshold;
  return model;
}

void LabelInstances(std::span<Instance> instances, const GoldStandard &gold) {
  for (const auto &inst : instances) {
    if (TaskOf(inst.group.key) != gold.task) {
      throw Error(ErrorCode::kTaskMismatch,
                  "gold standard is for " + std::string(TaskName(gold.task)));
    }
  }
  switch (gold.task) {
    case TaskKind::kSlotFilling:
      LabelSlotFills(instances, gold);
      break;
    case TaskKind::kEntityLinking:
      LabelMentions(instances, gold);
      break;
    case TaskKind::kObjectDetection:
      LabelDetections(instances, gold);
      break;
  }
}

LossGradient LossAndGradient(const StackerModel &model,
                             std::span<const Instance> batch) {
  if (batch.empty()) {
    throw Error(ErrorCode::kInvalidValue, "empty batch");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  rows.reserve(batch.size());
  for (const auto &inst : batch) {
    CheckDimension(model, inst.features);
    if (!inst.label) {
      throw Error(ErrorCode::kInvalidValue, "unlabeled instance in batch");
    }
    rows.push_back(Standardize(model, inst.features.values));
    labels.push_back(*inst.label ? 1.0 : 0.0);
  }
  std::vector<size_t> all(rows.size());
  std::iota(all.begin(), all.end(), size_t{0});
  return Evaluate(rows, labels, all, model.weights, model.bias, model.l2);
}

StackerModel Train(std::span<const Instance> instances,
                   const FeatureLayout &layout, const TrainConfig &config,
                   std::vector<double> *loss_history) {
  if (!(config.learning_rate > 0) || config.epochs < 1 || config.l2 < 0 ||
      !(config.threshold > 0 && config.threshold < 1)) {
    throw Error(ErrorCode::kInvalidSpec, "invalid training configuration");
  }
  const size_t d = layout.dimension();
  const size_t n = instances.size();
  size_t positives = 0;
  for (const auto &inst : instances) {
    if (inst.features.values.size() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "instance has " + std::to_string(inst.features.values.size()) +
                      " features, layout has " + std::to_string(d));
    }
    if (!inst.label) {
      throw Error(ErrorCode::kInvalidValue, "unlabeled training instance");
    }
    positives += *inst.label ? 1 : 0;
  }
  if (positives == 0 || positives == n) {
    throw Error(ErrorCode::kDegenerateLabels,
                "training set needs both correct and incorrect instances");
  }

  StackerModel model = ZeroModel(layout, config.threshold);
  model.l2 = config.l2;
  model.seed = config.seed;

  for (size_t j = 0; j < d; ++j) {
    double sum = 0;
    for (const auto &inst : instances) sum += inst.features.values[j];
    const double mean = sum / static_cast<double>(n);
    double var = 0;
    for (const auto &inst : instances) {
      double diff = inst.features.values[j] - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    model.mean[j] = mean;
    model.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  rows.reserve(n);
  for (const auto &inst : instances) {
    rows.push_back(Standardize(model, inst.features.values));
    labels.push_back(*inst.label ? 1.0 : 0.0);
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t batch = config.batch_size == 0 || config.batch_size >= n
                           ? n
                           : config.batch_size;
  SplitMix64 rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch == n) {
      LossGradient g =
          Evaluate(rows, labels, order, model.weights, model.bias, model.l2);
      double norm2 = g.bias_gradient * g.bias_gradient;
      for (double v : g.weight_gradient) norm2 += v * v;
      if (std::sqrt(norm2) < config.tolerance) break;
      for (size_t j = 0; j < d; ++j) {
        model.weights[j] -= config.learning_rate * g.weight_gradient[j];
      }
      model.bias -= config.learning_rate * g.bias_gradient;
    } else {
      rng.Shuffle(order);
      for (size_t start = 0; start < n; start += batch) {
        std::span<const size_t> subset(order.data() + start,
                                       std::min(batch, n - start));
        LossGradient g = Evaluate(rows, labels, subset, model.weights,
                                  model.bias, model.l2);
        for (size_t j = 0; j < d; ++j) {
          model.weights[j] -= config.learning_rate * g.weight_gradient[j];
        }
        model.bias -= config.learning_rate * g.bias_gradient;
      }
    }
    if (loss_history != nullptr) {
      std::vector<size_t> all(n);
      std::iota(all.begin(), all.end(), size_t{0});
      loss_history->push_back(
          Evaluate(rows, labels, all, model.weights, model.bias, model.l2)
              .loss);
    }
  }
  return model;
}

Prediction Predict(const StackerModel &model, const FeatureVector &features) {
  CheckDimension(model, features);
  Prediction p;
  p.probability = Sigmoid(Margin(model, features.values));
  p.accepted = p.probability > model.threshold;
  return p;
}

void PredictAll(const StackerModel &model, std::span<Instance> instances) {
  for (auto &inst : instances) {
    Prediction p = Predict(model, inst.features);
    inst.meta_confidence = p.probability;
    inst.accepted = p.accepted;
  }
}

}  // namespace swaf
