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

#include "swaf/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <utility>

#include "swaf/align.h"

namespace swaf {

namespace {

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> items;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
      item.remove_prefix(1);
    }
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
      item.remove_suffix(1);
    }
    if (!item.empty()) items.emplace_back(item);
    pos = comma + 1;
  }
  return items;
}

double ConfigDouble(const std::string &value, const std::string &key) {
  try {
    return ParseDouble(value, key);
  } catch (const Error &e) {
    throw Error(ErrorCode::kInvalidSpec, e.message());
  }
}

int64_t ConfigInt(const std::string &value, const std::string &key,
                  int64_t min) {
  int64_t v;
  try {
    v = ParseInt(value, key);
  } catch (const Error &e) {
    throw Error(ErrorCode::kInvalidSpec, e.message());
  }
  if (v < min) {
    throw Error(ErrorCode::kInvalidSpec,
                key + " must be >= " + std::to_string(min));
  }
  return v;
}

CategoryInventory ParseSlots(const std::string &value) {
  std::vector<SlotSpec> slots;
  for (const auto &item : SplitList(value)) {
    size_t colon = item.rfind(':');
    std::string kind = colon == std::string::npos ? "" : item.substr(colon + 1);
    if (kind != "single" && kind != "list") {
      throw Error(ErrorCode::kInvalidSpec,
                  "slot '" + item + "' needs a :single or :list suffix");
    }
    slots.push_back({item.substr(0, colon), kind == "single"});
  }
  return CategoryInventory::Slots(std::move(slots));
}

std::vector<OutputRecord> RecordsOf(const Dataset &dataset,
                                    std::string_view system) {
  std::vector<OutputRecord> out;
  for (const auto &r : dataset.records) {
    if (r.system == system) out.push_back(r);
  }
  return out;
}

std::shared_ptr<const DocumentStore> LoadDocs(const RunConfig &run) {
  if (run.docs.empty()) return nullptr;
  return std::make_shared<const DocumentStore>(ReadDocuments(run.docs));
}

void Require(const std::string &value, const char *flag, const char *mode) {
  if (value.empty()) {
    throw Error(ErrorCode::kInvalidSpec,
                std::string(mode) + " needs --" + flag);
  }
}

void RequireInputs(const RunConfig &run, const char *mode) {
  if (run.inputs.empty()) {
    throw Error(ErrorCode::kInvalidSpec, std::string(mode) + " needs --inputs");
  }
}

void WriteOrPrint(const std::string &path, const std::string &content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    WriteFileAtomic(path, content);
  }
}

}  // namespace

CategoryInventory RunConfig::Categories() const {
  return categories ? *categories : CategoryInventory::Default(task);
}

void ApplyConfig(const ConfigMap &config, RunConfig &run) {
  for (const auto &[key, value] : config) {
    if (key == "task") {
      try {
        run.task = ParseTaskKind(value);
      } catch (const Error &e) {
        throw Error(ErrorCode::kInvalidSpec, e.message());
      }
      run.task_set = true;
    } else if (key == "inputs") {
      run.inputs = SplitList(value);
    } else if (key == "gold") {
      run.gold = value;
    } else if (key == "docs") {
      run.docs = value;
    } else if (key == "model") {
      run.model = value;
    } else if (key == "out") {
      run.out = value;
    } else if (key == "seed") {
      run.seed = static_cast<uint64_t>(ConfigInt(value, key, 0));
    } else if (key == "learning_rate") {
      run.train.learning_rate = ConfigDouble(value, key);
    } else if (key == "epochs") {
      run.train.epochs = static_cast<int>(ConfigInt(value, key, 1));
    } else if (key == "l2") {
      run.train.l2 = ConfigDouble(value, key);
    } else if (key == "batch_size") {
      run.train.batch_size = static_cast<size_t>(ConfigInt(value, key, 0));
    } else if (key == "tolerance") {
      run.train.tolerance = ConfigDouble(value, key);
    } else if (key == "threshold") {
      run.train.threshold = ConfigDouble(value, key);
    } else if (key == "roster") {
      run.roster = Roster(SplitList(value));
    } else if (key == "slots") {
      run.categories = ParseSlots(value);
    } else if (key == "entity_types") {
      run.categories = CategoryInventory::EntityTypes(SplitList(value));
    } else if (key == "categories") {
      const int count = static_cast<int>(ConfigInt(value, key, 1));
      run.categories = CategoryInventory::ObjectCategories(count);
      run.synth.num_categories = count;
    } else if (key == "accuracies") {
      run.synth.accuracies.clear();
      for (const auto &a : SplitList(value)) {
        run.synth.accuracies.push_back(ConfigDouble(a, key));
      }
    } else if (key == "confidence_noise") {
      run.synth.confidence_noise = ConfigDouble(value, key);
    } else if (key == "rho") {
      run.synth.rho = ConfigDouble(value, key);
    } else if (key == "train_keys") {
      run.synth.train_keys = static_cast<size_t>(ConfigInt(value, key, 0));
    } else if (key == "test_keys") {
      run.synth.test_keys = static_cast<size_t>(ConfigInt(value, key, 0));
    } else {
      throw Error(ErrorCode::kInvalidSpec, "unknown config key '" + key + "'");
    }
  }
  if (run.categories && run.task_set && run.categories->task() != run.task) {
    throw Error(ErrorCode::kInvalidSpec,
                "category inventory does not match task " +
                    std::string(TaskName(run.task)));
  }
}

FeatureLayout MakeLayout(TaskKind task, const Roster &roster,
                         const CategoryInventory &categories, bool has_docs) {
  return FeatureLayout(task, roster, categories,
                       has_docs && IsTextTask(task));
}

std::vector<Instance> BuildInstances(const Dataset &dataset,
                                     const FeatureLayout &layout,
                                     std::shared_ptr<const DocumentStore> docs) {
  if (dataset.task != layout.task()) {
    throw Error(ErrorCode::kTaskMismatch, "dataset and layout tasks differ");
  }
  FeatureExtractor extractor(layout, std::move(docs));
  std::vector<Instance> instances;
  for (auto &group :
       GroupAllValues(dataset.records, dataset.task, layout.roster())) {
    Instance inst;
    inst.features = extractor.Extract(group);
    inst.group = std::move(group);
    instances.push_back(std::move(inst));
  }
  return instances;
}

void ZeroAuxiliaryFeatures(std::span<Instance> instances,
                           const FeatureLayout &layout) {
  const size_t first = layout.overlap_offset();
  for (auto &inst : instances) {
    std::fill(inst.features.values.begin() + static_cast<ptrdiff_t>(first),
              inst.features.values.end(), 0.0);
  }
}

void CheckCompatible(const StackerModel &model, const Dataset &dataset) {
  const FeatureLayout &layout = model.layout;
  if (dataset.task != layout.task()) {
    throw Error(ErrorCode::kIncompatibleModel,
                "model task is " + std::string(TaskName(layout.task())) +
                    ", data task is " + std::string(TaskName(dataset.task)));
  }
  for (const auto &system : dataset.ActiveSystems()) {
    if (!layout.roster().Contains(system)) {
      throw Error(ErrorCode::kIncompatibleModel,
                  "system '" + system + "' is not in the model roster");
    }
  }
  if (model.dimension() != layout.dimension()) {
    throw Error(ErrorCode::kIncompatibleModel,
                "model weights do not match its layout");
  }
}

TrainResult TrainStacker(const Dataset &dataset, const GoldStandard &gold,
                         const CategoryInventory &categories,
                         std::shared_ptr<const DocumentStore> docs,
                         const TrainConfig &config, bool confidence_only) {
  if (gold.task != dataset.task) {
    throw Error(ErrorCode::kTaskMismatch, "gold and data tasks differ");
  }
  const bool has_docs = docs != nullptr;
  FeatureLayout layout =
      MakeLayout(dataset.task, dataset.roster, categories, has_docs);
  TrainResult result;
  result.instances = BuildInstances(dataset, layout, std::move(docs));
  LabelInstances(result.instances, gold);
  if (confidence_only) ZeroAuxiliaryFeatures(result.instances, layout);
  result.model =
      Train(result.instances, layout, config, &result.loss_history);
  return result;
}

FusionResult FuseDataset(const StackerModel &model, const Dataset &dataset,
                         std::shared_ptr<const DocumentStore> docs,
                         bool confidence_only) {
  CheckCompatible(model, dataset);
  const FeatureLayout &layout = model.layout;
  FusionResult result;
  result.instances = BuildInstances(dataset, layout, std::move(docs));
  if (confidence_only) ZeroAuxiliaryFeatures(result.instances, layout);
  PredictAll(model, result.instances);
  result.output = Postprocess(layout.task(), result.instances,
                              layout.categories(), layout.roster());
  return result;
}

std::string FormatScoreReport(const ScoreReport &report) {
  std::ostringstream os;
  if (report.task == TaskKind::kObjectDetection) {
    os << "mean_ap\t" << FormatDouble(report.mean_ap) << "\tmedian_ap\t"
       << FormatDouble(report.median_ap);
  } else {
    os << "precision\t" << FormatDouble(report.precision) << "\trecall\t"
       << FormatDouble(report.recall) << "\tf1\t" << FormatDouble(report.f1);
  }
  return os.str();
}

std::string FormatInstances(std::span<const Instance> instances) {
  std::ostringstream os;
  os << "# key\tvalue\tsystems\tmeta_confidence\taccepted\n";
  for (const auto &inst : instances) {
    os << EscapeField(KeyString(inst.group.key)) << '\t'
       << EscapeField(ValueString(inst.group.canonical)) << '\t'
       << inst.group.size() << '\t' << FormatDouble(inst.meta_confidence)
       << '\t' << (inst.accepted ? 1 : 0) << '\n';
  }
  return os.str();
}

void WriteSynthetic(const SynthData &data, const std::string &dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  auto write = [&](const char *name, const std::string &content) {
    WriteFileAtomic((root / name).string(), content);
  };
  write("train.tsv", FormatRecords(data.train.dataset.records));
  write("train.gold.tsv", FormatGold(data.train.gold));
  write("test.tsv", FormatRecords(data.test.dataset.records));
  write("test.gold.tsv", FormatGold(data.test.gold));
  if (IsTextTask(data.task)) write("docs.tsv", FormatDocuments(data.documents));
  // Lets later modes pick up the inventory the data was drawn from.
  std::string conf = "task = " + std::string(TaskName(data.task)) + "\n";
  if (data.task == TaskKind::kObjectDetection) {
    conf += "categories = " + std::to_string(data.categories.size()) + "\n";
  }
  write("synth.conf", conf);
}

void RunIngest(const RunConfig &run) {
  RequireInputs(run, "ingest");
  const CategoryInventory categories = run.Categories();
  Dataset ds = Ingest(run.inputs, run.task, run.roster, &categories);
  WriteOrPrint(run.out, FormatRecords(ds.records));
  std::cerr << "ingested " << ds.records.size() << " records from "
            << ds.ActiveSystems().size() << " systems\n";
}

void RunTrain(const RunConfig &run) {
  RequireInputs(run, "train");
  Require(run.gold, "gold", "train");
  Require(run.model, "model", "train");
  const CategoryInventory categories = run.Categories();
  Dataset ds = Ingest(run.inputs, run.task, run.roster, &categories);
  GoldStandard gold = ReadGold(run.gold, run.task);
  TrainConfig config = run.train;
  config.seed = run.seed;
  TrainResult result =
      TrainStacker(ds, gold, categories, LoadDocs(run), config);

  size_t positives = 0;
  for (const auto &inst : result.instances) positives += *inst.label ? 1 : 0;
  std::ostringstream log;
  log << "instances\t" << result.instances.size() << '\n'
      << "positives\t" << positives << '\n'
      << "epochs\t" << result.loss_history.size() << '\n';
  for (size_t e = 0; e < result.loss_history.size(); ++e) {
    log << "loss\t" << e + 1 << '\t' << FormatDouble(result.loss_history[e])
        << '\n';
  }
  WriteFileAtomic(run.model, FormatModel(result.model));
  WriteFileAtomic(run.model + ".log", log.str());
}

void RunPredict(const RunConfig &run) {
  RequireInputs(run, "predict");
  Require(run.model, "model", "predict");
  Require(run.out, "out", "predict");
  StackerModel model = ParseModel(ReadFile(run.model));
  const FeatureLayout &layout = model.layout;
  if (run.task_set && run.task != layout.task()) {
    throw Error(ErrorCode::kIncompatibleModel,
                "model was trained for " + std::string(TaskName(layout.task())));
  }
  Dataset ds = Ingest(run.inputs, layout.task(), std::nullopt,
                      &layout.categories());
  CheckCompatible(model, ds);
  ds.roster = layout.roster();
  std::shared_ptr<const DocumentStore> docs;
  if (layout.cosine_enabled()) {
    if (run.docs.empty()) {
      throw Error(ErrorCode::kIncompatibleModel,
                  "model uses document features; pass --docs");
    }
    docs = LoadDocs(run);
  }
  FusionResult result = FuseDataset(model, ds, docs);
  WriteFileAtomic(run.out, FormatRecords(result.output));
  WriteFileAtomic(run.out + ".instances.tsv",
                  FormatInstances(result.instances));
}

void RunScore(const RunConfig &run) {
  RequireInputs(run, "score");
  Require(run.gold, "gold", "score");
  const CategoryInventory categories = run.Categories();
  Dataset ds = Ingest(run.inputs, run.task, std::nullopt, &categories);
  GoldStandard gold = ReadGold(run.gold, run.task);
  std::ostringstream os;
  for (const auto &system : ds.ActiveSystems()) {
    auto records = RecordsOf(ds, system);
    os << EscapeField(system) << '\t'
       << FormatScoreReport(Evaluate(run.task, records, gold, categories))
       << '\n';
  }
  WriteOrPrint(run.out, os.str());
}

void RunVoteSweep(const RunConfig &run) {
  RequireInputs(run, "vote-sweep");
  Require(run.gold, "gold", "vote-sweep");
  Require(run.out, "out", "vote-sweep");
  const CategoryInventory categories = run.Categories();
  Dataset ds = Ingest(run.inputs, run.task, run.roster, &categories);
  GoldStandard gold = ReadGold(run.gold, run.task);
  auto groups = GroupAllValues(ds.records, run.task, ds.roster);
  VoteResult vote =
      OracleVote(groups, gold, run.task, ds.roster.size(), categories);
  std::ostringstream os;
  os << "# threshold\tscores\n";
  for (const auto &[t, report] : vote.curve) {
    os << t << '\t' << FormatScoreReport(report) << '\n';
  }
  os << "best\t" << vote.best_threshold << '\n';
  WriteFileAtomic(run.out, os.str());
  WriteFileAtomic(run.out + ".best.tsv", FormatRecords(vote.output));
}

void RunSynth(const RunConfig &run) {
  Require(run.out, "out", "synth");
  SynthSpec spec = run.synth;
  spec.task = run.task;
  WriteSynthetic(GenerateSynthetic(spec, run.seed), run.out);
}

}  // namespace swaf
