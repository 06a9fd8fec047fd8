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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Runs the oracle checks, the synthetic end-to-end comparison and
// the determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.h"
#include "swaf/align.h"
#include "swaf/features.h"
#include "swaf/fuse.h"
#include "swaf/pipeline.h"
#include "swaf/score.h"
#include "swaf/stacker.h"
#include "swaf/synth.h"

namespace swaf {
namespace {

namespace fs = std::filesystem;
using testing::BoxRecord;
using testing::MakeGroup;
using testing::MentionRecord;
using testing::SlotRecord;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char *name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string Fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// PO and BBO against the offset/cell enumeration oracle.
Outcome JaccardOracle() {
  SplitMix64 rng(1001);
  double po_err = 0, bbo_err = 0;
  for (int i = 0; i < 1000; ++i) {
    ValueGroup g = testing::RandomTextGroup(rng, 6);
    for (const auto &[id, r] : g.members) {
      po_err = std::max(po_err, std::abs(ProvenanceOffsetScore(g, id) -
                                         testing::OraclePo(g, id)));
    }
  }
  for (int i = 0; i < 1000; ++i) {
    ValueGroup g = testing::RandomBoxGroup(rng, 6);
    for (const auto &[id, r] : g.members) {
      bbo_err = std::max(bbo_err, std::abs(BboxOverlapScore(g, id) -
                                           testing::OracleBbo(g, id)));
    }
  }
  return {po_err <= 1e-12 && bbo_err <= 1e-12,
          Fmt("1000+1000 groups, max |PO-oracle| %.3g, max |BBO-oracle| %.3g",
              po_err, bbo_err)};
}

Outcome GradientCheck() {
  SplitMix64 rng(1002);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t dim = 1 + rng.Below(12);
    auto batch = testing::RandomBatch(rng, dim, 1 + rng.Below(40));
    StackerModel m = testing::RandomModel(rng, dim, rng.Uniform(0, 0.1));
    worst = std::max(worst, testing::GradientRelativeError(m, batch, 1e-5));
  }
  return {worst < 1e-6,
          Fmt("100 trials, h=1e-5, max relative error %.3g", worst)};
}

Outcome ScorerOracles() {
  SplitMix64 rng(1003);
  int ceaf_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TextSpan> pool;
    const int mentions = 1 + static_cast<int>(rng.Below(12));
    for (int m = 0; m < mentions; ++m) pool.push_back({"d", m, m});
    auto sys = testing::RandomClustering(rng, pool, 6);
    auto gold = testing::RandomClustering(rng, pool, 6);
    auto got = ScoreCeafm(sys, gold);
    auto want = testing::OracleCeaf(sys, gold);
    if (got.precision != want.precision || got.recall != want.recall ||
        got.f1 != want.f1) {
      ++ceaf_bad;
    }
  }

  double ap_err = 0;
  for (int trial = 0; trial < 200; ++trial) {
    GoldStandard gold;
    gold.task = TaskKind::kObjectDetection;
    const int classes = 1 + static_cast<int>(rng.Below(3));
    for (int g = 0, n = 1 + static_cast<int>(rng.Below(6)); g < n; ++g) {
      gold.boxes.push_back({"i" + std::to_string(rng.Below(2)),
                            1 + static_cast<int>(rng.Below(classes)),
                            testing::RandomIntBox(rng, 12)});
    }
    std::vector<OutputRecord> pred;
    for (int p = 0, n = static_cast<int>(rng.Below(11)); p < n; ++p) {
      if (rng.Bernoulli(0.6)) {
        const auto &g = gold.boxes[rng.Below(gold.boxes.size())];
        BBox box = g.box;
        box.ymax += static_cast<double>(rng.Below(2));
        pred.push_back(BoxRecord("s", g.image_id, g.category, box,
                                 static_cast<double>(rng.Below(5)) / 4));
      } else {
        pred.push_back(BoxRecord("s", "i" + std::to_string(rng.Below(2)),
                                 1 + static_cast<int>(rng.Below(classes)),
                                 testing::RandomIntBox(rng, 12),
                                 static_cast<double>(rng.Below(5)) / 4));
      }
    }
    auto got = ScoreDetectionAp(pred, gold, classes);
    auto want = testing::OracleClassAp(pred, gold, classes);
    for (int c = 1; c <= classes; ++c) {
      ap_err = std::max(ap_err, std::abs(got.class_ap.at(c) - want.at(c)));
    }
  }

  // Hand-counted slot-fill fixtures.
  GoldStandard gold;
  gold.task = TaskKind::kSlotFilling;
  for (int i = 0; i < 8; ++i) {
    gold.fills.push_back(
        {{"q", "per:title"}, MakeSlotFill("g" + std::to_string(i)), {"d", 0, 1}});
  }
  std::vector<OutputRecord> half = {
      SlotRecord("s", "q", "per:title", "g0", 0.5, {"d", 0, 1}),
      SlotRecord("s", "q", "per:title", "G1", 0.5, {"d", 0, 1}),
      SlotRecord("s", "q", "per:title", "x", 0.5, {"d", 0, 1}),
      SlotRecord("s", "q", "per:title", "y", 0.5, {"d", 0, 1}),
  };
  std::vector<OutputRecord> all;
  for (const auto &g : gold.fills) {
    all.push_back(SlotRecord("s", "q", "per:title", g.fill.fill, 0.5, {"d", 0, 1}));
  }
  auto r1 = ScoreSlotfill(half, gold);
  auto r2 = ScoreSlotfill(all, gold);
  auto r3 = ScoreSlotfill({}, gold);
  const bool slot_ok = r1.precision == 0.5 && r1.recall == 0.25 &&
                       std::abs(r1.f1 - 1.0 / 3) < 1e-15 && r2.f1 == 1.0 &&
                       r3.precision == 0 && r3.recall == 0 && r3.f1 == 0;

  return {ceaf_bad == 0 && ap_err <= 1e-12 && slot_ok,
          Fmt("CEAFm mismatches %d/200, max |AP-oracle| %.3g over 200, "
              "slot-fill fixtures %s",
              ceaf_bad, ap_err, slot_ok ? "exact" : "WRONG")};
}

std::set<std::string> Keys(const std::vector<OutputRecord> &records) {
  std::set<std::string> out;
  for (const auto &r : records) {
    out.insert(KeyString(r.key) + "|" + ValueString(r.value));
  }
  return out;
}

// Five systems; right answers gather 3-5 supporters, wrong ones 1-2.
Outcome VoteSweep() {
  Roster roster = testing::MakeRoster(5);
  GoldStandard gold;
  gold.task = TaskKind::kSlotFilling;
  std::vector<ValueGroup> groups;
  for (int k = 0; k < 60; ++k) {
    const std::string query = "q" + std::to_string(k);
    std::vector<OutputRecord> right;
    for (int s = 0; s < 3 + k % 3; ++s) {
      right.push_back(SlotRecord(roster.id(s), query, "per:title", "right",
                                 0.5, {"d", 0, 1}));
    }
    gold.fills.push_back({{query, "per:title"}, MakeSlotFill("right"), {"d", 0, 1}});
    groups.push_back(MakeGroup(right));
    for (int w = 0; w < 3; ++w) {
      std::vector<OutputRecord> wrong;
      for (int s = 0; s < 1 + (k + w) % 2; ++s) {
        wrong.push_back(SlotRecord(roster.id(4 - s), query, "per:title",
                                   "wrong" + std::to_string(w), 0.5,
                                   {"d", 0, 1}));
      }
      groups.push_back(MakeGroup(wrong));
    }
  }
  auto slots = CategoryInventory::Default(TaskKind::kSlotFilling);
  VoteResult vote = OracleVote(groups, gold, TaskKind::kSlotFilling, 5, slots);
  bool chain = true;
  for (size_t t = 1; t < 5; ++t) {
    auto wide = Keys(VoteOutput(groups, t));
    auto narrow = Keys(VoteOutput(groups, t + 1));
    chain &= std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end());
  }
  std::string curve;
  for (const auto &[t, s] : vote.curve) curve += Fmt(" t%zu=%.3f", t, s.f1);
  return {vote.best_threshold == 3 && chain,
          Fmt("t*=%zu, containment %s, F1 curve:%s", vote.best_threshold,
              chain ? "monotone" : "BROKEN", curve.c_str())};
}

std::vector<OutputRecord> RecordsOf(const Dataset &ds, const std::string &id) {
  std::vector<OutputRecord> out;
  for (const auto &r : ds.records) {
    if (r.system == id) out.push_back(r);
  }
  return out;
}

Outcome EndToEnd() {
  SynthSpec spec;  // five systems, 0.35-0.6, rho 0.8, 500 + 500 keys
  SynthData data = GenerateSynthetic(spec, 42);
  auto docs = std::make_shared<const DocumentStore>(data.documents);
  const Dataset &test = data.test.dataset;
  const GoldStandard &gold = data.test.gold;

  TrainConfig config;
  config.seed = 42;
  TrainResult full = TrainStacker(data.train.dataset, data.train.gold,
                                  data.categories, docs, config);
  const double swaf =
      ScoreSlotfill(FuseDataset(full.model, test, docs).output, gold).f1;

  TrainResult conf = TrainStacker(data.train.dataset, data.train.gold,
                                  data.categories, docs, config, true);
  const double conf_only =
      ScoreSlotfill(FuseDataset(conf.model, test, docs, true).output, gold).f1;

  double best_single = 0;
  for (const auto &id : data.roster.ids()) {
    best_single = std::max(best_single,
                           ScoreSlotfill(RecordsOf(test, id), gold).f1);
  }
  auto groups = GroupAllValues(test.records, test.task, test.roster);
  VoteResult vote = OracleVote(groups, gold, test.task, data.roster.size(),
                               data.categories);

  const bool pass = swaf - best_single >= 0.02 &&
                    swaf - vote.score.f1 >= 0.02 && swaf > conf_only;
  return {pass,
          Fmt("F1 swaf %.4f, best single %.4f (+%.4f), oracle vote t=%zu "
              "%.4f (+%.4f), confidence-only %.4f",
              swaf, best_single, swaf - best_single, vote.best_threshold,
              vote.score.f1, swaf - vote.score.f1, conf_only)};
}

// Full CLI pipeline twice from the same config; every artifact compared.
Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() /
                        ("swaf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::string> artifacts[2];
  const char *files[] = {"data/train.tsv",      "data/test.tsv",
                         "data/docs.tsv",       "model.txt",
                         "model.txt.log",       "fused.tsv",
                         "fused.tsv.instances.tsv", "score.tsv",
                         "vote.tsv",            "vote.tsv.best.tsv"};
  for (int round = 0; round < 2; ++round) {
    const fs::path dir = root / std::to_string(round);
    auto at = [&](const char *name) { return (dir / name).string(); };
    RunConfig run;
    run.task = TaskKind::kSlotFilling;
    run.task_set = true;
    run.seed = 42;
    run.synth.train_keys = run.synth.test_keys = 200;
    run.train.batch_size = 64;
    run.out = at("data");
    RunSynth(run);
    run.docs = at("data/docs.tsv");
    run.inputs = {at("data/train.tsv")};
    run.gold = at("data/train.gold.tsv");
    run.model = at("model.txt");
    RunTrain(run);
    run.inputs = {at("data/test.tsv")};
    run.out = at("fused.tsv");
    RunPredict(run);
    run.inputs = {at("data/test.tsv"), at("fused.tsv")};
    run.gold = at("data/test.gold.tsv");
    run.out = at("score.tsv");
    RunScore(run);
    run.inputs = {at("data/test.tsv")};
    run.out = at("vote.tsv");
    RunVoteSweep(run);
    for (const char *f : files) artifacts[round].push_back(ReadFile(at(f)));
  }
  fs::remove_all(root);
  size_t differing = 0;
  for (size_t i = 0; i < artifacts[0].size(); ++i) {
    differing += artifacts[0][i] != artifacts[1][i];
  }
  return {differing == 0, Fmt("%zu artifacts compared, %zu differ",
                              artifacts[0].size(), differing)};
}

Instance Accepted(ValueGroup g, double meta) {
  Instance inst;
  inst.group = std::move(g);
  inst.meta_confidence = meta;
  inst.accepted = true;
  return inst;
}

Outcome PostprocessFixtures() {
  std::vector<std::string> failed;
  auto slots = CategoryInventory::Default(TaskKind::kSlotFilling);

  // Single-valued slot: only the highest meta-confidence fill survives.
  {
    Roster roster({"a", "b"});
    std::vector<Instance> in = {
        Accepted(MakeGroup({SlotRecord("a", "q", "per:age", "44", 0.9, {"d", 0, 1})}), 0.9),
        Accepted(MakeGroup({SlotRecord("b", "q", "per:age", "45", 0.9, {"d", 0, 1})}), 0.7),
    };
    auto out = PostprocessSlotfill(in, slots, roster);
    if (out.size() != 1 || std::get<SlotFill>(out[0].value).fill != "44") {
      failed.push_back("single-valued");
    }
  }
  // NIL clusters sharing a mention merge transitively under one fresh id.
  {
    const TextSpan m1{"d", 0, 3}, m2{"d", 10, 13}, m3{"d", 20, 23}, m4{"d", 30, 33};
    auto nil = [](const std::string &sys, const std::string &id, TextSpan s) {
      return Accepted(MakeGroup({MentionRecord(sys, sys + ":" + id, s, 0.5)}), 0.8);
    };
    std::vector<Instance> in = {nil("A", "NIL1", m1), nil("A", "NIL1", m2),
                                nil("B", "NIL7", m2), nil("B", "NIL7", m3),
                                nil("C", "NIL2", m3), nil("C", "NIL2", m4)};
    auto clusters = MergeNilClusters(in);
    if (clusters.size() != 1 || clusters[0].mentions.size() != 4 ||
        clusters[0].entity_id != "NILE0001") {
      failed.push_back("nil-merge");
    }
  }
  // Two systems: the higher original confidence wins.
  Roster roster({"a", "b", "c"});
  {
    BBox lo{0, 0, 10, 10}, hi{2, 2, 12, 12};
    auto pick = SelectBoundingBox(
        MakeGroup({BoxRecord("a", "i", 1, lo, 0.4), BoxRecord("b", "i", 1, hi, 0.9)}),
        roster);
    if (pick != hi) failed.push_back("bbox-n2");
  }
  // Three systems: largest summed pairwise intersection (104, 104, 8).
  {
    BBox a{0, 0, 10, 10}, b{0, 0, 10, 10}, c{8, 8, 18, 18};
    auto pick = SelectBoundingBox(
        MakeGroup({BoxRecord("c", "i", 1, c, 0.99), BoxRecord("a", "i", 1, a, 0.1),
                   BoxRecord("b", "i", 1, b, 0.2)}),
        roster);
    if (pick != a) failed.push_back("bbox-n3");
  }
  std::string detail = "single-valued, nil-merge, bbox-n2, bbox-n3: ";
  if (failed.empty()) {
    detail += "all exact";
  } else {
    detail += "failed";
    for (const auto &f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace
}  // namespace swaf

int main() {
  using swaf::Criterion;
  const Criterion criteria[] = {
      {1, "jaccard feature oracle", 5, swaf::JaccardOracle},
      {2, "gradient check", 5, swaf::GradientCheck},
      {3, "scorer oracles", 30, swaf::ScorerOracles},
      {4, "oracle vote sweep", 5, swaf::VoteSweep},
      {5, "end-to-end synthetic superiority", 60, swaf::EndToEnd},
      {6, "determinism", 60, swaf::Determinism},
      {7, "post-processing fixtures", 5, swaf::PostprocessFixtures},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    swaf::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception &e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("%s  %d. %s: %s (%.2f s, limit %.0f s)\n",
                pass ? "PASS" : "FAIL", c.id, c.name, outcome.detail.c_str(),
                secs, c.time_limit_s);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
