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

#include "swaf/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "swaf/random.h"

namespace swaf {

namespace {

constexpr int kCommonWords = 60;
constexpr int kTopicVocabulary = 4000;
constexpr double kImageWidth = 500;
constexpr double kImageHeight = 400;

// Slots the generator draws keys from: four single-valued, four list-valued.
const char *const kSynthSlots[] = {
    "per:age",     "per:city_of_birth", "per:date_of_birth",
    "org:website", "per:title",         "per:children",
    "org:subsidiaries", "org:founded_by",
};

std::string Id(const char *prefix, const std::string &split, size_t n,
               int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%s%0*zu", split.c_str(), prefix, width, n);
  return buf;
}

double Gaussian(SplitMix64 &rng) {
  double u1 = rng.Uniform();
  double u2 = rng.Uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Confidence(SplitMix64 &rng, bool correct, double noise) {
  double mean = correct ? 0.55 : 0.45;
  return std::clamp(mean + noise * Gaussian(rng), 0.0, 1.0);
}

std::string SystemId(size_t s) { return "sys" + std::to_string(s + 1); }

using Topic = std::vector<std::string>;

Topic MakeTopic(SplitMix64 &rng, size_t size) {
  Topic t;
  for (size_t i = 0; i < size; ++i) {
    t.push_back("t" + std::to_string(rng.Below(kTopicVocabulary)));
  }
  return t;
}

// Bag of words: `topical` draws from the topic, the rest are common or
// random words.
std::string MakeText(SplitMix64 &rng, const Topic &topic, int topical,
                     int common, int random) {
  std::vector<std::string> words;
  for (int i = 0; i < topical; ++i) words.push_back(topic[rng.Below(topic.size())]);
  for (int i = 0; i < common; ++i) {
    words.push_back("c" + std::to_string(rng.Below(kCommonWords)));
  }
  for (int i = 0; i < random; ++i) {
    words.push_back("t" + std::to_string(rng.Below(kTopicVocabulary)));
  }
  rng.Shuffle(words);
  std::string text;
  for (const auto &w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

TextSpan RandomSpan(SplitMix64 &rng, const std::string &docid) {
  TextSpan span;
  span.docid = docid;
  span.start = static_cast<int64_t>(rng.Below(300));
  span.end = span.start + 2 + static_cast<int64_t>(rng.Below(23));
  return span;
}

struct SplitContext {
  const SynthSpec &spec;
  const Roster &roster;
  SplitMix64 &rng;
  DocumentStore &docs;
  std::string prefix;
  size_t num_keys;
};

// Random "distractor" documents on unrelated topics.
std::vector<std::string> MakePool(SplitContext &ctx, size_t count) {
  std::vector<std::string> ids;
  for (size_t i = 0; i < count; ++i) {
    std::string id = Id("P", ctx.prefix, i + 1, 5);
    Topic other = MakeTopic(ctx.rng, 10);
    ctx.docs.AddDocument(id, MakeText(ctx.rng, other, 12, 18, 10));
    ids.push_back(std::move(id));
  }
  return ids;
}

SynthSplit GenerateSlotFilling(SplitContext &ctx,
                               const CategoryInventory &inventory) {
  auto &rng = ctx.rng;
  const size_t slots_per_query = 4;
  const size_t num_queries =
      (ctx.num_keys + slots_per_query - 1) / slots_per_query;
  auto pool = MakePool(ctx, 2 * num_queries + 1);

  SynthSplit split;
  split.gold.task = TaskKind::kSlotFilling;
  std::vector<OutputRecord> records;
  size_t keys = 0;
  for (size_t q = 0; q < num_queries; ++q) {
    const std::string query = Id("Q", ctx.prefix, q + 1, 4);
    Topic topic = MakeTopic(rng, 10);
    ctx.docs.AddKeyDocument(query, MakeText(rng, topic, 15, 10, 0));
    std::vector<std::string> query_docs;
    for (int d = 0; d < 2; ++d) {
      std::string id = query + "D" + std::to_string(d + 1);
      ctx.docs.AddDocument(id, MakeText(rng, topic, 12, 18, 10));
      query_docs.push_back(std::move(id));
    }
    std::vector<std::string> slots(std::begin(kSynthSlots),
                                   std::end(kSynthSlots));
    rng.Shuffle(slots);
    for (size_t k = 0; k < slots_per_query && keys < ctx.num_keys;
         ++k, ++keys) {
      SlotKey key{query, slots[k]};
      const size_t num_gold =
          inventory.IsSingleValued(key.slot) ? 1 : 1 + rng.Below(3);
      std::vector<GoldFill> gold;
      for (size_t g = 0; g < num_gold; ++g) {
        GoldFill fill;
        fill.key = key;
        fill.fill = MakeSlotFill(query + " " + key.slot + " answer " +
                                 std::to_string(g + 1));
        fill.provenance =
            RandomSpan(rng, query_docs[rng.Below(query_docs.size())]);
        gold.push_back(fill);
        split.gold.fills.push_back(std::move(fill));
      }
      std::vector<std::string> distractors;
      for (int w = 0; w < 4; ++w) {
        distractors.push_back(query + " " + key.slot + " wrong " +
                              std::to_string(w + 1));
      }
      for (size_t s = 0; s < ctx.roster.size(); ++s) {
        const double accuracy = ctx.spec.accuracies[s];
        std::vector<std::string> unused = distractors;
        rng.Shuffle(unused);
        for (size_t g = 0; g < num_gold; ++g) {
          OutputRecord r;
          r.system = ctx.roster.id(s);
          r.key = key;
          const bool correct = rng.Bernoulli(accuracy);
          if (correct) {
            r.value = gold[g].fill;
            if (rng.Bernoulli(ctx.spec.rho)) {
              r.provenance = gold[g].provenance;
            } else {
              r.provenance = RandomSpan(rng, pool[rng.Below(pool.size())]);
            }
          } else {
            r.value = MakeSlotFill(unused.back());
            unused.pop_back();
            const std::string &doc =
                rng.Bernoulli(0.3) ? query_docs[rng.Below(query_docs.size())]
                                   : pool[rng.Below(pool.size())];
            r.provenance = RandomSpan(rng, doc);
          }
          r.confidence = Confidence(rng, correct, ctx.spec.confidence_noise);
          records.push_back(std::move(r));
        }
      }
    }
  }
  split.dataset = MakeDataset(std::move(records), TaskKind::kSlotFilling,
                              ctx.roster, &inventory);
  return split;
}

SynthSplit GenerateEntityLinking(SplitContext &ctx,
                                 const CategoryInventory &inventory) {
  auto &rng = ctx.rng;
  auto pool = MakePool(ctx, ctx.num_keys + 1);

  struct Entity {
    std::string id;
    std::string type;
    std::vector<TextSpan> mentions;
  };
  std::vector<Entity> entities;
  SynthSplit split;
  split.gold.task = TaskKind::kEntityLinking;
  for (size_t e = 0; e < ctx.num_keys; ++e) {
    Entity entity;
    const bool nil = rng.Bernoulli(0.3);
    entity.id = nil ? "NIL" + Id("", ctx.prefix, e + 1, 4)
                    : Id("E", ctx.prefix, e + 1, 4);
    entity.type = inventory.name(rng.Below(inventory.size()));
    Topic topic = MakeTopic(rng, 10);
    if (!nil) ctx.docs.AddKeyDocument(entity.id, MakeText(rng, topic, 15, 10, 0));
    std::vector<std::string> docs;
    for (int d = 0; d < 2; ++d) {
      std::string id = Id("M", ctx.prefix, e + 1, 4) + "D" + std::to_string(d + 1);
      ctx.docs.AddDocument(id, MakeText(rng, topic, 12, 18, 10));
      docs.push_back(std::move(id));
    }
    const size_t num_mentions = 1 + rng.Below(4);
    for (size_t m = 0; m < num_mentions; ++m) {
      // Mentions sit in disjoint 60-character windows.
      TextSpan span;
      span.docid = docs[m % 2];
      span.start = static_cast<int64_t>(60 * (m / 2) + rng.Below(30));
      span.end = span.start + 2 + static_cast<int64_t>(rng.Below(18));
      entity.mentions.push_back(span);
      split.gold.mentions.push_back({entity.id, entity.type, span});
    }
    entities.push_back(std::move(entity));
  }

  std::vector<OutputRecord> records;
  auto emit = [&](size_t s, const Entity &linked, const TextSpan &span,
                  bool correct) {
    OutputRecord r;
    r.system = ctx.roster.id(s);
    r.key = EntityKey{linked.id};
    r.value = Mention{span, linked.type};
    r.provenance = span;
    r.confidence = Confidence(rng, correct, ctx.spec.confidence_noise);
    records.push_back(std::move(r));
  };
  for (size_t e = 0; e < entities.size(); ++e) {
    for (const auto &gold_span : entities[e].mentions) {
      for (size_t s = 0; s < ctx.roster.size(); ++s) {
        if (rng.Bernoulli(ctx.spec.accuracies[s])) {
          TextSpan span = gold_span;
          if (!rng.Bernoulli(ctx.spec.rho)) {
            int64_t shift = 1 + static_cast<int64_t>(rng.Below(2));
            span.start += shift;
            span.end += shift;
          }
          emit(s, entities[e], span, true);
        } else if (entities.size() > 1 && rng.Bernoulli(0.5)) {
          size_t other = rng.Below(entities.size() - 1);
          if (other >= e) ++other;
          emit(s, entities[other], gold_span, false);
        } else {
          emit(s, entities[rng.Below(entities.size())],
               RandomSpan(rng, pool[rng.Below(pool.size())]), false);
        }
      }
    }
  }
  split.dataset = MakeDataset(std::move(records), TaskKind::kEntityLinking,
                              ctx.roster, &inventory);
  return split;
}

BBox Jitter(SplitMix64 &rng, const BBox &box, double fraction) {
  const double w = box.width(), h = box.height();
  BBox out{box.xmin + rng.Uniform(-fraction, fraction) * w,
           box.ymin + rng.Uniform(-fraction, fraction) * h,
           box.xmax + rng.Uniform(-fraction, fraction) * w,
           box.ymax + rng.Uniform(-fraction, fraction) * h};
  return out;
}

BBox RandomBox(SplitMix64 &rng) {
  double w = rng.Uniform(40, 200), h = rng.Uniform(40, 200);
  double x = rng.Uniform(0, kImageWidth - w), y = rng.Uniform(0, kImageHeight - h);
  return {x, y, x + w, y + h};
}

SynthSplit GenerateDetection(SplitContext &ctx,
                             const CategoryInventory &inventory) {
  auto &rng = ctx.rng;
  const int categories = static_cast<int>(inventory.size());
  SynthSplit split;
  split.gold.task = TaskKind::kObjectDetection;
  std::vector<OutputRecord> records;
  for (size_t i = 0; i < ctx.num_keys; ++i) {
    const std::string image = Id("I", ctx.prefix, i + 1, 5);
    const size_t objects = 1 + rng.Below(3);
    for (size_t o = 0; o < objects; ++o) {
      GoldBox gold{image, 1 + static_cast<int>(rng.Below(categories)),
                   RandomBox(rng)};
      split.gold.boxes.push_back(gold);
      for (size_t s = 0; s < ctx.roster.size(); ++s) {
        OutputRecord r;
        r.system = ctx.roster.id(s);
        r.key = ImageKey{image};
        Detection det;
        const bool correct = rng.Bernoulli(ctx.spec.accuracies[s]);
        if (correct) {
          det.category = gold.category;
          det.box = Jitter(rng, gold.box, rng.Bernoulli(ctx.spec.rho) ? 0.02
                                                                      : 0.06);
        } else if (categories > 1 && rng.Bernoulli(0.5)) {
          int other = 1 + static_cast<int>(rng.Below(categories - 1));
          if (other >= gold.category) ++other;
          det.category = other;
          det.box = Jitter(rng, gold.box, 0.06);
        } else {
          det.category = 1 + static_cast<int>(rng.Below(categories));
          det.box = RandomBox(rng);
        }
        r.value = det;
        r.provenance = det.box;
        r.confidence = Confidence(rng, correct, ctx.spec.confidence_noise);
        records.push_back(std::move(r));
      }
    }
  }
  split.dataset = MakeDataset(std::move(records), TaskKind::kObjectDetection,
                              ctx.roster, &inventory);
  return split;
}

}  // namespace

void ValidateSynthSpec(const SynthSpec &spec) {
  if (spec.accuracies.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "need at least one system accuracy");
  }
  for (double a : spec.accuracies) {
    if (!(a >= 0 && a <= 1)) {
      throw Error(ErrorCode::kInvalidSpec, "accuracy outside [0,1]");
    }
  }
  if (!(spec.rho >= 0 && spec.rho <= 1)) {
    throw Error(ErrorCode::kInvalidSpec, "rho outside [0,1]");
  }
  if (!(spec.confidence_noise >= 0) || !std::isfinite(spec.confidence_noise)) {
    throw Error(ErrorCode::kInvalidSpec, "confidence noise must be >= 0");
  }
  if (spec.train_keys + spec.test_keys == 0) {
    throw Error(ErrorCode::kInvalidSpec, "no keys requested");
  }
  if (spec.task == TaskKind::kObjectDetection && spec.num_categories < 1) {
    throw Error(ErrorCode::kInvalidSpec, "need at least one category");
  }
}

SynthData GenerateSynthetic(const SynthSpec &spec, uint64_t seed) {
  ValidateSynthSpec(spec);
  SynthData data;
  data.task = spec.task;
  std::vector<std::string> ids;
  for (size_t s = 0; s < spec.accuracies.size(); ++s) ids.push_back(SystemId(s));
  data.roster = Roster(std::move(ids));
  data.categories = spec.task == TaskKind::kObjectDetection
                        ? CategoryInventory::ObjectCategories(spec.num_categories)
                        : CategoryInventory::Default(spec.task);

  SplitMix64 root(seed);
  for (int which = 0; which < 2; ++which) {
    SplitMix64 rng = root.Fork(static_cast<uint64_t>(which + 1));
    SplitContext ctx{spec,         data.roster,
                     rng,          data.documents,
                     which == 0 ? "TR" : "TE",
                     which == 0 ? spec.train_keys : spec.test_keys};
    SynthSplit split;
    switch (spec.task) {
      case TaskKind::kSlotFilling:
        split = GenerateSlotFilling(ctx, data.categories);
        break;
      case TaskKind::kEntityLinking:
        split = GenerateEntityLinking(ctx, data.categories);
        break;
      case TaskKind::kObjectDetection:
        split = GenerateDetection(ctx, data.categories);
        break;
    }
    (which == 0 ? data.train : data.test) = std::move(split);
  }
  return data;
}

}  // namespace swaf
