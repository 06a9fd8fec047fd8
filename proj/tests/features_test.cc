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

#include <cmath>
#include <memory>

#include "gtest/gtest.h"
#include "oracles.h"
#include "swaf/features.h"

namespace swaf {
namespace {

using testing::BoxRecord;
using testing::MakeGroup;
using testing::SlotRecord;

ValueGroup SpanGroup(const std::vector<TextSpan> &spans) {
  std::vector<OutputRecord> records;
  for (size_t i = 0; i < spans.size(); ++i) {
    records.push_back(SlotRecord("s" + std::to_string(i), "q", "per:age", "44",
                                 0.5, spans[i]));
  }
  return MakeGroup(records);
}

ValueGroup BoxGroup(const std::vector<BBox> &boxes) {
  std::vector<OutputRecord> records;
  for (size_t i = 0; i < boxes.size(); ++i) {
    records.push_back(
        BoxRecord("s" + std::to_string(i), "img", 1, boxes[i], 0.5));
  }
  return MakeGroup(records);
}

TEST(ProvenanceOffsetTest, Examples) {
  EXPECT_EQ(ProvenanceOffsetScore(SpanGroup({{"doc1", 100, 150}}), "s0"), 0.0);
  EXPECT_EQ(ProvenanceOffsetScore(
                SpanGroup({{"doc1", 100, 150}, {"doc2", 100, 150}}), "s0"),
            0.0);
  EXPECT_DOUBLE_EQ(
      ProvenanceOffsetScore(SpanGroup({{"doc1", 100, 150}, {"doc1", 120, 170}}),
                            "s0"),
      0.5 * 31.0 / 71.0);
  EXPECT_THROW(ProvenanceOffsetScore(SpanGroup({{"d", 1, 2}}), "s9"), Error);
}

TEST(ProvenanceOffsetTest, BoundedAndMatchesOracle) {
  SplitMix64 rng(21);
  for (int i = 0; i < 300; ++i) {
    ValueGroup g = testing::RandomTextGroup(rng, 5);
    const double bound = (g.size() - 1.0) / g.size();
    for (const auto &[id, r] : g.members) {
      const double po = ProvenanceOffsetScore(g, id);
      EXPECT_NEAR(po, testing::OraclePo(g, id), 1e-12);
      EXPECT_GE(po, 0.0);
      EXPECT_LE(po, bound + 1e-15);
    }
  }
  // The bound is attained when all provenance is identical.
  ValueGroup same = SpanGroup({{"d", 3, 9}, {"d", 3, 9}, {"d", 3, 9}});
  EXPECT_DOUBLE_EQ(ProvenanceOffsetScore(same, "s1"), 2.0 / 3.0);
}

TEST(BboxOverlapTest, Examples) {
  EXPECT_EQ(BboxOverlapScore(BoxGroup({{0, 0, 4, 4}, {0, 0, 4, 4}}), "s0"), 0.5);
  EXPECT_EQ(BboxOverlapScore(BoxGroup({{0, 0, 4, 4}}), "s0"), 0.0);
  EXPECT_DOUBLE_EQ(
      BboxOverlapScore(
          BoxGroup({{0, 0, 10, 10}, {5, 0, 15, 10}, {0, 0, 10, 10}}), "s0"),
      4.0 / 9.0);
}

TEST(BboxOverlapTest, MatchesOracle) {
  SplitMix64 rng(22);
  for (int i = 0; i < 300; ++i) {
    ValueGroup g = testing::RandomBoxGroup(rng, 5);
    for (const auto &[id, r] : g.members) {
      EXPECT_NEAR(BboxOverlapScore(g, id), testing::OracleBbo(g, id), 1e-12);
    }
  }
}

TEST(DocProvenanceTest, Examples) {
  auto five = DocProvenanceScores(SpanGroup({{"d1", 0, 1},
                                             {"d1", 0, 1},
                                             {"d1", 5, 9},
                                             {"d2", 0, 1},
                                             {"d2", 0, 1}}));
  EXPECT_EQ(five["s0"], 0.6);
  EXPECT_EQ(five["s2"], 0.6);
  EXPECT_EQ(five["s3"], 0.4);
  EXPECT_EQ(DocProvenanceScores(SpanGroup({{"d1", 0, 1}}))["s0"], 1.0);
  auto distinct = DocProvenanceScores(
      SpanGroup({{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}, {"d", 0, 1}}));
  for (const auto &[id, v] : distinct) EXPECT_EQ(v, 0.25);
}

TEST(DocProvenanceTest, SumIdentity) {
  SplitMix64 rng(23);
  for (int i = 0; i < 200; ++i) {
    ValueGroup g = testing::RandomTextGroup(rng, 6);
    std::map<std::string, double> per_doc;
    for (const auto &[id, r] : g.members) {
      per_doc[std::get<TextSpan>(r.provenance).docid] += 1;
    }
    double expected = 0;
    for (const auto &[doc, n] : per_doc) expected += n * n / g.size();
    double sum = 0;
    for (const auto &[id, v] : DocProvenanceScores(g)) sum += v;
    EXPECT_NEAR(sum, expected, 1e-12);
  }
}

TEST(TokenizeTest, LowercasedAlnumRuns) {
  EXPECT_EQ(Tokenize("Hello, World-42!"),
            (std::vector<std::string>{"hello", "world", "42"}));
  EXPECT_EQ(Tokenize("ÉCOLE été"), (std::vector<std::string>{"école", "été"}));
  EXPECT_TRUE(Tokenize(" ,; ").empty());
}

DocumentStore ThreeDocs() {
  DocumentStore store;
  store.AddDocument("d1", "a b");
  store.AddDocument("d2", "a c");
  store.AddDocument("d3", "d");
  return store;
}

TEST(CosineTest, HandComputedFixture) {
  DocumentStore store = ThreeDocs();
  TfIdfIndex stats(store);
  // idf(a) = ln 1.5, idf(b) = idf(c) = ln 3.
  const double a = std::log(1.5), b = std::log(3.0);
  EXPECT_NEAR(KeyValueDocSimilarity("a b", "a c", stats),
              a * a / (a * a + b * b), 1e-12);
  EXPECT_NEAR(KeyValueDocSimilarity("a b", "a b", stats), 1.0, 1e-12);
  EXPECT_EQ(KeyValueDocSimilarity("b", "c", stats), 0.0);
  EXPECT_EQ(KeyValueDocSimilarity("zzz", "a b", stats), 0.0);
}

TEST(FeatureVectorTest, SingleContributor) {
  Roster roster({"s0", "s1", "s2"});
  auto slots = CategoryInventory::Slots({{"per:title", false},
                                         {"per:age", true},
                                         {"org:website", true},
                                         {"per:children", false}});
  FeatureLayout layout(TaskKind::kSlotFilling, roster, slots, false);
  ValueGroup g = MakeGroup(
      {SlotRecord("s1", "q", "per:age", "44", 0.8, {"d", 0, 4})});
  auto f = BuildFeatureVector(g, layout).values;
  std::vector<double> expected = {0, 0.8, 0, 0, 0, 0, 0, 1.0, 0,
                                  0, 0,   0, 0, 1, 0, 0};
  EXPECT_EQ(f, expected);
  EXPECT_EQ(layout.Names()[layout.category_offset() + 1], "type:per:age");
}

TEST(FeatureVectorTest, DetectionIdenticalBoxes) {
  Roster roster({"s0", "s1"});
  FeatureLayout layout(TaskKind::kObjectDetection, roster,
                       CategoryInventory::ObjectCategories(2), false);
  ValueGroup g = MakeGroup({BoxRecord("s0", "i", 2, {0, 0, 3, 3}, 0.9),
                            BoxRecord("s1", "i", 2, {0, 0, 3, 3}, 0.7)});
  auto f = BuildFeatureVector(g, layout).values;
  EXPECT_EQ(f, (std::vector<double>{0.9, 0.7, 0.5, 0.5, 0, 1}));
}

TEST(FeatureVectorTest, CosineBlockAndErrors) {
  auto store = std::make_shared<DocumentStore>(ThreeDocs());
  store->AddKeyDocument("q", "a b");
  Roster roster({"s0", "s1"});
  FeatureLayout layout(TaskKind::kSlotFilling, roster,
                       CategoryInventory::Slots({{"per:age", true}}), true);
  FeatureExtractor extractor(layout, store);
  ValueGroup g =
      MakeGroup({SlotRecord("s1", "q", "per:age", "44", 0.8, {"d2", 0, 1})});
  auto f = extractor.Extract(g).values;
  const double a = std::log(1.5), b = std::log(3.0);
  EXPECT_NEAR(f[layout.cosine_offset() + 1], a * a / (a * a + b * b), 1e-12);
  EXPECT_EQ(f[layout.cosine_offset()], 0.0);

  ValueGroup missing =
      MakeGroup({SlotRecord("s1", "q", "per:age", "44", 0.8, {"dx", 0, 1})});
  EXPECT_THROW(extractor.Extract(missing), Error);

  ValueGroup other_slot =
      MakeGroup({SlotRecord("s1", "q", "per:title", "x", 0.8, {"d1", 0, 1})});
  try {
    extractor.Extract(other_slot);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownCategory);
  }
}

TEST(FeatureVectorTest, LayoutInvariants) {
  SplitMix64 rng(24);
  Roster roster = testing::MakeRoster(6);
  FeatureLayout layout(TaskKind::kSlotFilling, roster,
                       CategoryInventory::Default(TaskKind::kSlotFilling),
                       false);
  for (int i = 0; i < 100; ++i) {
    ValueGroup g = testing::RandomTextGroup(rng, 6);
    auto f = BuildFeatureVector(g, layout).values;
    ASSERT_EQ(f.size(), layout.dimension());
    double hot = 0;
    for (size_t j = layout.category_offset(); j < f.size(); ++j) hot += f[j];
    EXPECT_EQ(hot, 1.0);
    for (size_t s = 0; s < roster.size(); ++s) {
      if (g.members.count(roster.id(s))) continue;
      for (size_t block = 0; block < 4; ++block) {
        EXPECT_EQ(f[block * roster.size() + s], 0.0);
      }
    }
    for (double v : f) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace swaf
