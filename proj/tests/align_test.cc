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

#include <algorithm>

#include "gtest/gtest.h"
#include "oracles.h"
#include "swaf/align.h"

namespace swaf {
namespace {

using testing::BoxRecord;
using testing::MentionRecord;
using testing::SlotRecord;

TEST(IouTest, Examples) {
  EXPECT_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_EQ(Iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0);
  EXPECT_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 20}), 0.5);
}

TEST(IouTest, PropertiesOnRandomBoxes) {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    BBox a = testing::RandomIntBox(rng, 20), b = testing::RandomIntBox(rng, 20);
    const double v = Iou(a, b);
    EXPECT_EQ(v, Iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(Iou(a, a), 1.0);
    EXPECT_NEAR(v, testing::OracleIou(a, b), 1e-12);
  }
}

TEST(SameValueTest, Examples) {
  EXPECT_TRUE(SameValue(MakeSlotFill("Obama"), MakeSlotFill("obama "),
                        TaskKind::kSlotFilling));
  EXPECT_TRUE(SameValue(Mention{{"doc1", 100, 150}, "PER"},
                        Mention{{"doc1", 150, 200}, "PER"},
                        TaskKind::kEntityLinking));
  EXPECT_FALSE(SameValue(Mention{{"doc1", 100, 150}, "PER"},
                         Mention{{"doc1", 151, 200}, "PER"},
                         TaskKind::kEntityLinking));
  EXPECT_FALSE(SameValue(Mention{{"doc1", 100, 150}, "PER"},
                         Mention{{"doc2", 100, 150}, "PER"},
                         TaskKind::kEntityLinking));
  EXPECT_FALSE(SameValue(Detection{1, {0, 0, 10, 10}},
                         Detection{1, {0, 0, 10, 20}},
                         TaskKind::kObjectDetection));
  EXPECT_FALSE(SameValue(Detection{1, {0, 0, 10, 10}},
                         Detection{2, {0, 0, 10, 10}},
                         TaskKind::kObjectDetection));
  EXPECT_THROW(SameValue(MakeSlotFill("x"), Detection{1, {0, 0, 1, 1}},
                         TaskKind::kSlotFilling),
               Error);
}

TEST(GroupValuesTest, IdenticalFillsFormOneGroup) {
  Roster roster({"a", "b", "c"});
  std::vector<OutputRecord> records = {
      SlotRecord("a", "q", "per:age", "44", 0.2, {"d", 1, 2}),
      SlotRecord("b", "q", "per:age", "44", 0.9, {"d", 1, 2}),
      SlotRecord("c", "q", "per:age", "44", 0.5, {"d", 1, 2}),
  };
  auto groups = GroupValues(records, TaskKind::kSlotFilling, roster);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].size(), 3u);
  EXPECT_EQ(groups[0].canonical_system, "b");
}

TEST(GroupValuesTest, DetectionComponents) {
  Roster roster({"a", "b", "c"});
  // a and b overlap at IOU 0.6; c barely touches either.
  std::vector<OutputRecord> records = {
      BoxRecord("a", "i", 1, {0, 0, 10, 10}, 0.5),
      BoxRecord("b", "i", 1, {0, 0, 10, 16.0 / 0.6 - 10}, 0.5),
      BoxRecord("c", "i", 1, {9, 9, 30, 30}, 0.5),
  };
  ASSERT_NEAR(Iou(std::get<Detection>(records[0].value).box,
                  std::get<Detection>(records[1].value).box),
              0.6, 1e-9);
  auto groups = GroupValues(records, TaskKind::kObjectDetection, roster);
  ASSERT_EQ(groups.size(), 2u);
  std::vector<size_t> sizes = {groups[0].size(), groups[1].size()};
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<size_t>{1, 2}));
}

TEST(GroupValuesTest, OverlapChainsAreTransitive) {
  Roster roster({"a", "b", "c"});
  std::vector<OutputRecord> records = {
      MentionRecord("a", "E", {"d", 0, 10}, 0.5),
      MentionRecord("b", "E", {"d", 10, 20}, 0.5),
      MentionRecord("c", "E", {"d", 20, 30}, 0.5),
  };
  auto groups = GroupValues(records, TaskKind::kEntityLinking, roster);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].size(), 3u);
}

TEST(GroupValuesTest, CanonicalTieBreaksByRoster) {
  Roster roster({"b", "a"});
  std::vector<OutputRecord> records = {
      MentionRecord("a", "E", {"d", 0, 10}, 0.5),
      MentionRecord("b", "E", {"d", 5, 12}, 0.5),
  };
  auto groups = GroupValues(records, TaskKind::kEntityLinking, roster);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].canonical_system, "b");
}

TEST(GroupValuesTest, OneRecordPerSystem) {
  Roster roster({"a", "b"});
  std::vector<OutputRecord> records = {
      MentionRecord("a", "E", {"d", 0, 10}, 0.9),
      MentionRecord("a", "E", {"d", 8, 15}, 0.4),
      MentionRecord("b", "E", {"d", 9, 12}, 0.5),
  };
  auto groups = GroupValues(records, TaskKind::kEntityLinking, roster);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].size(), 2u);
  EXPECT_EQ(groups[0].member("a").confidence, 0.9);
  EXPECT_EQ(groups[1].size(), 1u);
}

TEST(GroupValuesTest, MixedKeysRejected) {
  Roster roster({"a"});
  std::vector<OutputRecord> records = {
      MentionRecord("a", "E1", {"d", 0, 10}, 0.9),
      MentionRecord("a", "E2", {"d", 0, 10}, 0.9),
  };
  try {
    GroupValues(records, TaskKind::kEntityLinking, roster);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMixedKeys);
  }
}

std::vector<std::vector<OutputRecord>> Canonical(
    const std::vector<ValueGroup> &groups) {
  std::vector<std::vector<OutputRecord>> out;
  for (const auto &g : groups) {
    std::vector<OutputRecord> members;
    for (const auto &[id, r] : g.members) members.push_back(r);
    out.push_back(members);
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(a.front().system, a.front().value) <
           std::tie(b.front().system, b.front().value);
  });
  return out;
}

TEST(GroupValuesTest, PartitionAndPermutationInvariance) {
  SplitMix64 rng(3);
  Roster roster = testing::MakeRoster(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<OutputRecord> records;
    const size_t n = 1 + rng.Below(10);
    for (size_t i = 0; i < n; ++i) {
      records.push_back(MentionRecord(roster.id(rng.Below(4)), "E",
                                      testing::RandomSpan(rng, 2, 30),
                                      rng.Uniform()));
    }
    records = DedupRecords(records);
    auto groups = GroupValues(records, TaskKind::kEntityLinking, roster);
    size_t total = 0;
    for (const auto &g : groups) {
      total += g.size();
      EXPECT_GE(g.size(), 1u);
      EXPECT_LE(g.size(), roster.size());
    }
    EXPECT_EQ(total, records.size());

    auto shuffled = records;
    rng.Shuffle(shuffled);
    auto again = GroupValues(shuffled, TaskKind::kEntityLinking, roster);
    EXPECT_EQ(Canonical(groups), Canonical(again));
  }
}

TEST(GroupValuesTest, SlotFillGroupsAreEqualityClasses) {
  SplitMix64 rng(5);
  Roster roster = testing::MakeRoster(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<OutputRecord> records;
    for (size_t s = 0; s < roster.size(); ++s) {
      records.push_back(SlotRecord(roster.id(s), "q", "per:title",
                                   "v" + std::to_string(rng.Below(3)),
                                   rng.Uniform(), {"d", 0, 1}));
    }
    auto groups = GroupValues(records, TaskKind::kSlotFilling, roster);
    std::set<std::string> fills;
    for (const auto &g : groups) {
      const auto &fill = std::get<SlotFill>(g.canonical).normalized;
      EXPECT_TRUE(fills.insert(fill).second);
      for (const auto &[id, r] : g.members) {
        EXPECT_EQ(std::get<SlotFill>(r.value).normalized, fill);
      }
    }
  }
}

}  // namespace
}  // namespace swaf
