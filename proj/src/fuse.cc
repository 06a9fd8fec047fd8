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

#include "swaf/fuse.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "swaf/align.h"
#include "swaf/disjoint_set.h"

namespace swaf {

namespace {

size_t RosterRank(const Roster &roster, const std::string &system) {
  return roster.IndexOf(system).value_or(roster.size());
}

OutputRecord FusedRecord(const Key &key, const Value &value, double confidence,
                         const Provenance &provenance) {
  OutputRecord r;
  r.system = kFusedSystem;
  r.key = key;
  r.value = value;
  r.confidence = confidence;
  r.provenance = provenance;
  return r;
}

void SortRecords(std::vector<OutputRecord> &records) {
  std::sort(records.begin(), records.end(),
            [](const OutputRecord &a, const OutputRecord &b) {
              return std::tie(a.key, a.value, a.system) <
                     std::tie(b.key, b.value, b.system);
            });
}

}  // namespace

std::vector<OutputRecord> PostprocessSlotfill(
    std::span<const Instance> accepted, const CategoryInventory &slots,
    const Roster &roster) {
  std::map<SlotKey, std::vector<const Instance *>> by_key;
  for (const auto &inst : accepted) {
    const auto *key = std::get_if<SlotKey>(&inst.group.key);
    if (key == nullptr) {
      throw Error(ErrorCode::kTaskMismatch, "slot filling expects slot keys");
    }
    by_key[*key].push_back(&inst);
  }
  std::vector<OutputRecord> out;
  for (auto &[key, insts] : by_key) {
    if (slots.IsSingleValued(key.slot)) {
      auto best = std::min_element(
          insts.begin(), insts.end(),
          [&](const Instance *a, const Instance *b) {
            if (a->meta_confidence != b->meta_confidence) {
              return a->meta_confidence > b->meta_confidence;
            }
            size_t ra = RosterRank(roster, a->group.canonical_system);
            size_t rb = RosterRank(roster, b->group.canonical_system);
            if (ra != rb) return ra < rb;
            return a->group.canonical < b->group.canonical;
          });
      insts = {*best};
    }
    for (const Instance *inst : insts) {
      out.push_back(FusedRecord(inst->group.key, inst->group.canonical,
                                inst->meta_confidence,
                                inst->group.canonical_record().provenance));
    }
  }
  SortRecords(out);
  return out;
}

std::vector<EntityCluster> MergeNilClusters(
    std::span<const Instance> accepted) {
  // Per-system NIL clusters, in key order.
  std::map<std::string, std::vector<const Instance *>> clusters;
  for (const auto &inst : accepted) {
    const auto *key = std::get_if<EntityKey>(&inst.group.key);
    if (key == nullptr) {
      throw Error(ErrorCode::kTaskMismatch, "entity linking expects KB keys");
    }
    if (IsNilId(key->entity_id)) clusters[key->entity_id].push_back(&inst);
  }
  std::vector<std::string> ids;
  for (const auto &[id, members] : clusters) ids.push_back(id);

  struct Item {
    size_t cluster;
    const TextSpan *span;
  };
  std::map<std::string, std::vector<Item>> by_doc;
  for (size_t c = 0; c < ids.size(); ++c) {
    for (const Instance *inst : clusters[ids[c]]) {
      const auto &span = std::get<Mention>(inst->group.canonical).span;
      by_doc[span.docid].push_back({c, &span});
    }
  }
  DisjointSet sets(ids.size());
  for (auto &[doc, items] : by_doc) {
    std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) {
      return *a.span < *b.span;
    });
    // Sorted by start: once an item starts past i's end, so do the rest.
    for (size_t i = 0; i < items.size(); ++i) {
      for (size_t j = i + 1; j < items.size(); ++j) {
        if (items[j].span->start > items[i].span->end) break;
        sets.Union(items[i].cluster, items[j].cluster);
      }
    }
  }

  std::map<size_t, std::map<TextSpan, ClusterMention>> merged;
  for (size_t c = 0; c < ids.size(); ++c) {
    auto &mentions = merged[sets.Find(c)];
    for (const Instance *inst : clusters[ids[c]]) {
      const auto &m = std::get<Mention>(inst->group.canonical);
      auto [it, fresh] =
          mentions.emplace(m.span, ClusterMention{m, inst->meta_confidence});
      if (!fresh && inst->meta_confidence > it->second.confidence) {
        it->second = ClusterMention{m, inst->meta_confidence};
      }
    }
  }

  std::vector<EntityCluster> out;
  for (auto &[root, mentions] : merged) {
    EntityCluster cluster;
    for (auto &[span, cm] : mentions) cluster.mentions.push_back(cm);
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end(),
            [](const EntityCluster &a, const EntityCluster &b) {
              return a.mentions.front().mention.span <
                     b.mentions.front().mention.span;
            });
  for (size_t i = 0; i < out.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "NILE%04zu", i + 1);
    out[i].entity_id = id;
  }
  return out;
}

std::vector<OutputRecord> PostprocessEntityLinking(
    std::span<const Instance> accepted) {
  std::vector<OutputRecord> out;
  for (const auto &inst : accepted) {
    const auto &key = std::get<EntityKey>(inst.group.key);
    if (IsNilId(key.entity_id)) continue;
    const auto &m = std::get<Mention>(inst.group.canonical);
    out.push_back(
        FusedRecord(inst.group.key, m, inst.meta_confidence, m.span));
  }
  for (const auto &cluster : MergeNilClusters(accepted)) {
    for (const auto &cm : cluster.mentions) {
      out.push_back(FusedRecord(EntityKey{cluster.entity_id}, cm.mention,
                                cm.confidence, cm.mention.span));
    }
  }
  SortRecords(out);
  return out;
}

BBox SelectBoundingBox(const ValueGroup &group, const Roster &roster) {
  std::vector<const OutputRecord *> members;
  for (const auto &[id, r] : group.members) members.push_back(&r);
  std::sort(members.begin(), members.end(),
            [&](const OutputRecord *a, const OutputRecord *b) {
              return RosterRank(roster, a->system) <
                     RosterRank(roster, b->system);
            });
  auto box = [](const OutputRecord *r) {
    return std::get<Detection>(r->value).box;
  };
  if (members.empty()) {
    throw Error(ErrorCode::kInvalidValue, "empty value group");
  }
  if (members.size() == 1) return box(members[0]);
  if (members.size() == 2) {
    return members[1]->confidence > members[0]->confidence ? box(members[1])
                                                           : box(members[0]);
  }
  size_t best = 0;
  double best_sum = -1;
  for (size_t x = 0; x < members.size(); ++x) {
    double sum = 0;
    for (size_t i = 0; i < members.size(); ++i) {
      if (i != x) sum += IntersectionArea(box(members[i]), box(members[x]));
    }
    if (sum > best_sum) {
      best_sum = sum;
      best = x;
    }
  }
  return box(members[best]);
}

std::vector<OutputRecord> PostprocessDetection(
    std::span<const Instance> accepted, const Roster &roster) {
  std::vector<OutputRecord> out;
  for (const auto &inst : accepted) {
    Detection det = std::get<Detection>(inst.group.canonical);
    det.box = SelectBoundingBox(inst.group, roster);
    out.push_back(
        FusedRecord(inst.group.key, det, inst.meta_confidence, det.box));
  }
  SortRecords(out);
  return out;
}

std::vector<OutputRecord> Postprocess(TaskKind task,
                                      std::span<const Instance> instances,
                                      const CategoryInventory &categories,
                                      const Roster &roster) {
  std::vector<Instance> accepted;
  for (const auto &inst : instances) {
    if (inst.accepted) accepted.push_back(inst);
  }
  switch (task) {
    case TaskKind::kSlotFilling:
      return PostprocessSlotfill(accepted, categories, roster);
    case TaskKind::kEntityLinking:
      return PostprocessEntityLinking(accepted);
    case TaskKind::kObjectDetection:
      return PostprocessDetection(accepted, roster);
  }
  return {};
}

std::vector<OutputRecord> VoteOutput(std::span<const ValueGroup> groups,
                                     size_t threshold) {
  std::vector<OutputRecord> out;
  for (const auto &g : groups) {
    if (g.size() < threshold) continue;
    OutputRecord r = g.canonical_record();
    r.system = "vote";
    out.push_back(std::move(r));
  }
  SortRecords(out);
  return out;
}

VoteResult OracleVote(std::span<const ValueGroup> groups,
                      const GoldStandard &gold, TaskKind task,
                      size_t num_systems, const CategoryInventory &categories) {
  if (num_systems == 0) {
    throw Error(ErrorCode::kInvalidSpec, "voting needs at least one system");
  }
  VoteResult result;
  double best = -1;
  for (size_t t = 1; t <= num_systems; ++t) {
    auto output = VoteOutput(groups, t);
    ScoreReport score = Evaluate(task, output, gold, categories);
    result.curve.emplace_back(t, score);
    if (score.primary() > best) {
      best = score.primary();
      result.best_threshold = t;
      result.output = std::move(output);
      result.score = score;
    }
  }
  return result;
}

}  // namespace swaf
