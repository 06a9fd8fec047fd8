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

#include "swaf/align.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "swaf/disjoint_set.h"

namespace swaf {

double IntersectionArea(const BBox &a, const BBox &b) {
  double w = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  double h = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (w <= 0 || h <= 0) return 0.0;
  return w * h;
}

double Iou(const BBox &a, const BBox &b) {
  double inter = IntersectionArea(a, b);
  if (inter <= 0) return 0.0;
  double uni = a.area() + b.area() - inter;
  return std::min(1.0, inter / uni);
}

int64_t SpanIntersection(const TextSpan &a, const TextSpan &b) {
  if (a.docid != b.docid) return 0;
  int64_t lo = std::max(a.start, b.start);
  int64_t hi = std::min(a.end, b.end);
  return hi >= lo ? hi - lo + 1 : 0;
}

bool SpansOverlap(const TextSpan &a, const TextSpan &b) {
  return SpanIntersection(a, b) > 0;
}

bool SameValue(const Value &a, const Value &b, TaskKind task) {
  if (TaskOf(a) != task || TaskOf(b) != task) {
    throw Error(ErrorCode::kTaskMismatch,
                "values are not " + std::string(TaskName(task)) + " values");
  }
  switch (task) {
    case TaskKind::kSlotFilling:
      return std::get<SlotFill>(a).normalized ==
             std::get<SlotFill>(b).normalized;
    case TaskKind::kEntityLinking:
      return SpansOverlap(std::get<Mention>(a).span,
                          std::get<Mention>(b).span);
    case TaskKind::kObjectDetection: {
      const auto &da = std::get<Detection>(a);
      const auto &db = std::get<Detection>(b);
      return da.category == db.category && Iou(da.box, db.box) > kSameObjectIou;
    }
  }
  return false;
}

namespace {

size_t RosterIndex(const Roster &roster, const std::string &system) {
  auto idx = roster.IndexOf(system);
  if (!idx) {
    throw Error(ErrorCode::kUnknownSystem,
                "system '" + system + "' not in roster");
  }
  return *idx;
}

}  // namespace

std::vector<ValueGroup> GroupValues(std::span<const OutputRecord> records,
                                    TaskKind task, const Roster &roster) {
  std::vector<ValueGroup> groups;
  if (records.empty()) return groups;
  for (const auto &r : records) {
    if (r.key != records.front().key) {
      throw Error(ErrorCode::kMixedKeys,
                  KeyString(r.key) + " vs " + KeyString(records.front().key));
    }
  }

  // Visiting order: confidence desc, roster order, then value.
  std::vector<const OutputRecord *> pending;
  for (const auto &r : records) pending.push_back(&r);
  std::sort(pending.begin(), pending.end(),
            [&](const OutputRecord *a, const OutputRecord *b) {
              if (a->confidence != b->confidence) {
                return a->confidence > b->confidence;
              }
              size_t ia = RosterIndex(roster, a->system);
              size_t ib = RosterIndex(roster, b->system);
              if (ia != ib) return ia < ib;
              return a->value < b->value;
            });

  while (!pending.empty()) {
    const size_t n = pending.size();
    DisjointSet components(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (SameValue(pending[i]->value, pending[j]->value, task)) {
          components.Union(i, j);
        }
      }
    }
    // Components in order of their first (highest ranked) record.
    std::map<size_t, size_t> group_of_root;
    std::vector<const OutputRecord *> leftover;
    for (size_t i = 0; i < n; ++i) {
      const OutputRecord *r = pending[i];
      size_t root = components.Find(i);
      auto [it, fresh] = group_of_root.emplace(root, groups.size());
      if (fresh) {
        ValueGroup g;
        g.key = r->key;
        g.canonical = r->value;
        g.canonical_system = r->system;
        groups.push_back(std::move(g));
      }
      ValueGroup &g = groups[it->second];
      if (!g.members.emplace(r->system, *r).second) leftover.push_back(r);
    }
    pending = std::move(leftover);
  }
  return groups;
}

std::vector<ValueGroup> GroupAllValues(std::span<const OutputRecord> records,
                                       TaskKind task, const Roster &roster) {
  std::map<Key, std::vector<OutputRecord>> by_key;
  for (const auto &r : records) by_key[r.key].push_back(r);
  std::vector<ValueGroup> groups;
  for (const auto &[key, recs] : by_key) {
    auto g = GroupValues(recs, task, roster);
    std::move(g.begin(), g.end(), std::back_inserter(groups));
  }
  return groups;
}

}  // namespace swaf
