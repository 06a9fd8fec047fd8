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

#ifndef SWAF_ALIGN_H_
#define SWAF_ALIGN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "swaf/model.h"

namespace swaf {

// Minimum IOU (exclusive) for two boxes to describe the same object.
inline constexpr double kSameObjectIou = 0.5;

// Intersection over union of two boxes; 0 when they are disjoint.
double Iou(const BBox &a, const BBox &b);

// Area of the intersection rectangle, 0 when disjoint.
double IntersectionArea(const BBox &a, const BBox &b);

// Number of characters shared by two inclusive spans. Spans in different
// documents share nothing.
int64_t SpanIntersection(const TextSpan &a, const TextSpan &b);

bool SpansOverlap(const TextSpan &a, const TextSpan &b);

// Per-task agreement test: equal normalized fills, overlapping mentions in
// the same document, or same-category boxes with IOU above 0.5.
bool SameValue(const Value &a, const Value &b, TaskKind task);

// Partitions the records of one key into value groups. Records are visited
// by descending confidence (ties by roster order); groups are connected
// components of SameValue, holding at most one record per system. A system's
// surplus records in a component are re-clustered among themselves.
std::vector<ValueGroup> GroupValues(std::span<const OutputRecord> records,
                                    TaskKind task, const Roster &roster);

// Groups every key of a record set. Output is ordered by key.
std::vector<ValueGroup> GroupAllValues(std::span<const OutputRecord> records,
                                       TaskKind task, const Roster &roster);

}  // namespace swaf

#endif  // SWAF_ALIGN_H_
