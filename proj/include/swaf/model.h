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

#ifndef SWAF_MODEL_H_
#define SWAF_MODEL_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swaf {

// The three fusion tasks. Every dataset, record and model is bound to
// exactly one of them.
enum class TaskKind { kSlotFilling, kEntityLinking, kObjectDetection };

// Stable textual names used in files and on the command line:
// "slotfill", "entitylink", "detection".
std::string_view TaskName(TaskKind task);
TaskKind ParseTaskKind(std::string_view name);

// Slot filling and entity linking carry text provenance.
inline bool IsTextTask(TaskKind task) {
  return task != TaskKind::kObjectDetection;
}

enum class ErrorCode {
  kUnknownSystem,
  kTaskMismatch,
  kDegenerateBox,
  kNegativeOffset,
  kInvalidValue,
  kMixedKeys,
  kSystemNotInGroup,
  kMissingDocument,
  kUnknownCategory,
  kUnknownSlot,
  kDegenerateLabels,
  kDimensionMismatch,
  kParseError,
  kIncompatibleModel,
  kInvalidSpec,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const { return code_; }
  // The message without the error-code prefix.
  const std::string &message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

// Character span in a document. Offsets are inclusive on both ends, so a
// span covers end - start + 1 characters.
struct TextSpan {
  std::string docid;
  int64_t start = 0;
  int64_t end = 0;

  int64_t length() const { return end - start + 1; }

  auto operator<=>(const TextSpan &) const = default;
  bool operator==(const TextSpan &) const = default;
};

// Axis-aligned box in pixel coordinates.
struct BBox {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }

  auto operator<=>(const BBox &) const = default;
  bool operator==(const BBox &) const = default;
};

// Keys identify the question all systems answer.
struct SlotKey {
  std::string query_id;
  std::string slot;
  auto operator<=>(const SlotKey &) const = default;
  bool operator==(const SlotKey &) const = default;
};

// A KB id, or a NIL id namespaced by the producing system.
struct EntityKey {
  std::string entity_id;
  auto operator<=>(const EntityKey &) const = default;
  bool operator==(const EntityKey &) const = default;
};

struct ImageKey {
  std::string image_id;
  auto operator<=>(const ImageKey &) const = default;
  bool operator==(const ImageKey &) const = default;
};

using Key = std::variant<SlotKey, EntityKey, ImageKey>;

// A slot fill. `fill` is the trimmed surface string that gets written out;
// `normalized` is its comparison form (NFC, case-folded).
struct SlotFill {
  std::string fill;
  std::string normalized;
  auto operator<=>(const SlotFill &) const = default;
  bool operator==(const SlotFill &) const = default;
};

struct Mention {
  TextSpan span;
  std::string entity_type;
  auto operator<=>(const Mention &) const = default;
  bool operator==(const Mention &) const = default;
};

struct Detection {
  int category = 0;
  BBox box;
  auto operator<=>(const Detection &) const = default;
  bool operator==(const Detection &) const = default;
};

using Value = std::variant<SlotFill, Mention, Detection>;
using Provenance = std::variant<TextSpan, BBox>;

TaskKind TaskOf(const Key &key);
TaskKind TaskOf(const Value &value);

std::string KeyString(const Key &key);
std::string ValueString(const Value &value);

// One system's claim about one key.
struct OutputRecord {
  std::string system;
  Key key;
  Value value;
  double confidence = 0;
  Provenance provenance;

  bool operator==(const OutputRecord &) const = default;
};

// Ordered set of system ids. The order defines the stacker's feature layout.
class Roster {
 public:
  Roster() = default;
  explicit Roster(std::vector<std::string> ids);

  size_t size() const { return ids_.size(); }
  const std::vector<std::string> &ids() const { return ids_; }
  const std::string &id(size_t i) const { return ids_[i]; }
  std::optional<size_t> IndexOf(std::string_view id) const;
  bool Contains(std::string_view id) const { return IndexOf(id).has_value(); }

  bool operator==(const Roster &) const = default;

 private:
  std::vector<std::string> ids_;
};

// All records (at most one per system) judged to assert the same value for
// one key.
struct ValueGroup {
  Key key;
  Value canonical;
  std::string canonical_system;
  std::map<std::string, OutputRecord> members;

  size_t size() const { return members.size(); }
  const OutputRecord &member(std::string_view system) const;
  const OutputRecord &canonical_record() const {
    return members.at(canonical_system);
  }
};

struct SlotSpec {
  std::string name;
  bool single_valued = false;
};

// Per-task categorical inventory: slot types, entity types or object
// categories 1..C. Drives the one-hot feature block and key validation.
class CategoryInventory {
 public:
  CategoryInventory() = default;

  static CategoryInventory Slots(std::vector<SlotSpec> slots);
  static CategoryInventory EntityTypes(std::vector<std::string> types);
  static CategoryInventory ObjectCategories(int count);
  static CategoryInventory Default(TaskKind task);

  TaskKind task() const { return task_; }
  size_t size() const { return names_.size(); }
  const std::vector<std::string> &names() const { return names_; }
  const std::string &name(size_t i) const { return names_[i]; }
  std::optional<size_t> IndexOf(std::string_view name) const;

  // Throws kUnknownSlot for slots outside the inventory.
  bool IsSingleValued(std::string_view slot) const;

  bool operator==(const CategoryInventory &) const = default;

 private:
  TaskKind task_ = TaskKind::kSlotFilling;
  std::vector<std::string> names_;
  std::vector<bool> single_valued_;
};

// The inventory entry a record belongs to: slot type, entity type or
// object category (as a decimal string).
std::string CategoryOf(const Key &key, const Value &value);

// Gold standard entries. They mirror records without system and confidence.
struct GoldFill {
  SlotKey key;
  SlotFill fill;
  TextSpan provenance;
};

struct GoldMention {
  std::string entity_id;
  std::string entity_type;
  TextSpan span;
};

struct GoldBox {
  std::string image_id;
  int category = 0;
  BBox box;
};

struct GoldStandard {
  TaskKind task = TaskKind::kSlotFilling;
  std::vector<GoldFill> fills;
  std::vector<GoldMention> mentions;
  std::vector<GoldBox> boxes;
};

// NFC + whitespace trim + full case folding. Used only for equality.
std::string NormalizeFill(std::string_view fill);
SlotFill MakeSlotFill(std::string_view raw);

bool IsNilId(std::string_view entity_id);
std::string NamespaceNilId(std::string_view system, std::string_view nil_id);

// Checks a record against the roster and task. Clamps the confidence into
// [0,1] and trims/normalizes slot fills. If `inventory` is given the
// record's category must belong to it. Idempotent.
OutputRecord ValidateRecord(OutputRecord record, const Roster &roster,
                            TaskKind task,
                            const CategoryInventory *inventory = nullptr);

// Collapses records that repeat the same (system, key, value), keeping the
// highest confidence. Output is sorted and independent of input order.
std::vector<OutputRecord> DedupRecords(std::vector<OutputRecord> records);

}  // namespace swaf

#endif  // SWAF_MODEL_H_
