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

#include "swaf/model.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "overloaded.h"

namespace swaf {

namespace {

// Slot inventory of the cold start slot filling track.
const SlotSpec kTacSlots[] = {
    {"per:alternate_names", false},
    {"per:date_of_birth", true},
    {"per:age", true},
    {"per:country_of_birth", true},
    {"per:stateorprovince_of_birth", true},
    {"per:city_of_birth", true},
    {"per:origin", false},
    {"per:date_of_death", true},
    {"per:country_of_death", true},
    {"per:stateorprovince_of_death", true},
    {"per:city_of_death", true},
    {"per:cause_of_death", true},
    {"per:countries_of_residence", false},
    {"per:statesorprovinces_of_residence", false},
    {"per:cities_of_residence", false},
    {"per:schools_attended", false},
    {"per:title", false},
    {"per:employee_or_member_of", false},
    {"per:religion", true},
    {"per:spouse", false},
    {"per:children", false},
    {"per:parents", false},
    {"per:siblings", false},
    {"per:other_family", false},
    {"per:charges", false},
    {"org:alternate_names", false},
    {"org:political_religious_affiliation", false},
    {"org:top_members_employees", false},
    {"org:number_of_employees_members", true},
    {"org:members", false},
    {"org:member_of", false},
    {"org:subsidiaries", false},
    {"org:parents", false},
    {"org:founded_by", false},
    {"org:date_founded", true},
    {"org:date_dissolved", true},
    {"org:country_of_headquarters", true},
    {"org:stateorprovince_of_headquarters", true},
    {"org:city_of_headquarters", true},
    {"org:shareholders", false},
    {"org:website", true},
};

const char *const kEntityTypes[] = {"PER", "ORG", "GPE", "FAC", "LOC"};

std::string TrimAscii(std::string_view s) {
  const char *ws = " \t\n\r\f\v";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

void CheckSpan(const TextSpan &span) {
  if (span.docid.empty()) {
    throw Error(ErrorCode::kInvalidValue, "empty docid");
  }
  if (span.start < 0 || span.end < 0) {
    throw Error(ErrorCode::kNegativeOffset,
                "negative offset in " + span.docid);
  }
  if (span.end < span.start) {
    throw Error(ErrorCode::kInvalidValue,
                "span end precedes start in " + span.docid);
  }
}

void CheckBox(const BBox &box) {
  if (!std::isfinite(box.xmin) || !std::isfinite(box.ymin) ||
      !std::isfinite(box.xmax) || !std::isfinite(box.ymax)) {
    throw Error(ErrorCode::kInvalidValue, "non-finite box coordinate");
  }
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) {
    throw Error(ErrorCode::kDegenerateBox, "box has non-positive area");
  }
}

// Comparison identity used by deduplication.
using Identity = std::variant<std::string, TextSpan, Detection>;

Identity IdentityOf(const Value &value) {
  return std::visit(
      Overloaded{
          [](const SlotFill &f) -> Identity { return f.normalized; },
          [](const Mention &m) -> Identity { return m.span; },
          [](const Detection &d) -> Identity { return d; },
      },
      value);
}

}  // namespace

std::string_view TaskName(TaskKind task) {
  switch (task) {
    case TaskKind::kSlotFilling:
      return "slotfill";
    case TaskKind::kEntityLinking:
      return "entitylink";
    case TaskKind::kObjectDetection:
      return "detection";
  }
  return "unknown";
}

TaskKind ParseTaskKind(std::string_view name) {
  if (name == "slotfill") return TaskKind::kSlotFilling;
  if (name == "entitylink") return TaskKind::kEntityLinking;
  if (name == "detection") return TaskKind::kObjectDetection;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown task '" + std::string(name) + "'");
}

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSystem: return "UnknownSystem";
    case ErrorCode::kTaskMismatch: return "TaskMismatch";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kNegativeOffset: return "NegativeOffset";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kMixedKeys: return "MixedKeys";
    case ErrorCode::kSystemNotInGroup: return "SystemNotInGroup";
    case ErrorCode::kMissingDocument: return "MissingDocument";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kUnknownSlot: return "UnknownSlot";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIncompatibleModel: return "IncompatibleModel";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

TaskKind TaskOf(const Key &key) {
  return std::visit(Overloaded{
                        [](const SlotKey &) { return TaskKind::kSlotFilling; },
                        [](const EntityKey &) {
                          return TaskKind::kEntityLinking;
                        },
                        [](const ImageKey &) {
                          return TaskKind::kObjectDetection;
                        },
                    },
                    key);
}

TaskKind TaskOf(const Value &value) {
  return std::visit(
      Overloaded{
          [](const SlotFill &) { return TaskKind::kSlotFilling; },
          [](const Mention &) { return TaskKind::kEntityLinking; },
          [](const Detection &) { return TaskKind::kObjectDetection; },
      },
      value);
}

std::string KeyString(const Key &key) {
  return std::visit(
      Overloaded{
          [](const SlotKey &k) { return k.query_id + "/" + k.slot; },
          [](const EntityKey &k) { return k.entity_id; },
          [](const ImageKey &k) { return k.image_id; },
      },
      key);
}

std::string ValueString(const Value &value) {
  return std::visit(
      Overloaded{
          [](const SlotFill &f) { return f.fill; },
          [](const Mention &m) {
            return m.span.docid + ":" + std::to_string(m.span.start) + "-" +
                   std::to_string(m.span.end);
          },
          [](const Detection &d) {
            return std::to_string(d.category) + "@(" +
                   std::to_string(d.box.xmin) + "," +
                   std::to_string(d.box.ymin) + "," +
                   std::to_string(d.box.xmax) + "," +
                   std::to_string(d.box.ymax) + ")";
          },
      },
      value);
}

Roster::Roster(std::vector<std::string> ids) : ids_(std::move(ids)) {
  for (size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) {
      throw Error(ErrorCode::kInvalidSpec, "empty system id in roster");
    }
    for (size_t j = 0; j < i; ++j) {
      if (ids_[i] == ids_[j]) {
        throw Error(ErrorCode::kInvalidSpec,
                    "duplicate system id '" + ids_[i] + "' in roster");
      }
    }
  }
}

std::optional<size_t> Roster::IndexOf(std::string_view id) const {
  for (size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

const OutputRecord &ValueGroup::member(std::string_view system) const {
  auto it = members.find(std::string(system));
  if (it == members.end()) {
    throw Error(ErrorCode::kSystemNotInGroup,
                "system '" + std::string(system) + "' not in group for " +
                    KeyString(key));
  }
  return it->second;
}

CategoryInventory CategoryInventory::Slots(std::vector<SlotSpec> slots) {
  CategoryInventory inv;
  inv.task_ = TaskKind::kSlotFilling;
  for (auto &s : slots) {
    if (inv.IndexOf(s.name)) {
      throw Error(ErrorCode::kInvalidSpec, "duplicate slot " + s.name);
    }
    inv.names_.push_back(std::move(s.name));
    inv.single_valued_.push_back(s.single_valued);
  }
  return inv;
}

CategoryInventory CategoryInventory::EntityTypes(
    std::vector<std::string> types) {
  CategoryInventory inv;
  inv.task_ = TaskKind::kEntityLinking;
  for (auto &t : types) {
    if (inv.IndexOf(t)) {
      throw Error(ErrorCode::kInvalidSpec, "duplicate entity type " + t);
    }
    inv.names_.push_back(std::move(t));
    inv.single_valued_.push_back(false);
  }
  return inv;
}

CategoryInventory CategoryInventory::ObjectCategories(int count) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidSpec, "category count must be >= 1");
  }
  CategoryInventory inv;
  inv.task_ = TaskKind::kObjectDetection;
  for (int c = 1; c <= count; ++c) {
    inv.names_.push_back(std::to_string(c));
    inv.single_valued_.push_back(false);
  }
  return inv;
}

CategoryInventory CategoryInventory::Default(TaskKind task) {
  switch (task) {
    case TaskKind::kSlotFilling:
      return Slots({std::begin(kTacSlots), std::end(kTacSlots)});
    case TaskKind::kEntityLinking:
      return EntityTypes({std::begin(kEntityTypes), std::end(kEntityTypes)});
    case TaskKind::kObjectDetection:
      return ObjectCategories(200);
  }
  return {};
}

std::optional<size_t> CategoryInventory::IndexOf(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<size_t>(it - names_.begin());
}

bool CategoryInventory::IsSingleValued(std::string_view slot) const {
  auto idx = IndexOf(slot);
  if (!idx || task_ != TaskKind::kSlotFilling) {
    throw Error(ErrorCode::kUnknownSlot,
                "slot '" + std::string(slot) + "' not in inventory");
  }
  return single_valued_[*idx];
}

std::string CategoryOf(const Key &key, const Value &value) {
  if (const auto *k = std::get_if<SlotKey>(&key)) return k->slot;
  if (const auto *m = std::get_if<Mention>(&value)) return m->entity_type;
  if (const auto *d = std::get_if<Detection>(&value)) {
    return std::to_string(d->category);
  }
  throw Error(ErrorCode::kTaskMismatch, "key and value tasks differ");
}

std::string NormalizeFill(std::string_view fill) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(fill.data(), static_cast<int32_t>(fill.size())));
  icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidValue, "cannot normalize fill");
  }
  normalized.trim();
  normalized.foldCase();
  // Case folding can produce decomposed sequences; recompose.
  normalized = nfc->normalize(normalized, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidValue, "cannot normalize fill");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

SlotFill MakeSlotFill(std::string_view raw) {
  SlotFill f;
  f.fill = TrimAscii(raw);
  f.normalized = NormalizeFill(f.fill);
  return f;
}

bool IsNilId(std::string_view entity_id) {
  size_t colon = entity_id.rfind(':');
  std::string_view local =
      colon == std::string_view::npos ? entity_id : entity_id.substr(colon + 1);
  return local.starts_with("NIL");
}

std::string NamespaceNilId(std::string_view system, std::string_view nil_id) {
  std::string prefix = std::string(system) + ":";
  if (nil_id.starts_with(prefix)) return std::string(nil_id);
  return prefix + std::string(nil_id);
}

OutputRecord ValidateRecord(OutputRecord record, const Roster &roster,
                            TaskKind task,
                            const CategoryInventory *inventory) {
  if (!roster.Contains(record.system)) {
    throw Error(ErrorCode::kUnknownSystem,
                "system '" + record.system + "' not in roster");
  }
  if (TaskOf(record.key) != task || TaskOf(record.value) != task) {
    throw Error(ErrorCode::kTaskMismatch,
                "record is not a " + std::string(TaskName(task)) + " record");
  }
  if (std::isnan(record.confidence)) {
    throw Error(ErrorCode::kInvalidValue, "confidence is NaN");
  }
  record.confidence = std::min(std::max(record.confidence, 0.0), 1.0);

  std::visit(
      Overloaded{
          [](const SlotKey &k) {
            if (k.query_id.empty() || k.slot.empty()) {
              throw Error(ErrorCode::kInvalidValue, "empty slot key field");
            }
          },
          [](const EntityKey &k) {
            if (k.entity_id.empty()) {
              throw Error(ErrorCode::kInvalidValue, "empty entity id");
            }
          },
          [](const ImageKey &k) {
            if (k.image_id.empty()) {
              throw Error(ErrorCode::kInvalidValue, "empty image id");
            }
          },
      },
      record.key);

  if (auto *fill = std::get_if<SlotFill>(&record.value)) {
    *fill = MakeSlotFill(fill->fill);
    if (fill->normalized.empty()) {
      throw Error(ErrorCode::kInvalidValue, "empty slot fill");
    }
    const auto *span = std::get_if<TextSpan>(&record.provenance);
    if (span == nullptr) {
      throw Error(ErrorCode::kTaskMismatch, "slot fill needs text provenance");
    }
    CheckSpan(*span);
  } else if (auto *mention = std::get_if<Mention>(&record.value)) {
    CheckSpan(mention->span);
    if (mention->entity_type.empty()) {
      throw Error(ErrorCode::kInvalidValue, "empty entity type");
    }
    record.provenance = mention->span;
  } else if (auto *det = std::get_if<Detection>(&record.value)) {
    CheckBox(det->box);
    if (det->category < 1) {
      throw Error(ErrorCode::kUnknownCategory,
                  "category " + std::to_string(det->category) + " < 1");
    }
    record.provenance = det->box;
  }

  if (inventory != nullptr) {
    if (inventory->task() != task) {
      throw Error(ErrorCode::kTaskMismatch, "inventory task differs");
    }
    std::string category = CategoryOf(record.key, record.value);
    if (!inventory->IndexOf(category)) {
      throw Error(ErrorCode::kUnknownCategory,
                  "category '" + category + "' not in inventory");
    }
  }
  return record;
}

std::vector<OutputRecord> DedupRecords(std::vector<OutputRecord> records) {
  auto order = [](const OutputRecord &r) {
    return std::tuple<const std::string &, const Key &, Identity, double,
                      const Value &, const Provenance &>(
        r.system, r.key, IdentityOf(r.value), -r.confidence, r.value,
        r.provenance);
  };
  std::sort(records.begin(), records.end(),
            [&](const OutputRecord &a, const OutputRecord &b) {
              return order(a) < order(b);
            });
  std::vector<OutputRecord> out;
  out.reserve(records.size());
  for (auto &r : records) {
    if (!out.empty() && out.back().system == r.system &&
        out.back().key == r.key &&
        IdentityOf(out.back().value) == IdentityOf(r.value)) {
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace swaf
