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

#ifndef SWAF_IO_H_
#define SWAF_IO_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swaf/features.h"
#include "swaf/model.h"
#include "swaf/stacker.h"

namespace swaf {

// Validated, deduplicated records of several systems for one task.
struct Dataset {
  TaskKind task = TaskKind::kSlotFilling;
  Roster roster;
  std::vector<OutputRecord> records;

  // Systems that contributed at least one record, in roster order.
  std::vector<std::string> ActiveSystems() const;
};

// Record lines are tab-separated UTF-8, one record per line:
//
//   slotfill:   system  query  slot  fill  confidence  docid  start  end
//   entitylink: system  entity  type  docid  start  end  confidence
//   detection:  system  image  category  xmin  ymin  xmax  ymax  confidence
//
// Gold lines drop the system and confidence columns. Blank lines and lines
// starting with '#' are ignored. Text fields escape \\ \t \n \r.
std::string FormatRecord(const OutputRecord &record);
OutputRecord ParseRecord(std::string_view line, TaskKind task);

std::string FormatRecords(const std::vector<OutputRecord> &records);
std::vector<OutputRecord> ParseRecords(std::string_view text, TaskKind task,
                                       std::string_view source = "<input>");

// Reads, validates and deduplicates system output files. Without an explicit
// roster the roster is the sorted set of system ids seen. Entity-linking NIL
// ids are namespaced by system.
Dataset Ingest(const std::vector<std::string> &paths, TaskKind task,
               const std::optional<Roster> &roster = std::nullopt,
               const CategoryInventory *categories = nullptr);

// Same as Ingest over in-memory records.
Dataset MakeDataset(std::vector<OutputRecord> records, TaskKind task,
                    const std::optional<Roster> &roster = std::nullopt,
                    const CategoryInventory *categories = nullptr);

std::string FormatGold(const GoldStandard &gold);
GoldStandard ParseGold(std::string_view text, TaskKind task,
                       std::string_view source = "<gold>");
GoldStandard ReadGold(const std::string &path, TaskKind task);

// Document store lines: "doc<TAB>docid<TAB>text" and
// "key<TAB>key-id<TAB>text", with escaped text.
std::string FormatDocuments(const DocumentStore &store);
DocumentStore ParseDocuments(std::string_view text,
                             std::string_view source = "<docs>");
DocumentStore ReadDocuments(const std::string &path);

// Versioned text model format; every double is written in shortest
// round-trip form, so Parse(Format(m)) == m bit for bit.
std::string FormatModel(const StackerModel &model);
StackerModel ParseModel(std::string_view text);

// Flat "key = value" config; '#' starts a comment line.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap ParseConfig(std::string_view text, std::string_view source);
ConfigMap ReadConfig(const std::string &path);

std::string FormatDouble(double value);
double ParseDouble(std::string_view field, std::string_view what);
int64_t ParseInt(std::string_view field, std::string_view what);

std::string EscapeField(std::string_view field);
std::string UnescapeField(std::string_view field);

std::string ReadFile(const std::string &path);
// Writes via a temporary file and rename.
void WriteFileAtomic(const std::string &path, std::string_view content);

}  // namespace swaf

#endif  // SWAF_IO_H_
