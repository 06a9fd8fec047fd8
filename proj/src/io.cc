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

#include "swaf/io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "overloaded.h"

namespace swaf {

namespace {

constexpr std::string_view kModelMagic = "swaf-model";
constexpr int kModelVersion = 1;

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

// Iterates the non-comment lines of `text`, calling fn(line, line_number).
template <class Fn>
void ForEachLine(std::string_view text, std::string_view source, Fn fn) {
  size_t pos = 0;
  int64_t number = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') {
      try {
        fn(line, number);
      } catch (const Error &e) {
        throw Error(e.code(), std::string(source) + ":" +
                                  std::to_string(number) + ": " + e.message());
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

void ExpectFields(const std::vector<std::string_view> &fields, size_t n,
                  std::string_view what) {
  if (fields.size() != n) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + " line needs " + std::to_string(n) +
                    " tab-separated fields, got " +
                    std::to_string(fields.size()));
  }
}

TextSpan ParseSpan(std::string_view docid, std::string_view start,
                   std::string_view end) {
  TextSpan span;
  span.docid = UnescapeField(docid);
  span.start = ParseInt(start, "start offset");
  span.end = ParseInt(end, "end offset");
  if (span.docid.empty()) throw Error(ErrorCode::kParseError, "empty docid");
  if (span.start < 0 || span.end < 0) {
    throw Error(ErrorCode::kParseError, "negative offset");
  }
  if (span.end < span.start) {
    throw Error(ErrorCode::kParseError, "end offset precedes start offset");
  }
  return span;
}

BBox ParseBox(std::span<const std::string_view> f) {
  BBox box{ParseDouble(f[0], "xmin"), ParseDouble(f[1], "ymin"),
           ParseDouble(f[2], "xmax"), ParseDouble(f[3], "ymax")};
  return box;
}

int ParseCategory(std::string_view field) {
  int64_t c = ParseInt(field, "category");
  if (c < 1 || c > INT32_MAX) {
    throw Error(ErrorCode::kParseError, "category must be >= 1");
  }
  return static_cast<int>(c);
}

std::string SpanFields(const TextSpan &span) {
  return EscapeField(span.docid) + "\t" + std::to_string(span.start) + "\t" +
         std::to_string(span.end);
}

std::string BoxFields(const BBox &box) {
  return FormatDouble(box.xmin) + "\t" + FormatDouble(box.ymin) + "\t" +
         FormatDouble(box.xmax) + "\t" + FormatDouble(box.ymax);
}

}  // namespace

std::vector<std::string> Dataset::ActiveSystems() const {
  std::set<std::string> seen;
  for (const auto &r : records) seen.insert(r.system);
  std::vector<std::string> out;
  for (const auto &id : roster.ids()) {
    if (seen.count(id)) out.push_back(id);
  }
  return out;
}

std::string EscapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string UnescapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\') {
      out += field[i];
      continue;
    }
    if (++i == field.size()) {
      throw Error(ErrorCode::kParseError, "dangling escape");
    }
    switch (field[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default:
        throw Error(ErrorCode::kParseError,
                    std::string("unknown escape \\") + field[i]);
    }
  }
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

double ParseDouble(std::string_view field, std::string_view what) {
  double value = 0;
  auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() ||
      field.empty()) {
    throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " '" +
                                            std::string(field) + "'");
  }
  return value;
}

int64_t ParseInt(std::string_view field, std::string_view what) {
  int64_t value = 0;
  auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() ||
      field.empty()) {
    throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " '" +
                                            std::string(field) + "'");
  }
  return value;
}

std::string FormatRecord(const OutputRecord &r) {
  std::string line = EscapeField(r.system) + "\t";
  std::visit(
      Overloaded{
          [&](const SlotFill &f) {
            const auto &k = std::get<SlotKey>(r.key);
            line += EscapeField(k.query_id) + "\t" + EscapeField(k.slot) +
                    "\t" + EscapeField(f.fill) + "\t" +
                    FormatDouble(r.confidence) + "\t" +
                    SpanFields(std::get<TextSpan>(r.provenance));
          },
          [&](const Mention &m) {
            const auto &k = std::get<EntityKey>(r.key);
            line += EscapeField(k.entity_id) + "\t" +
                    EscapeField(m.entity_type) + "\t" + SpanFields(m.span) +
                    "\t" + FormatDouble(r.confidence);
          },
          [&](const Detection &d) {
            const auto &k = std::get<ImageKey>(r.key);
            line += EscapeField(k.image_id) + "\t" +
                    std::to_string(d.category) + "\t" + BoxFields(d.box) +
                    "\t" + FormatDouble(r.confidence);
          },
      },
      r.value);
  return line;
}

OutputRecord ParseRecord(std::string_view line, TaskKind task) {
  auto f = SplitTabs(line);
  OutputRecord r;
  switch (task) {
    case TaskKind::kSlotFilling: {
      ExpectFields(f, 8, "slotfill record");
      r.system = UnescapeField(f[0]);
      r.key = SlotKey{UnescapeField(f[1]), UnescapeField(f[2])};
      r.value = MakeSlotFill(UnescapeField(f[3]));
      r.confidence = ParseDouble(f[4], "confidence");
      r.provenance = ParseSpan(f[5], f[6], f[7]);
      break;
    }
    case TaskKind::kEntityLinking: {
      ExpectFields(f, 7, "entitylink record");
      r.system = UnescapeField(f[0]);
      r.key = EntityKey{UnescapeField(f[1])};
      Mention m{ParseSpan(f[3], f[4], f[5]), UnescapeField(f[2])};
      r.provenance = m.span;
      r.value = std::move(m);
      r.confidence = ParseDouble(f[6], "confidence");
      break;
    }
    case TaskKind::kObjectDetection: {
      ExpectFields(f, 8, "detection record");
      r.system = UnescapeField(f[0]);
      r.key = ImageKey{UnescapeField(f[1])};
      Detection d{ParseCategory(f[2]), ParseBox(std::span(f).subspan(3, 4))};
      r.provenance = d.box;
      r.value = d;
      r.confidence = ParseDouble(f[7], "confidence");
      break;
    }
  }
  if (r.system.empty()) throw Error(ErrorCode::kParseError, "empty system id");
  return r;
}

std::string FormatRecords(const std::vector<OutputRecord> &records) {
  std::string out;
  for (const auto &r : records) {
    out += FormatRecord(r);
    out += '\n';
  }
  return out;
}

std::vector<OutputRecord> ParseRecords(std::string_view text, TaskKind task,
                                       std::string_view source) {
  std::vector<OutputRecord> records;
  ForEachLine(text, source, [&](std::string_view line, int64_t) {
    records.push_back(ParseRecord(line, task));
  });
  return records;
}

Dataset MakeDataset(std::vector<OutputRecord> records, TaskKind task,
                    const std::optional<Roster> &roster,
                    const CategoryInventory *categories) {
  Dataset ds;
  ds.task = task;
  if (roster) {
    ds.roster = *roster;
  } else {
    std::set<std::string> ids;
    for (const auto &r : records) ids.insert(r.system);
    ds.roster = Roster(std::vector<std::string>(ids.begin(), ids.end()));
  }
  for (auto &r : records) {
    if (auto *key = std::get_if<EntityKey>(&r.key);
        key != nullptr && IsNilId(key->entity_id)) {
      key->entity_id = NamespaceNilId(r.system, key->entity_id);
    }
    r = ValidateRecord(std::move(r), ds.roster, task, categories);
  }
  ds.records = DedupRecords(std::move(records));
  return ds;
}

Dataset Ingest(const std::vector<std::string> &paths, TaskKind task,
               const std::optional<Roster> &roster,
               const CategoryInventory *categories) {
  std::vector<OutputRecord> records;
  for (const auto &path : paths) {
    std::string text = ReadFile(path);
    ForEachLine(text, path, [&](std::string_view line, int64_t) {
      OutputRecord r = ParseRecord(line, task);
      const Roster check = roster ? *roster : Roster({r.system});
      records.push_back(ValidateRecord(std::move(r), check, task, categories));
    });
  }
  return MakeDataset(std::move(records), task, roster, categories);
}

std::string FormatGold(const GoldStandard &gold) {
  std::string out;
  switch (gold.task) {
    case TaskKind::kSlotFilling:
      for (const auto &g : gold.fills) {
        out += EscapeField(g.key.query_id) + "\t" + EscapeField(g.key.slot) +
               "\t" + EscapeField(g.fill.fill) + "\t" +
               SpanFields(g.provenance) + "\n";
      }
      break;
    case TaskKind::kEntityLinking:
      for (const auto &g : gold.mentions) {
        out += EscapeField(g.entity_id) + "\t" + EscapeField(g.entity_type) +
               "\t" + SpanFields(g.span) + "\n";
      }
      break;
    case TaskKind::kObjectDetection:
      for (const auto &g : gold.boxes) {
        out += EscapeField(g.image_id) + "\t" + std::to_string(g.category) +
               "\t" + BoxFields(g.box) + "\n";
      }
      break;
  }
  return out;
}

GoldStandard ParseGold(std::string_view text, TaskKind task,
                       std::string_view source) {
  GoldStandard gold;
  gold.task = task;
  ForEachLine(text, source, [&](std::string_view line, int64_t) {
    auto f = SplitTabs(line);
    switch (task) {
      case TaskKind::kSlotFilling: {
        ExpectFields(f, 6, "slotfill gold");
        GoldFill g;
        g.key = SlotKey{UnescapeField(f[0]), UnescapeField(f[1])};
        g.fill = MakeSlotFill(UnescapeField(f[2]));
        g.provenance = ParseSpan(f[3], f[4], f[5]);
        if (g.fill.normalized.empty()) {
          throw Error(ErrorCode::kParseError, "empty gold fill");
        }
        gold.fills.push_back(std::move(g));
        break;
      }
      case TaskKind::kEntityLinking: {
        ExpectFields(f, 5, "entitylink gold");
        gold.mentions.push_back(GoldMention{UnescapeField(f[0]),
                                            UnescapeField(f[1]),
                                            ParseSpan(f[2], f[3], f[4])});
        break;
      }
      case TaskKind::kObjectDetection: {
        ExpectFields(f, 6, "detection gold");
        GoldBox g{UnescapeField(f[0]), ParseCategory(f[1]),
                  ParseBox(std::span(f).subspan(2, 4))};
        if (!(g.box.area() > 0)) {
          throw Error(ErrorCode::kDegenerateBox, "gold box has no area");
        }
        gold.boxes.push_back(std::move(g));
        break;
      }
    }
  });
  return gold;
}

GoldStandard ReadGold(const std::string &path, TaskKind task) {
  return ParseGold(ReadFile(path), task, path);
}

std::string FormatDocuments(const DocumentStore &store) {
  std::string out;
  for (const auto &[id, text] : store.documents()) {
    out += "doc\t" + EscapeField(id) + "\t" + EscapeField(text) + "\n";
  }
  for (const auto &[id, text] : store.key_documents()) {
    out += "key\t" + EscapeField(id) + "\t" + EscapeField(text) + "\n";
  }
  return out;
}

DocumentStore ParseDocuments(std::string_view text, std::string_view source) {
  DocumentStore store;
  ForEachLine(text, source, [&](std::string_view line, int64_t) {
    auto f = SplitTabs(line);
    ExpectFields(f, 3, "document");
    if (f[0] == "doc") {
      store.AddDocument(UnescapeField(f[1]), UnescapeField(f[2]));
    } else if (f[0] == "key") {
      store.AddKeyDocument(UnescapeField(f[1]), UnescapeField(f[2]));
    } else {
      throw Error(ErrorCode::kParseError,
                  "document kind must be 'doc' or 'key'");
    }
  });
  return store;
}

DocumentStore ReadDocuments(const std::string &path) {
  return ParseDocuments(ReadFile(path), path);
}

std::string FormatModel(const StackerModel &model) {
  const FeatureLayout &layout = model.layout;
  std::ostringstream out;
  out << kModelMagic << '\t' << kModelVersion << '\n';
  out << "task\t" << TaskName(layout.task()) << '\n';
  out << "roster";
  for (const auto &id : layout.roster().ids()) out << '\t' << EscapeField(id);
  out << '\n';
  const auto &cats = layout.categories();
  if (layout.task() == TaskKind::kObjectDetection) {
    out << "object_categories\t" << cats.size() << '\n';
  } else {
    for (const auto &name : cats.names()) {
      out << "category\t" << EscapeField(name);
      if (layout.task() == TaskKind::kSlotFilling) {
        out << '\t' << (cats.IsSingleValued(name) ? "single" : "list");
      }
      out << '\n';
    }
  }
  out << "cosine\t" << (layout.cosine_enabled() ? 1 : 0) << '\n';
  out << "threshold\t" << FormatDouble(model.threshold) << '\n';
  out << "l2\t" << FormatDouble(model.l2) << '\n';
  out << "seed\t" << model.seed << '\n';
  out << "dimension\t" << model.dimension() << '\n';
  auto names = layout.Names();
  for (size_t j = 0; j < model.dimension(); ++j) {
    out << "feature\t" << EscapeField(names[j]) << '\t'
        << FormatDouble(model.mean[j]) << '\t' << FormatDouble(model.scale[j])
        << '\t' << FormatDouble(model.weights[j]) << '\n';
  }
  out << "bias\t" << FormatDouble(model.bias) << '\n';
  out << "end\n";
  return out.str();
}

StackerModel ParseModel(std::string_view text) {
  std::vector<std::vector<std::string_view>> lines;
  ForEachLine(text, "<model>", [&](std::string_view line, int64_t) {
    lines.push_back(SplitTabs(line));
  });
  size_t at = 0;
  auto next = [&](std::string_view tag) -> const std::vector<std::string_view> & {
    if (at >= lines.size() || lines[at][0] != tag) {
      throw Error(ErrorCode::kParseError,
                  "model file: expected '" + std::string(tag) + "'");
    }
    return lines[at++];
  };
  auto single = [&](std::string_view tag) {
    const auto &l = next(tag);
    if (l.size() != 2) {
      throw Error(ErrorCode::kParseError,
                  "model file: malformed '" + std::string(tag) + "'");
    }
    return l[1];
  };

  if (single(kModelMagic) != std::to_string(kModelVersion)) {
    throw Error(ErrorCode::kIncompatibleModel, "unsupported model version");
  }
  TaskKind task = ParseTaskKind(single("task"));
  std::vector<std::string> ids;
  {
    const auto &l = next("roster");
    for (size_t i = 1; i < l.size(); ++i) ids.push_back(UnescapeField(l[i]));
  }
  CategoryInventory cats;
  if (task == TaskKind::kObjectDetection) {
    cats = CategoryInventory::ObjectCategories(
        static_cast<int>(ParseInt(single("object_categories"), "categories")));
  } else {
    std::vector<SlotSpec> slots;
    std::vector<std::string> types;
    while (at < lines.size() && lines[at][0] == "category") {
      const auto &l = lines[at++];
      if (task == TaskKind::kSlotFilling) {
        if (l.size() != 3 || (l[2] != "single" && l[2] != "list")) {
          throw Error(ErrorCode::kParseError, "model file: bad slot category");
        }
        slots.push_back({UnescapeField(l[1]), l[2] == "single"});
      } else {
        if (l.size() != 2) {
          throw Error(ErrorCode::kParseError, "model file: bad entity type");
        }
        types.push_back(UnescapeField(l[1]));
      }
    }
    cats = task == TaskKind::kSlotFilling
               ? CategoryInventory::Slots(std::move(slots))
               : CategoryInventory::EntityTypes(std::move(types));
  }
  bool cosine = ParseInt(single("cosine"), "cosine flag") != 0;

  StackerModel model;
  model.layout = FeatureLayout(task, Roster(std::move(ids)), std::move(cats),
                               cosine);
  model.threshold = ParseDouble(single("threshold"), "threshold");
  model.l2 = ParseDouble(single("l2"), "l2");
  model.seed = static_cast<uint64_t>(ParseInt(single("seed"), "seed"));
  const auto dim = static_cast<size_t>(ParseInt(single("dimension"), "dim"));
  auto names = model.layout.Names();
  if (dim != names.size()) {
    throw Error(ErrorCode::kIncompatibleModel,
                "model dimension does not match its layout");
  }
  for (size_t j = 0; j < dim; ++j) {
    const auto &l = next("feature");
    if (l.size() != 5) {
      throw Error(ErrorCode::kParseError, "model file: malformed feature");
    }
    if (UnescapeField(l[1]) != names[j]) {
      throw Error(ErrorCode::kIncompatibleModel,
                  "feature " + std::to_string(j) + " is '" +
                      UnescapeField(l[1]) + "', layout expects '" + names[j] +
                      "'");
    }
    model.mean.push_back(ParseDouble(l[2], "mean"));
    model.scale.push_back(ParseDouble(l[3], "scale"));
    model.weights.push_back(ParseDouble(l[4], "weight"));
  }
  model.bias = ParseDouble(single("bias"), "bias");
  next("end");
  return model;
}

ConfigMap ParseConfig(std::string_view text, std::string_view source) {
  ConfigMap config;
  ForEachLine(text, source, [&](std::string_view line, int64_t) {
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "expected key = value");
    }
    auto trim = [](std::string_view s) {
      const char *ws = " \t";
      size_t b = s.find_first_not_of(ws);
      if (b == std::string_view::npos) return std::string();
      size_t e = s.find_last_not_of(ws);
      return std::string(s.substr(b, e - b + 1));
    };
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::kParseError, "empty config key");
    config[key] = trim(line.substr(eq + 1));
  });
  return config;
}

ConfigMap ReadConfig(const std::string &path) {
  return ParseConfig(ReadFile(path), path);
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFileAtomic(const std::string &path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

}  // namespace swaf
