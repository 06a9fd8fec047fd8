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

#include "swaf/features.h"

#include <cmath>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "swaf/align.h"

namespace swaf {

namespace {

const TextSpan &SpanOf(const OutputRecord &record) {
  const auto *span = std::get_if<TextSpan>(&record.provenance);
  if (span == nullptr) {
    throw Error(ErrorCode::kTaskMismatch,
                "record of " + record.system + " has no text provenance");
  }
  return *span;
}

const BBox &BoxOf(const OutputRecord &record) {
  const auto *box = std::get_if<BBox>(&record.provenance);
  if (box == nullptr) {
    throw Error(ErrorCode::kTaskMismatch,
                "record of " + record.system + " has no box provenance");
  }
  return *box;
}

std::string KeyDocumentId(const Key &key) {
  if (const auto *k = std::get_if<SlotKey>(&key)) return k->query_id;
  if (const auto *k = std::get_if<EntityKey>(&key)) return k->entity_id;
  return std::get<ImageKey>(key).image_id;
}

}  // namespace

double ProvenanceOffsetScore(const ValueGroup &group, std::string_view system) {
  const TextSpan &x = SpanOf(group.member(system));
  double sum = 0;
  for (const auto &[id, record] : group.members) {
    if (id == system) continue;
    const TextSpan &other = SpanOf(record);
    int64_t inter = SpanIntersection(other, x);
    if (inter == 0) continue;
    int64_t uni = other.length() + x.length() - inter;
    sum += static_cast<double>(inter) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(group.size());
}

double BboxOverlapScore(const ValueGroup &group, std::string_view system) {
  const BBox &x = BoxOf(group.member(system));
  double sum = 0;
  for (const auto &[id, record] : group.members) {
    if (id == system) continue;
    sum += Iou(BoxOf(record), x);
  }
  return sum / static_cast<double>(group.size());
}

std::map<std::string, double> DocProvenanceScores(const ValueGroup &group) {
  std::map<std::string, int> per_doc;
  for (const auto &[id, record] : group.members) ++per_doc[SpanOf(record).docid];
  std::map<std::string, double> scores;
  const double n = static_cast<double>(group.size());
  for (const auto &[id, record] : group.members) {
    scores[id] = per_doc[SpanOf(record).docid] / n;
  }
  return scores;
}

void DocumentStore::AddDocument(std::string docid, std::string text) {
  documents_[std::move(docid)] = std::move(text);
}

void DocumentStore::AddKeyDocument(std::string key_id, std::string text) {
  key_documents_[std::move(key_id)] = std::move(text);
}

const std::string *DocumentStore::FindDocument(std::string_view docid) const {
  auto it = documents_.find(std::string(docid));
  return it == documents_.end() ? nullptr : &it->second;
}

const std::string *DocumentStore::FindKeyDocument(
    std::string_view key_id) const {
  auto it = key_documents_.find(std::string(key_id));
  return it == key_documents_.end() ? nullptr : &it->second;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto *s = reinterpret_cast<const uint8_t *>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c >= 0 && u_isalnum(c)) {
      UChar32 lower = u_tolower(c);
      char buf[U8_MAX_LENGTH];
      int32_t n = 0;
      U8_APPEND_UNSAFE(reinterpret_cast<uint8_t *>(buf), n, lower);
      current.append(buf, n);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

std::map<std::string, int> TermCounts(std::string_view text) {
  std::map<std::string, int> counts;
  for (auto &t : Tokenize(text)) ++counts[std::move(t)];
  return counts;
}

}  // namespace

TfIdfIndex::TfIdfIndex(const DocumentStore &store)
    : num_documents_(store.documents().size()) {
  std::unordered_map<std::string, int> df;
  for (const auto &[id, text] : store.documents()) {
    for (const auto &[term, count] : TermCounts(text)) ++df[term];
  }
  for (const auto &[term, count] : df) {
    idf_[term] = std::log(static_cast<double>(num_documents_) / count);
  }
  for (const auto &[id, text] : store.documents()) {
    doc_vectors_.emplace(id, Vectorize(text));
  }
  for (const auto &[id, text] : store.key_documents()) {
    key_vectors_.emplace(id, Vectorize(text));
  }
}

double TfIdfIndex::Idf(const std::string &term) const {
  auto it = idf_.find(term);
  return it == idf_.end() ? 0.0 : it->second;
}

SparseVector TfIdfIndex::Vectorize(std::string_view text) const {
  SparseVector v;
  for (const auto &[term, count] : TermCounts(text)) {
    auto it = idf_.find(term);
    if (it == idf_.end() || it->second == 0.0) continue;
    v[term] = count * it->second;
  }
  return v;
}

const SparseVector *TfIdfIndex::DocumentVector(std::string_view docid) const {
  auto it = doc_vectors_.find(docid);
  return it == doc_vectors_.end() ? nullptr : &it->second;
}

const SparseVector *TfIdfIndex::KeyDocumentVector(
    std::string_view key_id) const {
  auto it = key_vectors_.find(key_id);
  return it == key_vectors_.end() ? nullptr : &it->second;
}

double CosineSimilarity(const SparseVector &a, const SparseVector &b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto &[t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto &[t, w] : b) nb += w * w;
  if (na == 0 || nb == 0) return 0.0;
  double cos = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, std::max(0.0, cos));
}

double KeyValueDocSimilarity(std::string_view key_doc,
                             std::string_view value_doc,
                             const TfIdfIndex &stats) {
  return CosineSimilarity(stats.Vectorize(key_doc), stats.Vectorize(value_doc));
}

FeatureLayout::FeatureLayout(TaskKind task, Roster roster,
                             CategoryInventory categories, bool cosine_enabled)
    : task_(task),
      roster_(std::move(roster)),
      categories_(std::move(categories)),
      cosine_enabled_(cosine_enabled && IsTextTask(task)) {
  if (categories_.task() != task_) {
    throw Error(ErrorCode::kTaskMismatch, "category inventory task differs");
  }
  if (roster_.size() == 0) {
    throw Error(ErrorCode::kInvalidSpec, "empty roster");
  }
}

std::vector<std::string> FeatureLayout::Names() const {
  std::vector<std::string> names;
  names.reserve(dimension());
  const bool text = IsTextTask(task_);
  for (const auto &s : roster_.ids()) names.push_back("conf:" + s);
  for (const auto &s : roster_.ids()) {
    names.push_back((text ? "po:" : "bbo:") + s);
  }
  if (text) {
    for (const auto &s : roster_.ids()) names.push_back("docprov:" + s);
    for (const auto &s : roster_.ids()) names.push_back("cos:" + s);
  }
  for (const auto &c : categories_.names()) names.push_back("type:" + c);
  return names;
}

FeatureVector BuildFeatureVector(const ValueGroup &group,
                                 const FeatureLayout &layout,
                                 const TfIdfIndex *stats) {
  if (group.size() == 0) {
    throw Error(ErrorCode::kInvalidValue, "empty value group");
  }
  if (TaskOf(group.key) != layout.task()) {
    throw Error(ErrorCode::kTaskMismatch, "group task differs from layout");
  }
  FeatureVector f;
  f.values.assign(layout.dimension(), 0.0);
  const bool text = IsTextTask(layout.task());

  std::map<std::string, double> doc_scores;
  if (text) doc_scores = DocProvenanceScores(group);

  const SparseVector *key_vector = nullptr;
  const bool cosine = text && layout.cosine_enabled() && stats != nullptr;
  if (cosine) key_vector = stats->KeyDocumentVector(KeyDocumentId(group.key));

  for (const auto &[system, record] : group.members) {
    auto idx = layout.roster().IndexOf(system);
    if (!idx) {
      throw Error(ErrorCode::kUnknownSystem,
                  "system '" + system + "' not in layout roster");
    }
    f.values[layout.confidence_offset() + *idx] = record.confidence;
    if (text) {
      f.values[layout.overlap_offset() + *idx] =
          ProvenanceOffsetScore(group, system);
      f.values[layout.doc_provenance_offset() + *idx] = doc_scores[system];
      if (cosine) {
        const std::string &docid = SpanOf(record).docid;
        const SparseVector *doc_vector = stats->DocumentVector(docid);
        if (doc_vector == nullptr) {
          throw Error(ErrorCode::kMissingDocument,
                      "document '" + docid + "' not in store");
        }
        f.values[layout.cosine_offset() + *idx] =
            key_vector == nullptr ? 0.0
                                  : CosineSimilarity(*key_vector, *doc_vector);
      }
    } else {
      f.values[layout.overlap_offset() + *idx] = BboxOverlapScore(group, system);
    }
  }

  std::string category = CategoryOf(group.key, group.canonical);
  auto cat = layout.categories().IndexOf(category);
  if (!cat) {
    throw Error(ErrorCode::kUnknownCategory,
                "category '" + category + "' not in inventory");
  }
  f.values[layout.category_offset() + *cat] = 1.0;
  return f;
}

FeatureExtractor::FeatureExtractor(FeatureLayout layout,
                                   std::shared_ptr<const DocumentStore> store)
    : layout_(std::move(layout)), store_(std::move(store)) {
  if (layout_.cosine_enabled()) {
    if (store_ == nullptr) {
      throw Error(ErrorCode::kMissingDocument,
                  "layout expects a document store");
    }
    stats_ = std::make_unique<TfIdfIndex>(*store_);
  }
}

FeatureVector FeatureExtractor::Extract(const ValueGroup &group) const {
  return BuildFeatureVector(group, layout_, stats_.get());
}

}  // namespace swaf
