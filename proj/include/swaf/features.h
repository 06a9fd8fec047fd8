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

#ifndef SWAF_FEATURES_H_
#define SWAF_FEATURES_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "swaf/model.h"

namespace swaf {

// Provenance offset score of system `system` within `group`:
//
//   PO(x) = 1/N * sum_{i != x} |span(i) ∩ span(x)| / |span(i) ∪ span(x)|
//
// Spans are inclusive character intervals; spans in different documents
// contribute zero. Note the 1/N prefactor over N-1 terms.
double ProvenanceOffsetScore(const ValueGroup &group, std::string_view system);

// Bounding box overlap score: same shape as PO with box IOU as the term.
double BboxOverlapScore(const ValueGroup &group, std::string_view system);

// For every member: (members citing the same docid) / N.
std::map<std::string, double> DocProvenanceScores(const ValueGroup &group);

// Document texts (docid -> text) plus key documents (query id or KB id ->
// text). Read-only once loaded.
class DocumentStore {
 public:
  void AddDocument(std::string docid, std::string text);
  void AddKeyDocument(std::string key_id, std::string text);

  const std::string *FindDocument(std::string_view docid) const;
  const std::string *FindKeyDocument(std::string_view key_id) const;

  const std::map<std::string, std::string> &documents() const {
    return documents_;
  }
  const std::map<std::string, std::string> &key_documents() const {
    return key_documents_;
  }

 private:
  std::map<std::string, std::string> documents_;
  std::map<std::string, std::string> key_documents_;
};

// Lowercased maximal alphanumeric runs (Unicode-aware).
std::vector<std::string> Tokenize(std::string_view text);

using SparseVector = std::map<std::string, double>;

// TF-IDF statistics over the store's documents: raw term counts,
// idf = ln(D / df). Terms unseen in the store get no weight.
class TfIdfIndex {
 public:
  explicit TfIdfIndex(const DocumentStore &store);

  size_t num_documents() const { return num_documents_; }
  // 0 for terms that never occur in the store.
  double Idf(const std::string &term) const;

  SparseVector Vectorize(std::string_view text) const;

  // Cached vector of a store document; nullptr if the docid is unknown.
  const SparseVector *DocumentVector(std::string_view docid) const;
  const SparseVector *KeyDocumentVector(std::string_view key_id) const;

 private:
  size_t num_documents_ = 0;
  std::unordered_map<std::string, double> idf_;
  std::map<std::string, SparseVector, std::less<>> doc_vectors_;
  std::map<std::string, SparseVector, std::less<>> key_vectors_;
};

double CosineSimilarity(const SparseVector &a, const SparseVector &b);

// Cosine of the TF-IDF vectors of two texts; 0 if either vector is empty.
double KeyValueDocSimilarity(std::string_view key_doc,
                             std::string_view value_doc,
                             const TfIdfIndex &stats);

// Binds feature indices to meanings. Blocks, each in roster order:
//   confidence | PO or BBO | doc provenance (text tasks) |
//   key/value cosine (text tasks) | one-hot category
class FeatureLayout {
 public:
  FeatureLayout() = default;
  FeatureLayout(TaskKind task, Roster roster, CategoryInventory categories,
                bool cosine_enabled);

  TaskKind task() const { return task_; }
  const Roster &roster() const { return roster_; }
  const CategoryInventory &categories() const { return categories_; }
  bool cosine_enabled() const { return cosine_enabled_; }

  size_t num_systems() const { return roster_.size(); }
  size_t confidence_offset() const { return 0; }
  size_t overlap_offset() const { return num_systems(); }
  size_t doc_provenance_offset() const { return 2 * num_systems(); }
  size_t cosine_offset() const { return 3 * num_systems(); }
  size_t category_offset() const {
    return (IsTextTask(task_) ? 4 : 2) * num_systems();
  }
  size_t dimension() const { return category_offset() + categories_.size(); }

  // Human-readable name per index, e.g. "conf:sys1" or "type:per:age".
  std::vector<std::string> Names() const;

  bool operator==(const FeatureLayout &) const = default;

 private:
  TaskKind task_ = TaskKind::kSlotFilling;
  Roster roster_;
  CategoryInventory categories_;
  bool cosine_enabled_ = false;
};

struct FeatureVector {
  std::vector<double> values;
};

// Assembles the feature row for one group. Absent systems contribute zeros
// in every per-system block. `stats` fills the cosine block when the layout
// enables it; a missing key document yields 0, a missing value document is
// kMissingDocument.
FeatureVector BuildFeatureVector(const ValueGroup &group,
                                 const FeatureLayout &layout,
                                 const TfIdfIndex *stats = nullptr);

// Convenience owner of a layout plus the optional document statistics.
class FeatureExtractor {
 public:
  FeatureExtractor(FeatureLayout layout,
                   std::shared_ptr<const DocumentStore> store);

  const FeatureLayout &layout() const { return layout_; }
  FeatureVector Extract(const ValueGroup &group) const;

 private:
  FeatureLayout layout_;
  std::shared_ptr<const DocumentStore> store_;
  std::unique_ptr<TfIdfIndex> stats_;
};

}  // namespace swaf

#endif  // SWAF_FEATURES_H_
